#include "ltm/core/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ltm/core/errors.hpp"
#include "ltm/core/unicode.hpp"

namespace ltm {

void EngineConfig::validate() const {
    auto in_unit = [](double v) { return v >= -1.0 && v <= 1.0; };
    if (!in_unit(dup_threshold)) throw InvalidArgument("dup_threshold must be in [-1,1]");
    if (!in_unit(sim_threshold)) throw InvalidArgument("sim_threshold must be in [-1,1]");
    if (margin_alpha < 0.0) throw InvalidArgument("margin_alpha must be >= 0");
    if (top_k == 0) throw InvalidArgument("top_k must be positive");
    if (budget_context == 0 || budget_user_persona == 0 || budget_bot_persona == 0)
        throw InvalidArgument("budgets must be positive");
    if (capacity_limit && *capacity_limit == 0)
        throw InvalidArgument("capacity_limit must be positive when set");
    if (embedding_dim == 0) throw InvalidArgument("embedding_dim must be positive");
    if (ivf_nlist == 0 || ivf_nprobe == 0)
        throw InvalidArgument("ivf_nlist / ivf_nprobe must be positive");
    if (max_response_tokens == 0) throw InvalidArgument("max_response_tokens must be positive");
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InvalidArgument("config: bad number for " + key + ": " + v);
    }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long n = std::stoll(v, &pos);
        if (pos != v.size() || n < 0) throw std::invalid_argument(v);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw InvalidArgument("config: bad integer for " + key + ": " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidArgument("config: bad boolean for " + key + ": " + v);
}

void apply_pair(EngineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dup_threshold") cfg.dup_threshold = parse_double(key, value);
    else if (key == "top_k") cfg.top_k = parse_size(key, value);
    else if (key == "sim_threshold") cfg.sim_threshold = parse_double(key, value);
    else if (key == "margin_alpha") cfg.margin_alpha = parse_double(key, value);
    else if (key == "budget_context") cfg.budget_context = parse_size(key, value);
    else if (key == "budget_user_persona") cfg.budget_user_persona = parse_size(key, value);
    else if (key == "budget_bot_persona") cfg.budget_bot_persona = parse_size(key, value);
    else if (key == "capacity_limit") {
        if (value == "none" || value.empty())
            cfg.capacity_limit.reset();
        else
            cfg.capacity_limit = parse_size(key, value);
    } else if (key == "embedding_dim") cfg.embedding_dim = parse_size(key, value);
    else if (key == "loss_orientation") {
        if (value == "canonical") cfg.loss_orientation = LossOrientation::Canonical;
        else if (value == "as_printed") cfg.loss_orientation = LossOrientation::AsPrinted;
        else throw InvalidArgument("config: bad loss_orientation: " + value);
    } else if (key == "index_backend") {
        if (value == "exhaustive") cfg.index_backend = IndexBackend::Exhaustive;
        else if (value == "ivf") cfg.index_backend = IndexBackend::Ivf;
        else throw InvalidArgument("config: bad index_backend: " + value);
    } else if (key == "ivf_nlist") cfg.ivf_nlist = parse_size(key, value);
    else if (key == "ivf_nprobe") cfg.ivf_nprobe = parse_size(key, value);
    else if (key == "role_token_bot") cfg.role_token_bot = value;
    else if (key == "role_token_user") cfg.role_token_user = value;
    else if (key == "max_response_tokens") cfg.max_response_tokens = parse_size(key, value);
    else if (key == "extract_bot_responses") cfg.extract_bot_responses = parse_bool(key, value);
    else if (key == "classifier_backend") {
        if (value == "lexicon") cfg.classifier_backend = ClassifierBackend::Lexicon;
        else if (value == "constant_positive")
            cfg.classifier_backend = ClassifierBackend::ConstantPositive;
        else throw InvalidArgument("config: bad classifier_backend: " + value);
    }
    else if (key == "snapshot_dir") cfg.snapshot_dir = value;
    else if (key == "encoder_url") cfg.encoder_url = value;
    else if (key == "classifier_url") cfg.classifier_url = value;
    else if (key == "generator_url") cfg.generator_url = value;
    else throw InvalidArgument("config: unknown key: " + key);
}

}  // namespace

EngineConfig parse_config(const std::string& text) {
    EngineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(sv.substr(0, eq)));
        std::string value(trim(sv.substr(eq + 1)));
        apply_pair(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

EngineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const EngineConfig& cfg) {
    std::ostringstream out;
    out << "dup_threshold=" << cfg.dup_threshold << '\n'
        << "top_k=" << cfg.top_k << '\n'
        << "sim_threshold=" << cfg.sim_threshold << '\n'
        << "margin_alpha=" << cfg.margin_alpha << '\n'
        << "budget_context=" << cfg.budget_context << '\n'
        << "budget_user_persona=" << cfg.budget_user_persona << '\n'
        << "budget_bot_persona=" << cfg.budget_bot_persona << '\n'
        << "capacity_limit=" << (cfg.capacity_limit ? std::to_string(*cfg.capacity_limit) : "none") << '\n'
        << "embedding_dim=" << cfg.embedding_dim << '\n'
        << "loss_orientation="
        << (cfg.loss_orientation == LossOrientation::Canonical ? "canonical" : "as_printed") << '\n'
        << "index_backend=" << (cfg.index_backend == IndexBackend::Exhaustive ? "exhaustive" : "ivf")
        << '\n'
        << "ivf_nlist=" << cfg.ivf_nlist << '\n'
        << "ivf_nprobe=" << cfg.ivf_nprobe << '\n'
        << "role_token_bot=" << cfg.role_token_bot << '\n'
        << "role_token_user=" << cfg.role_token_user << '\n'
        << "max_response_tokens=" << cfg.max_response_tokens << '\n'
        << "extract_bot_responses=" << (cfg.extract_bot_responses ? "true" : "false") << '\n'
        << "classifier_backend="
        << (cfg.classifier_backend == ClassifierBackend::Lexicon ? "lexicon" : "constant_positive")
        << '\n'
        << "snapshot_dir=" << cfg.snapshot_dir << '\n'
        << "encoder_url=" << cfg.encoder_url << '\n'
        << "classifier_url=" << cfg.classifier_url << '\n'
        << "generator_url=" << cfg.generator_url << '\n';
    return out.str();
}

void save_config(const EngineConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write config file: " + path);
    out << serialize_config(cfg);
}

void apply_env_overrides(EngineConfig& cfg) {
    if (const char* v = std::getenv("LTM_ENCODER_URL")) cfg.encoder_url = v;
    if (const char* v = std::getenv("LTM_CLASSIFIER_URL")) cfg.classifier_url = v;
    if (const char* v = std::getenv("LTM_GENERATOR_URL")) cfg.generator_url = v;
}

}  // namespace ltm
