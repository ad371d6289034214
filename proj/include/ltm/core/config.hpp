#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace ltm {

enum class LossOrientation { Canonical, AsPrinted };
enum class IndexBackend { Exhaustive, Ivf };

// ConstantPositive stores every clause unfiltered — the memory's
// behavior with the persona extractor disabled.
enum class ClassifierBackend { Lexicon, ConstantPositive };

// Engine-wide knobs. Defaults are the operating point the system is
// tuned for; the memory is unbounded unless capacity_limit is set.
struct EngineConfig {
    // memory thresholds
    double dup_threshold = 0.95;   // write-time near-duplicate replacement
    std::size_t top_k = 5;         // read candidates per memory
    double sim_threshold = 0.7;    // read-time sparsity filter s_c
    double margin_alpha = 0.2;     // triplet hinge margin

    // token budgets per input segment kind
    std::size_t budget_context = 384;
    std::size_t budget_user_persona = 76;
    std::size_t budget_bot_persona = 52;

    std::optional<std::size_t> capacity_limit;  // absent = unlimited

    // embedding / retrieval backend
    std::size_t embedding_dim = 256;
    LossOrientation loss_orientation = LossOrientation::Canonical;
    IndexBackend index_backend = IndexBackend::Exhaustive;
    std::size_t ivf_nlist = 64;
    std::size_t ivf_nprobe = 40;

    // assembly
    std::string role_token_bot = "system persona:";
    std::string role_token_user = "user persona:";
    std::size_t max_response_tokens = 128;

    // pipeline behavior
    bool extract_bot_responses = true;
    ClassifierBackend classifier_backend = ClassifierBackend::Lexicon;

    // service
    std::string snapshot_dir;  // empty = in-memory only
    std::string encoder_url;
    std::string classifier_url;
    std::string generator_url;

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
};

/// Flat key=value file, one field per line, '#' comments allowed.
EngineConfig load_config(const std::string& path);
EngineConfig parse_config(const std::string& text);
std::string serialize_config(const EngineConfig& cfg);
void save_config(const EngineConfig& cfg, const std::string& path);

/// LTM_ENCODER_URL / LTM_CLASSIFIER_URL / LTM_GENERATOR_URL override file values.
void apply_env_overrides(EngineConfig& cfg);

}  // namespace ltm
