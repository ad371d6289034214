// ltm — long-term persona memory engine CLI.
//
// Subcommands: ingest, stats, extract, simulate, eval-rank, eval-gen,
// repl, serve. Machine-readable JSON goes to stdout; --pretty switches
// to indented output. Backend URLs come from the config file or the
// LTM_*_URL environment variables.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltm/core/corpus.hpp"
#include "ltm/encoder/ranking.hpp"
#include "ltm/evalkit/harness.hpp"
#include "ltm/evalkit/metrics.hpp"
#include "ltm/extractor/extractor.hpp"
#include "ltm/service/engine.hpp"
#include "ltm/service/server.hpp"

using namespace ltm;
using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string config_path;
    bool pretty = false;
};

EngineConfig resolve_config(const GlobalOpts& opts) {
    EngineConfig cfg = opts.config_path.empty() ? EngineConfig{} : load_config(opts.config_path);
    apply_env_overrides(cfg);
    cfg.validate();
    return cfg;
}

void emit(const json& j, const GlobalOpts& opts) {
    std::cout << (opts.pretty ? j.dump(2) : j.dump()) << "\n";
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

json issues_json(const std::vector<CorpusIssue>& issues) {
    json arr = json::array();
    for (const auto& i : issues) arr.push_back({{"line", i.line}, {"message", i.message}});
    return arr;
}

int cmd_ingest(const GlobalOpts& opts, const std::string& path) {
    auto result = load_corpus(path);
    std::size_t utterances = 0;
    for (const auto& d : result.dialogues) utterances += d.turns.size();
    emit(json{{"n_dialogues", result.dialogues.size()},
              {"n_utterances", utterances},
              {"n_issues", result.issues.size()},
              {"issues", issues_json(result.issues)}},
         opts);
    return result.issues.empty() ? 0 : 1;
}

int cmd_stats(const GlobalOpts& opts, const std::string& path) {
    auto result = load_corpus(path);
    CorpusStats s = corpus_stats(result.dialogues);
    emit(json{{"n_dialogues", s.n_dialogues},
              {"n_utterances", s.n_utterances},
              {"avg_turns", s.avg_turns},
              {"avg_utterance_length", s.avg_utterance_length},
              {"avg_bot_personas", s.avg_bot_personas},
              {"avg_user_personas_seen", s.avg_user_personas_seen},
              {"avg_user_personas_unseen", s.avg_user_personas_unseen},
              {"n_issues", s.n_dialogues ? result.issues.size() : 0}},
         opts);
    return 0;
}

std::shared_ptr<ClassifierPort> make_classifier(const EngineConfig& cfg) {
    if (!cfg.classifier_url.empty())
        return std::make_shared<RemoteClassifier>(cfg.classifier_url);
    if (cfg.classifier_backend == ClassifierBackend::ConstantPositive)
        return std::make_shared<ConstantClassifier>(PersonaLabel::Persona);
    return std::make_shared<LexiconClassifier>();
}

int cmd_extract(const GlobalOpts& opts, const std::string& path) {
    EngineConfig cfg = resolve_config(opts);
    auto classifier = make_classifier(cfg);
    std::size_t turn = 0;
    for (const auto& line : read_lines(path)) {
        if (trim(line).empty()) continue;
        Utterance u = make_utterance(Speaker::User, line, turn);
        json personas = json::array();
        for (const auto& p : extract_personas(u, *classifier, "extract"))
            personas.push_back({{"id", p.id}, {"text", p.text}});
        emit(json{{"turn", turn}, {"text", line}, {"personas", personas}}, opts);
        ++turn;
    }
    return 0;
}

int cmd_simulate(const GlobalOpts& opts, int episodes, int sessions, int rounds, bool no_memory,
                 bool no_pe, std::uint64_t seed, const std::string& openings_path,
                 const std::string& rater_out) {
    EngineConfig cfg = resolve_config(opts);
    if (no_pe) cfg.classifier_backend = ClassifierBackend::ConstantPositive;
    SelfChatHarness harness(cfg, make_classifier(cfg),
                            EncoderPair::shared(std::make_shared<HashingEncoder>(cfg.embedding_dim)),
                            std::make_shared<CharTokenizer>());

    EpisodeSpec spec;
    spec.n_sessions = sessions;
    spec.rounds_per_session = rounds;
    spec.memory_enabled = !no_memory;
    spec.opening_lines = {"我是一名画家，平时喜欢画风景。", "你是一名画家",
                          "你是一名画家吧", "你是一名画家呀"};
    if (!openings_path.empty()) {
        spec.opening_lines.clear();
        for (const auto& line : read_lines(openings_path))
            if (!trim(line).empty()) spec.opening_lines.push_back(line);
    }

    std::vector<std::string> user_lines = {"今天天气不错", "周末打算出去走走",
                                           "我喜欢安静的地方", "最近在看一本好书",
                                           "你平时都做什么"};

    json episodes_json = json::array();
    CarryoverReport total;
    std::string rater;
    for (int e = 0; e < episodes; ++e) {
        RandomScriptAgent user(user_lines, seed + static_cast<std::uint64_t>(e));
        EchoAgent bot(cfg.role_token_user);
        Transcript t = harness.run_episode(user, bot, spec, "ep" + std::to_string(e + 1),
                                           seed + static_cast<std::uint64_t>(e));
        auto report = memory_carryover_report(t);
        total.carried_persona_count += report.carried_persona_count;
        for (const auto& [bin, count] : report.first_use_histogram)
            total.first_use_histogram[bin] += count;
        episodes_json.push_back(transcript_to_json(t));
        rater += rater_export_jsonl(t);
    }
    if (!rater_out.empty()) {
        std::ofstream out(rater_out, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write rater export: " + rater_out);
        out << rater;
    }
    emit(json{{"episodes", episodes_json}, {"carryover", carryover_to_json(total)}}, opts);
    return 0;
}

// Training-data export for persona classifiers: corpus turns carry the
// human is_persona_sentence labels (authoritative); an optional augment
// file of raw utterances is auto-labeled clause-by-clause with the
// configured classifier and marked "auto".
int cmd_export_clf(const GlobalOpts& opts, const std::string& corpus_path,
                   const std::string& augment_path) {
    auto corpus = load_corpus(corpus_path);
    for (const auto& d : corpus.dialogues)
        for (const auto& t : d.turns)
            emit(json{{"text", t.text},
                      {"label", t.is_persona_sentence ? 1 : 0},
                      {"source", "human"}},
                 opts);
    if (!augment_path.empty()) {
        EngineConfig cfg = resolve_config(opts);
        auto classifier = make_classifier(cfg);
        std::size_t turn = 0;
        for (const auto& line : read_lines(augment_path)) {
            if (trim(line).empty()) continue;
            Utterance u = make_utterance(Speaker::User, line, turn++);
            bool positive = !extract_personas(u, *classifier, "aug").empty();
            emit(json{{"text", line}, {"label", positive ? 1 : 0}, {"source", "auto"}}, opts);
        }
    }
    return 0;
}

int cmd_eval_rank(const GlobalOpts& opts, const std::string& path) {
    EngineConfig cfg = resolve_config(opts);
    auto corpus = load_corpus(path);
    std::vector<RankingExample> examples;
    for (const auto& d : corpus.dialogues) {
        auto mined = mine_ranking_examples(d);
        examples.insert(examples.end(), mined.begin(), mined.end());
    }
    // drop degenerate examples (no negatives)
    std::erase_if(examples, [](const RankingExample& e) {
        return e.positives.empty() || e.negatives.empty();
    });
    if (examples.empty()) {
        std::cerr << "no usable ranking examples in " << path << "\n";
        return 1;
    }

    EncoderPair encoders =
        cfg.encoder_url.empty()
            ? EncoderPair::shared(std::make_shared<HashingEncoder>(cfg.embedding_dim))
            : EncoderPair::shared(
                  std::make_shared<RemoteEncoder>(cfg.encoder_url, cfg.embedding_dim));
    RankerMetrics m = evaluate_ranker(examples, encoders, cfg.budget_context);
    emit(json{{"auc", m.auc},
              {"recall_at_1", m.recall_at_1},
              {"recall_at_5", m.recall_at_5},
              {"n_examples", m.n_examples}},
         opts);
    return 0;
}

int cmd_eval_gen(const GlobalOpts& opts, const std::string& pred_path,
                 const std::string& gold_path, const std::string& token_mode) {
    auto preds = read_lines(pred_path);
    auto golds = read_lines(gold_path);
    if (preds.size() != golds.size())
        throw InvalidArgument("prediction and reference files differ in line count");
    if (preds.empty()) throw InvalidArgument("empty evaluation files");

    auto tokenize = [&](const std::string& s) {
        if (token_mode == "char") {
            std::vector<std::string> out;
            for (auto cp : utf8_chars(s)) out.emplace_back(cp);
            return out;
        }
        return naive_tokens(s);
    };

    double bleu1 = 0, bleu2 = 0, f1 = 0;
    std::vector<std::vector<std::string>> responses;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        auto cand = tokenize(preds[i]);
        auto ref = tokenize(golds[i]);
        bleu1 += bleu_n(cand, ref, 1);
        bleu2 += bleu_n(cand, ref, 2);
        f1 += char_f1(preds[i], golds[i]);
        responses.push_back(std::move(cand));
    }
    const double n = static_cast<double>(preds.size());
    json out{{"bleu_1", bleu1 / n},
             {"bleu_2", bleu2 / n},
             {"char_f1", f1 / n},
             {"n_pairs", preds.size()}};
    try {
        out["distinct_1"] = distinct_n(responses, 1);
        out["distinct_2"] = distinct_n(responses, 2);
    } catch (const InvalidArgument&) {
        out["distinct_1"] = nullptr;
        out["distinct_2"] = nullptr;
    }
    emit(out, opts);
    return 0;
}

int cmd_repl(const GlobalOpts& opts) {
    EngineConfig cfg = resolve_config(opts);
    Engine engine(cfg, EngineBackends::defaults(cfg));
    std::string sid = engine.create_session("repl");
    std::cerr << "ltm repl: type an utterance per line, ctrl-d to exit\n";
    std::string line;
    while (std::getline(std::cin, line)) {
        if (trim(line).empty()) continue;
        try {
            TurnResult result = engine.take_turn("repl", sid, Speaker::User, line);
            emit(turn_result_to_json(result), opts);
        } catch (const std::exception& e) {
            std::cerr << "turn failed: " << e.what() << "\n";
        }
    }
    engine.persist_all();
    return 0;
}

HttpService* g_service = nullptr;

int cmd_serve(const GlobalOpts& opts, const std::string& host, int port) {
    EngineConfig cfg = resolve_config(opts);
    Engine engine(cfg, EngineBackends::defaults(cfg));
    HttpService service(engine);
    g_service = &service;
    std::signal(SIGINT, [](int) { if (g_service) g_service->stop(); });
    std::signal(SIGTERM, [](int) { if (g_service) g_service->stop(); });
    std::cerr << "ltm serving on " << host << ":" << port << "\n";
    bool ok = service.listen(host, port);
    engine.persist_all();
    g_service = nullptr;
    if (!ok) {
        std::cerr << "failed to listen on " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-term persona memory engine"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts opts;
    app.add_option("--config", opts.config_path, "key=value engine config file");
    app.add_flag("--pretty", opts.pretty, "indent JSON output");

    std::string corpus_path, file_path, pred_path, gold_path, token_mode = "char";
    std::string openings_path, rater_out, host = "0.0.0.0";
    int episodes = 10, sessions = 4, rounds = 16, port = 8080;
    bool no_memory = false, no_pe = false;
    std::uint64_t seed = 1;

    auto* ingest = app.add_subcommand("ingest", "parse and validate a JSONL corpus");
    ingest->add_option("corpus", corpus_path)->required();

    auto* stats = app.add_subcommand("stats", "corpus statistics");
    stats->add_option("corpus", corpus_path)->required();

    auto* extract = app.add_subcommand("extract", "extract personas from a text file, one utterance per line");
    extract->add_option("file", file_path)->required();

    auto* simulate = app.add_subcommand("simulate", "multi-session self-chat with stub agents");
    simulate->add_option("--episodes", episodes);
    simulate->add_option("--sessions", sessions);
    simulate->add_option("--rounds", rounds);
    simulate->add_flag("--no-memory", no_memory, "reset memories between sessions");
    simulate->add_flag("--no-pe", no_pe, "store every clause, skipping persona extraction");
    simulate->add_option("--seed", seed);
    simulate->add_option("--openings", openings_path, "file with one session opening per line");
    simulate->add_option("--rater-out", rater_out, "write rater JSONL here");

    std::string augment_path;
    auto* export_clf =
        app.add_subcommand("export-clf", "export classifier training data from corpus labels");
    export_clf->add_option("corpus", corpus_path)->required();
    export_clf->add_option("--augment", augment_path,
                           "auto-label these utterances with the configured classifier");

    auto* eval_rank = app.add_subcommand("eval-rank", "retrieval metrics from grounding annotations");
    eval_rank->add_option("corpus", corpus_path)->required();

    auto* eval_gen = app.add_subcommand("eval-gen", "generation metrics: BLEU-1/2, char-F1, DISTINCT-1/2");
    eval_gen->add_option("pred", pred_path)->required();
    eval_gen->add_option("gold", gold_path)->required();
    eval_gen->add_option("--tokens", token_mode, "char | naive (whitespace when present)")
        ->check(CLI::IsMember({"char", "naive"}));

    auto* repl = app.add_subcommand("repl", "interactive turn pipeline");
    auto* serve = app.add_subcommand("serve", "HTTP service");
    serve->add_option("--port", port);
    serve->add_option("--host", host);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(opts, corpus_path);
        if (stats->parsed()) return cmd_stats(opts, corpus_path);
        if (extract->parsed()) return cmd_extract(opts, file_path);
        if (export_clf->parsed()) return cmd_export_clf(opts, corpus_path, augment_path);
        if (simulate->parsed())
            return cmd_simulate(opts, episodes, sessions, rounds, no_memory, no_pe, seed,
                                openings_path, rater_out);
        if (eval_rank->parsed()) return cmd_eval_rank(opts, corpus_path);
        if (eval_gen->parsed()) return cmd_eval_gen(opts, pred_path, gold_path, token_mode);
        if (repl->parsed()) return cmd_repl(opts);
        if (serve->parsed()) return cmd_serve(opts, host, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
