#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "ltm/core/config.hpp"
#include "ltm/core/corpus.hpp"
#include "ltm/core/types.hpp"
#include "ltm/core/unicode.hpp"
#include "test_util.hpp"

using namespace ltm;
using nlohmann::json;

TEST_CASE("utf8 helpers") {
    CHECK(utf8_length("") == 0);
    CHECK(utf8_length("abc") == 3);
    CHECK(utf8_length("中文ab") == 4);
    CHECK(utf8_suffix("中文abc", 3) == "abc");
    CHECK(utf8_suffix("abc", 10) == "abc");
    CHECK(trim("  你好  ") == "你好");
    CHECK(trim("　中　") == "中");
    CHECK(trim("   ") == "");
}

TEST_CASE("utterance and context invariants") {
    CHECK_THROWS_AS(make_utterance(Speaker::User, "   ", 0), InvalidArgument);
    DialogueContext ctx;
    ctx.append(make_utterance(Speaker::User, "你好", 0));
    ctx.append(make_utterance(Speaker::Bot, "你好呀", 1));
    CHECK_THROWS_AS(ctx.append(make_utterance(Speaker::User, "again", 1)), InvalidArgument);
    CHECK(ctx.joined_text() == "你好\n你好呀");
}

TEST_CASE("engine config defaults match the documented operating point") {
    EngineConfig cfg;
    CHECK(cfg.dup_threshold == 0.95);
    CHECK(cfg.top_k == 5);
    CHECK(cfg.sim_threshold == 0.7);
    CHECK(cfg.margin_alpha == 0.2);
    CHECK(cfg.budget_context == 384);
    CHECK(cfg.budget_user_persona == 76);
    CHECK(cfg.budget_bot_persona == 52);
    CHECK_FALSE(cfg.capacity_limit.has_value());
    CHECK(cfg.embedding_dim == 256);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config file round-trip and validation") {
    EngineConfig cfg;
    cfg.top_k = 7;
    cfg.sim_threshold = -0.25;
    cfg.capacity_limit = 1000;
    cfg.role_token_user = "用户画像:";
    cfg.index_backend = IndexBackend::Ivf;

    EngineConfig parsed = parse_config(serialize_config(cfg));
    CHECK(parsed.top_k == 7);
    CHECK(parsed.sim_threshold == -0.25);
    CHECK(parsed.capacity_limit == 1000);
    CHECK(parsed.role_token_user == "用户画像:");
    CHECK(parsed.index_backend == IndexBackend::Ivf);

    CHECK_THROWS_AS(parse_config("dup_threshold=1.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("top_k=0\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("no_such_key=1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("top_k\n"), InvalidArgument);

    // comments and blanks are fine
    EngineConfig commented = parse_config("# tuning\n\ntop_k = 3\n");
    CHECK(commented.top_k == 3);

    CHECK(parse_config("loss_orientation=as_printed\n").loss_orientation ==
          LossOrientation::AsPrinted);
    CHECK(parse_config("capacity_limit=none\n").capacity_limit == std::nullopt);
    CHECK_THROWS_AS(parse_config("loss_orientation=sideways\n"), InvalidArgument);

    testutil::TempDir dir;
    save_config(cfg, dir.file("engine.cfg"));
    EngineConfig loaded = load_config(dir.file("engine.cfg"));
    CHECK(loaded.top_k == 7);
    CHECK_THROWS_AS(load_config(dir.file("missing.cfg")), IoError);
}

namespace {

std::string tiny_dialogue_line(const std::string& id, std::size_t n_turns) {
    json turns = json::array();
    for (std::size_t i = 0; i < n_turns; ++i)
        turns.push_back({{"speaker", i % 2 == 0 ? "user" : "bot"},
                         {"text", "第" + std::to_string(i) + "句话"}});
    json j{{"dialogue_id", id},
           {"bot_personas", {"我是医生", json{{"id", "b9"}, {"text", "我喜欢猫"}}}},
           {"user_personas_seen", {"我爱跑步"}},
           {"user_personas_unseen", json::array()},
           {"turns", turns}};
    return j.dump();
}

}  // namespace

TEST_CASE("load_corpus basics") {
    testutil::TempDir dir;

    SUBCASE("empty file yields empty corpus") {
        testutil::write_file(dir.file("empty.jsonl"), "");
        auto result = load_corpus(dir.file("empty.jsonl"));
        CHECK(result.dialogues.empty());
        CHECK(result.issues.empty());
    }

    SUBCASE("single dialogue with 16 turns") {
        testutil::write_file(dir.file("one.jsonl"), tiny_dialogue_line("d1", 16) + "\n");
        auto result = load_corpus(dir.file("one.jsonl"));
        REQUIRE(result.dialogues.size() == 1);
        CHECK(result.dialogues[0].turns.size() == 16);
        CHECK(result.dialogues[0].bot_personas[0].id == "bot:0");
        CHECK(result.dialogues[0].bot_personas[1].id == "b9");
        CHECK(result.issues.empty());
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_corpus(dir.file("nope.jsonl")), IoError);
    }
}

TEST_CASE("malformed lines are reported with line numbers and skipped") {
    testutil::TempDir dir;
    std::string data = tiny_dialogue_line("d1", 4) + "\n" +
                       "{not json}\n" +
                       tiny_dialogue_line("d2", 6) + "\n";
    // dangling grounded persona id
    json bad{{"dialogue_id", "d3"},
             {"bot_personas", {"我是医生"}},
             {"turns", {{{"speaker", "user"}, {"text", "hi"},
                         {"grounded_persona_ids", {"ghost"}}}}}};
    data += bad.dump() + "\n";
    // missing speaker
    json nospeaker{{"dialogue_id", "d4"}, {"turns", {{{"text", "hi"}}}}};
    data += nospeaker.dump() + "\n";
    // non-alternating speakers
    json noalt{{"dialogue_id", "d5"},
               {"turns", {{{"speaker", "user"}, {"text", "a"}},
                          {{"speaker", "user"}, {"text", "b"}}}}};
    data += noalt.dump() + "\n";

    testutil::write_file(dir.file("messy.jsonl"), data);
    auto result = load_corpus(dir.file("messy.jsonl"));
    CHECK(result.dialogues.size() == 2);
    REQUIRE(result.issues.size() == 4);
    CHECK(result.issues[0].line == 2);
    CHECK(result.issues[1].line == 4);
    CHECK(result.issues[1].message.find("dangling") != std::string::npos);
    CHECK(result.issues[2].line == 5);
    CHECK(result.issues[3].line == 6);
}

TEST_CASE("corpus round-trips through serialize modulo key order") {
    std::string data = tiny_dialogue_line("d1", 4) + "\n" + tiny_dialogue_line("d2", 8) + "\n";
    auto first = parse_corpus(data);
    REQUIRE(first.issues.empty());
    std::string serialized = serialize_corpus(first.dialogues);
    auto second = parse_corpus(serialized);
    REQUIRE(second.issues.empty());
    REQUIRE(second.dialogues.size() == first.dialogues.size());
    // JSON-level equality per line (key order free)
    std::istringstream a(serialize_corpus(first.dialogues));
    std::istringstream b(serialize_corpus(second.dialogues));
    std::string la, lb;
    while (std::getline(a, la) && std::getline(b, lb))
        CHECK(json::parse(la) == json::parse(lb));

    // canonical-form input (explicit persona objects): load then serialize
    // matches the source line exactly, modulo key order and whitespace
    std::istringstream canon(serialized);
    std::string line;
    while (std::getline(canon, line)) {
        auto loaded = parse_corpus(line + "\n");
        REQUIRE(loaded.dialogues.size() == 1);
        CHECK(json::parse(serialize_dialogue(loaded.dialogues[0])) == json::parse(line));
    }
}

TEST_CASE("corpus_stats") {
    CHECK_THROWS_AS(corpus_stats({}), InvalidArgument);

    auto one = parse_corpus(tiny_dialogue_line("d1", 10) + "\n").dialogues;
    CorpusStats s1 = corpus_stats(one);
    CHECK(s1.n_dialogues == 1);
    CHECK(s1.n_utterances == 10);
    CHECK(s1.avg_turns == doctest::Approx(10.0));
    CHECK(s1.avg_bot_personas == doctest::Approx(2.0));
    CHECK(s1.avg_user_personas_seen == doctest::Approx(1.0));
    CHECK(s1.avg_user_personas_unseen == doctest::Approx(0.0));
    // "第0句话" is 4 codepoints
    CHECK(s1.avg_utterance_length == doctest::Approx(4.0));

    auto two = parse_corpus(tiny_dialogue_line("d1", 10) + "\n" + tiny_dialogue_line("d2", 20) + "\n")
                   .dialogues;
    CHECK(corpus_stats(two).avg_turns == doctest::Approx(15.0));

    // singleton corpus equals the dialogue's own measurements
    auto single = two;
    single.resize(1);
    CorpusStats own = corpus_stats(single);
    CHECK(own.n_utterances == single[0].turns.size());
    CHECK(own.avg_turns == doctest::Approx(static_cast<double>(single[0].turns.size())));
}

TEST_CASE("persona ids are deterministic and content-derived") {
    std::string a = persona_id(Speaker::User, "s1", 3, 0, "我是画家");
    std::string b = persona_id(Speaker::User, "s1", 3, 0, "我是画家");
    std::string c = persona_id(Speaker::User, "s1", 3, 5, "我是画家");
    CHECK(a == b);
    CHECK(a != c);
}
