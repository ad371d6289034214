#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "ltm/memory/store.hpp"
#include "ltm/memory/wal.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ltm;

namespace {

EngineConfig small_cfg(std::size_t dim = 256) {
    EngineConfig cfg;
    cfg.embedding_dim = dim;
    return cfg;
}

PersonaSentence user_persona(const std::string& text, int tag = 0) {
    return make_seeded_persona(Speaker::User, text, "mem", static_cast<std::size_t>(tag));
}

Embedding unit2(double x) {
    return make_embedding({static_cast<float>(x),
                           static_cast<float>(std::sqrt(std::max(0.0, 1.0 - x * x)))});
}

// Entry whose cosine to the axis query is exactly `score`, with the
// residual mass on a per-entry orthogonal axis so entries stay mutually
// dissimilar (pairwise cosine = product of scores).
Embedding scored_entry(double score, std::size_t which, std::size_t dim) {
    std::vector<float> v(dim, 0.0f);
    v[0] = static_cast<float>(score);
    v[1 + which] = static_cast<float>(std::sqrt(std::max(0.0, 1.0 - score * score)));
    return make_embedding(std::move(v));
}

Embedding axis_query(std::size_t dim) {
    std::vector<float> v(dim, 0.0f);
    v[0] = 1.0f;
    return make_embedding(std::move(v));
}

// Exhaustive read oracle: scan entries, top-k by (score desc, slot asc),
// then drop below-threshold scores.
std::vector<std::pair<std::string, double>> oracle_read(
    const std::vector<MemoryEntry>& entries, const Embedding& query, std::size_t k,
    double threshold) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < entries.size(); ++i)
        scored.emplace_back(oracle::cosine(query.values, entries[i].embedding.values), i);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) {
        if (scored[i].first < threshold) continue;
        out.emplace_back(entries[scored[i].second].persona.id, scored[i].first);
    }
    return out;
}

}  // namespace

TEST_CASE("write: insert, exact duplicate, near duplicate") {
    HashingEncoder enc(256);
    MemoryStore store(Speaker::User, small_cfg());

    auto first = store.write(user_persona("我是一名画家", 1), enc);
    CHECK(first.kind == WriteKind::Inserted);
    CHECK(store.size() == 1);

    // identical text: replaced in place, size stays 1
    auto second = store.write(user_persona("我是一名画家", 2), enc);
    CHECK(second.kind == WriteKind::Replaced);
    CHECK(store.size() == 1);
    auto entries = store.entries();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].replaced_count == 1);
    CHECK(entries[0].written_at == 2);

    // clearly dissimilar: inserted
    auto third = store.write(user_persona("今天的天气真是不错呀", 3), enc);
    CHECK(third.kind == WriteKind::Inserted);
    CHECK(store.size() == 2);

    // near-duplicate above s_dup: one char appended to a long sentence
    std::string base = "我非常喜欢在公园里跑步和游泳锻炼身体";
    std::string close = base + "呀";
    REQUIRE(cosine(enc.embed_text(base), enc.embed_text(close)) >= 0.95);
    store.write(user_persona(base, 4), enc);
    std::size_t size_before = store.size();
    auto dup = store.write(user_persona(close, 5), enc);
    CHECK(dup.kind == WriteKind::Replaced);
    CHECK(store.size() == size_before);
}

TEST_CASE("write errors leave the store unchanged") {
    HashingEncoder enc(256);
    MemoryStore store(Speaker::User, small_cfg());
    store.write(user_persona("我喜欢喝茶", 1), enc);

    PersonaSentence bot_owned = make_seeded_persona(Speaker::Bot, "我是机器人", "mem", 9);
    CHECK_THROWS_AS(store.write(bot_owned, enc), InvalidArgument);
    CHECK(store.size() == 1);

    CHECK_THROWS_AS(store.write(user_persona("维度不对", 2), make_embedding({1.0f, 0.0f})),
                    InvalidArgument);
    CHECK(store.size() == 1);
}

TEST_CASE("dedup tie-break replaces the earliest-written entry") {
    EngineConfig cfg = small_cfg(2);
    MemoryStore store(Speaker::User, cfg);

    // e1 and e2 sit symmetrically around the new vector: both at cosine
    // 0.96, but only 0.843 to each other.
    double c = 0.96;
    Embedding e1 = make_embedding({static_cast<float>(c),
                                   static_cast<float>(std::sqrt(1.0 - c * c))});
    Embedding e2 = make_embedding({static_cast<float>(c),
                                   static_cast<float>(-std::sqrt(1.0 - c * c))});
    Embedding v = make_embedding({1.0f, 0.0f});
    REQUIRE(cosine(e1, e2) < 0.95);

    auto p1 = user_persona("第一句", 1);
    auto p2 = user_persona("第二句", 2);
    CHECK(store.write(p1, e1).kind == WriteKind::Inserted);
    CHECK(store.write(p2, e2).kind == WriteKind::Inserted);

    auto outcome = store.write(user_persona("新句子", 3), v);
    CHECK(outcome.kind == WriteKind::Replaced);
    CHECK(outcome.replaced_id == p1.id);  // earliest written wins the tie
    CHECK(store.size() == 2);

    auto entries = store.entries();
    CHECK(entries[0].persona.text == "新句子");
    CHECK(entries[1].persona.id == p2.id);
}

TEST_CASE("write-then-read returns the sentence at rank 1") {
    HashingEncoder enc(256);
    MemoryStore store(Speaker::User, small_cfg());
    store.write(user_persona("我养了一只橘猫", 1), enc);
    store.write(user_persona("我在医院工作", 2), enc);

    DialogueContext ctx;
    ctx.append(make_utterance(Speaker::User, "我养了一只橘猫", 0));
    auto result = store.read(ctx, enc);
    REQUIRE(!result.hits.empty());
    CHECK(result.hits[0].persona.text == "我养了一只橘猫");
    CHECK(result.hits[0].score == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(result.query_id.empty());
}

TEST_CASE("read threshold and top-k semantics") {
    const std::size_t dim = 16;
    EngineConfig cfg = small_cfg(dim);
    MemoryStore store(Speaker::User, cfg);

    // ten entries, seven at or above 0.7; pairwise cosines are products
    // of scores, all below s_dup
    std::vector<double> scores = {0.97, 0.93, 0.9, 0.85, 0.8, 0.75, 0.7, 0.5, 0.3, 0.1};
    for (std::size_t i = 0; i < scores.size(); ++i)
        store.write(user_persona("条目" + std::to_string(i), static_cast<int>(i)),
                    scored_entry(scores[i], i, dim));
    REQUIRE(store.size() == scores.size());

    Embedding query = axis_query(dim);

    SUBCASE("top-k first, then threshold: exactly five") {
        auto result = store.read(query);
        REQUIRE(result.hits.size() == 5);  // top_k = 5, all five >= 0.7
        for (std::size_t i = 0; i + 1 < result.hits.size(); ++i)
            CHECK(result.hits[i].score >= result.hits[i + 1].score);
        for (const auto& h : result.hits) CHECK(h.score >= 0.7);
    }

    SUBCASE("all below threshold: empty hits") {
        MemoryStore s2(Speaker::User, cfg);
        for (std::size_t i = 0; i < 4; ++i)
            s2.write(user_persona("低分" + std::to_string(i), static_cast<int>(i)),
                     scored_entry(0.2 + 0.1 * static_cast<double>(i), i, dim));
        CHECK(s2.read(query).hits.empty());
    }

    SUBCASE("threshold -1 returns min(k, size)") {
        EngineConfig open = cfg;
        open.sim_threshold = -1.0;
        MemoryStore s3(Speaker::User, open);
        for (std::size_t i = 0; i < 3; ++i)
            s3.write(user_persona("少量" + std::to_string(i), static_cast<int>(i)),
                     scored_entry(-0.2 * static_cast<double>(i + 1), i, dim));
        CHECK(s3.read(query).hits.size() == 3);  // size < k
        for (std::size_t i = 3; i < 9; ++i)
            s3.write(user_persona("更多" + std::to_string(i), static_cast<int>(i)),
                     scored_entry(0.1 * static_cast<double>(i), i, dim));
        CHECK(s3.read(query).hits.size() == 5);  // k = 5
    }

    SUBCASE("empty store reads empty") {
        MemoryStore empty(Speaker::Bot, cfg);
        CHECK(empty.read(query).hits.empty());
    }
}

TEST_CASE("read_both queries both stores independently") {
    HashingEncoder enc(256);
    EngineConfig cfg = small_cfg();
    MemoryStore user_store(Speaker::User, cfg);
    MemoryStore bot_store(Speaker::Bot, cfg);

    DialogueContext ctx;
    ctx.append(make_utterance(Speaker::User, "我喜欢画画", 0));

    SUBCASE("both empty") {
        auto [u, b] = read_both(user_store, bot_store, ctx, enc);
        CHECK(u.hits.empty());
        CHECK(b.hits.empty());
    }

    SUBCASE("user store hit only") {
        user_store.write(user_persona("我喜欢画画", 1), enc);
        auto [u, b] = read_both(user_store, bot_store, ctx, enc);
        CHECK(u.hits.size() == 1);
        CHECK(b.hits.empty());
    }

    SUBCASE("both populated yields up to k + k") {
        for (int i = 0; i < 8; ++i) {
            user_store.write(user_persona("我喜欢画画第" + std::to_string(i) + "点", i), enc);
            bot_store.write(
                make_seeded_persona(Speaker::Bot, "我也喜欢画画第" + std::to_string(i) + "点",
                                    "mem", static_cast<std::size_t>(i)),
                enc);
        }
        EngineConfig open = cfg;
        open.sim_threshold = -1.0;
        MemoryStore u2(Speaker::User, open), b2(Speaker::Bot, open);
        for (const auto& e : user_store.entries()) u2.write(e.persona, e.embedding);
        for (const auto& e : bot_store.entries()) b2.write(e.persona, e.embedding);
        auto [u, b] = read_both(u2, b2, ctx, enc);
        CHECK(u.hits.size() == 5);
        CHECK(b.hits.size() == 5);
    }
}

TEST_CASE("exhaustive read equals the brute-force oracle") {
    HashingEncoder enc(128);
    EngineConfig cfg = small_cfg(128);
    cfg.sim_threshold = 0.3;  // make the filter bite without emptying results
    MemoryStore store(Speaker::User, cfg);

    auto sentences = testutil::random_sentences(200, 41, 6, 16);
    for (std::size_t i = 0; i < sentences.size(); ++i)
        store.write(user_persona(sentences[i] + std::to_string(i), static_cast<int>(i)), enc);

    auto entries = store.entries();
    auto queries = testutil::random_sentences(20, 43, 4, 20);
    for (const auto& q : queries) {
        Embedding query = enc.embed_text(q);
        auto expected = oracle_read(entries, query, cfg.top_k, cfg.sim_threshold);
        auto actual = store.read(query);
        REQUIRE(actual.hits.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(actual.hits[i].persona.id == expected[i].first);
            CHECK(actual.hits[i].score == doctest::Approx(expected[i].second).epsilon(1e-9));
        }
    }
}

TEST_CASE("ivf backend: overlap@5 with the oracle stays high") {
    HashingEncoder enc(128);
    EngineConfig cfg = small_cfg(128);
    cfg.index_backend = IndexBackend::Ivf;  // default nlist / nprobe
    cfg.sim_threshold = -1.0;
    MemoryStore store(Speaker::User, cfg);

    auto sentences = testutil::random_sentences(500, 51, 6, 16);
    for (std::size_t i = 0; i < sentences.size(); ++i)
        store.write(user_persona(sentences[i] + std::to_string(i), static_cast<int>(i)), enc);
    auto entries = store.entries();

    auto queries = testutil::random_sentences(100, 53, 4, 20);
    double overlap_sum = 0.0;
    for (const auto& q : queries) {
        Embedding query = enc.embed_text(q);
        auto expected = oracle_read(entries, query, 5, -1.0);
        auto actual = store.read(query);
        std::size_t common = 0;
        for (const auto& h : actual.hits)
            for (const auto& [id, score] : expected)
                if (h.persona.id == id) ++common;
        overlap_sum += static_cast<double>(common) / 5.0;
    }
    CHECK(overlap_sum / 100.0 >= 0.95);
}

TEST_CASE("read_rescored: coarse candidates from cache, fresh scores on top") {
    const std::size_t dim = 16;
    EngineConfig cfg = small_cfg(dim);
    cfg.sim_threshold = 0.5;
    cfg.top_k = 2;
    MemoryStore store(Speaker::User, cfg);

    std::vector<double> cached_scores = {0.9, 0.8, 0.7, 0.6};
    for (std::size_t i = 0; i < cached_scores.size(); ++i)
        store.write(user_persona("候选" + std::to_string(i), static_cast<int>(i)),
                    scored_entry(cached_scores[i], i, dim));

    // the matching model disagrees with the cached ordering
    auto rescore = [](const std::vector<PersonaSentence>& candidates) {
        std::vector<double> scores;
        for (const auto& p : candidates)
            scores.push_back(p.text == "候选2" ? 0.95 : (p.text == "候选3" ? 0.85 : 0.3));
        return scores;
    };
    auto result = store.read_rescored(axis_query(dim), rescore);
    REQUIRE(result.hits.size() == 2);  // top_k after rescoring, then filter at 0.5
    CHECK(result.hits[0].persona.text == "候选2");
    CHECK(result.hits[0].score == doctest::Approx(0.95));
    CHECK(result.hits[1].persona.text == "候选3");

    // a rescorer that sinks everything below s_c leaves nothing
    auto sink = [](const std::vector<PersonaSentence>& candidates) {
        return std::vector<double>(candidates.size(), 0.1);
    };
    CHECK(store.read_rescored(axis_query(dim), sink).hits.empty());
}

TEST_CASE("dedup idempotence and pairwise-separation invariant") {
    HashingEncoder enc(256);
    MemoryStore store(Speaker::User, small_cfg());

    // duplicated texts collapse
    auto texts = testutil::random_sentences(60, 61, 8, 16);
    int tag = 0;
    for (const auto& t : texts) {
        store.write(user_persona(t, tag++), enc);
        store.write(user_persona(t, tag++), enc);  // immediate duplicate
    }
    CHECK(store.size() <= texts.size());

    // post-hoc full pairwise scan: no two residents at or above s_dup
    auto entries = store.entries();
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j)
            CHECK(cosine(entries[i].embedding, entries[j].embedding) < 0.95);
}

TEST_CASE("capacity limit evicts the oldest entry") {
    const std::size_t dim = 8;
    EngineConfig cfg = small_cfg(dim);
    cfg.capacity_limit = 3;
    MemoryStore store(Speaker::User, cfg);

    store.write(user_persona("第零", 0), scored_entry(0.0, 0, dim));
    store.write(user_persona("第一", 1), scored_entry(0.3, 1, dim));
    store.write(user_persona("第二", 2), scored_entry(0.6, 2, dim));
    CHECK(store.size() == 3);
    store.write(user_persona("第三", 3), scored_entry(-0.5, 3, dim));
    CHECK(store.size() == 3);

    bool oldest_gone = true;
    for (const auto& e : store.entries())
        if (e.persona.text == "第零") oldest_gone = false;
    CHECK(oldest_gone);
}

TEST_CASE("unlimited capacity: 100000 dissimilar writes all stay resident") {
    // Random unit vectors at dim 256 are pairwise far below s_dup, so
    // every write must insert. IVF keeps the dedup scan sublinear.
    EngineConfig cfg = small_cfg(256);
    cfg.index_backend = IndexBackend::Ivf;
    cfg.ivf_nlist = 320;
    cfg.ivf_nprobe = 2;
    MemoryStore store(Speaker::User, cfg);

    std::mt19937_64 rng(71);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<float> v(256);
        for (auto& x : v) x = gauss(rng);
        PersonaSentence p;
        p.owner = Speaker::User;
        p.text = "合成句" + std::to_string(i);
        p.id = "cap" + std::to_string(i);
        p.session_id = "cap";
        auto outcome = store.write(p, make_embedding(std::move(v)));
        REQUIRE(outcome.kind == WriteKind::Inserted);
    }
    CHECK(store.size() == n);
}

TEST_CASE("revert undoes inserts and replacements") {
    HashingEncoder enc(256);
    MemoryStore store(Speaker::User, small_cfg());
    auto p1 = user_persona("我在学校教书", 1);
    store.write(p1, enc);

    SUBCASE("insert rollback") {
        auto [outcome, receipt] =
            store.write_with_receipt(user_persona("我周末去爬山", 2),
                                     enc.embed_text("我周末去爬山"));
        CHECK(outcome.kind == WriteKind::Inserted);
        CHECK(store.size() == 2);
        store.revert(receipt);
        CHECK(store.size() == 1);
        CHECK(store.entries()[0].persona.id == p1.id);
    }

    SUBCASE("replace rollback") {
        auto [outcome, receipt] =
            store.write_with_receipt(user_persona("我在学校教书", 3),
                                     enc.embed_text("我在学校教书"));
        CHECK(outcome.kind == WriteKind::Replaced);
        store.revert(receipt);
        auto entries = store.entries();
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].persona.id == p1.id);
        CHECK(entries[0].replaced_count == 0);
        CHECK(entries[0].written_at == 1);
    }
}

TEST_CASE("snapshot and restore reproduce read behavior") {
    testutil::TempDir dir;
    HashingEncoder enc(256);
    EngineConfig cfg = small_cfg();
    cfg.sim_threshold = -1.0;
    MemoryStore store(Speaker::User, cfg, "hashing-256");

    auto sentences = testutil::random_sentences(100, 81, 6, 16);
    for (std::size_t i = 0; i < sentences.size(); ++i)
        store.write(user_persona(sentences[i] + std::to_string(i), static_cast<int>(i)), enc);
    // exercise replacement before snapshotting
    store.write(user_persona(sentences[0] + "0", 999), enc);

    store.snapshot(dir.file("user.mem"));
    auto restored = MemoryStore::restore(dir.file("user.mem"), cfg);
    CHECK(restored->owner() == Speaker::User);
    CHECK(restored->size() == store.size());
    CHECK(restored->encoder_id() == "hashing-256");

    auto probes = testutil::random_sentences(20, 83, 4, 20);
    for (const auto& probe : probes) {
        Embedding q = enc.embed_text(probe);
        auto a = store.read(q);
        auto b = restored->read(q);
        REQUIRE(a.hits.size() == b.hits.size());
        for (std::size_t i = 0; i < a.hits.size(); ++i) {
            CHECK(a.hits[i].persona.id == b.hits[i].persona.id);
            CHECK(a.hits[i].score == b.hits[i].score);
        }
    }

    SUBCASE("empty store round-trips") {
        MemoryStore empty(Speaker::Bot, cfg);
        empty.snapshot(dir.file("bot.mem"));
        auto back = MemoryStore::restore(dir.file("bot.mem"), cfg);
        CHECK(back->size() == 0);
        CHECK(back->owner() == Speaker::Bot);
    }

    SUBCASE("dimension mismatch is refused") {
        EngineConfig other = small_cfg(128);
        CHECK_THROWS_AS(MemoryStore::restore(dir.file("user.mem"), other), IoError);
    }

    SUBCASE("garbage file is refused") {
        testutil::write_file(dir.file("junk.mem"), "definitely not a snapshot");
        CHECK_THROWS_AS(MemoryStore::restore(dir.file("junk.mem"), cfg), IoError);
    }
}

TEST_CASE("WAL commits turns atomically") {
    testutil::TempDir dir;
    std::string wal_path = dir.file("wal.log");

    {
        WalWriter wal(wal_path);
        wal.append_write(Speaker::User, user_persona("我是护士", 1));
        wal.commit(1);
        wal.append_write(Speaker::User, user_persona("我爱滑雪", 2));
        wal.append_write(Speaker::Bot, make_seeded_persona(Speaker::Bot, "我是机器人", "mem", 3));
        wal.commit(2);
        // in-flight turn without commit: must be dropped on replay
        wal.append_write(Speaker::User, user_persona("没提交的", 4));
    }

    auto turns = replay_wal(wal_path);
    REQUIRE(turns.size() == 2);
    CHECK(turns[0].turn_id == 1);
    CHECK(turns[0].writes.size() == 1);
    CHECK(turns[1].writes.size() == 2);
    CHECK(turns[1].writes[1].first == Speaker::Bot);

    SUBCASE("torn tail stops replay cleanly") {
        std::string raw = testutil::read_file(wal_path);
        testutil::write_file(wal_path, raw.substr(0, raw.size() - 7));  // cut mid-record
        auto again = replay_wal(wal_path);
        CHECK(again.size() == 2);
    }

    SUBCASE("missing file reads as empty") {
        CHECK(replay_wal(dir.file("absent.log")).empty());
    }

    SUBCASE("reset truncates") {
        WalWriter wal(wal_path);
        wal.reset();
        CHECK(replay_wal(wal_path).empty());
    }
}

TEST_CASE("concurrent readers while writing") {
    HashingEncoder enc(128);
    EngineConfig cfg = small_cfg(128);
    cfg.sim_threshold = -1.0;
    MemoryStore store(Speaker::User, cfg);

    std::atomic<bool> done{false};
    std::atomic<int> read_errors{0};
    auto reader = [&]() {
        Embedding q = enc.embed_text("查询语句");
        while (!done.load()) {
            auto r = store.read(q);
            if (r.hits.size() > 5) read_errors.fetch_add(1);
            for (std::size_t i = 0; i + 1 < r.hits.size(); ++i)
                if (r.hits[i].score < r.hits[i + 1].score) read_errors.fetch_add(1);
        }
    };
    std::thread t1(reader), t2(reader);
    auto sentences = testutil::random_sentences(300, 91, 6, 14);
    for (std::size_t i = 0; i < sentences.size(); ++i)
        store.write(user_persona(sentences[i] + std::to_string(i), static_cast<int>(i)), enc);
    done.store(true);
    t1.join();
    t2.join();
    CHECK(read_errors.load() == 0);
    CHECK(store.size() > 0);
}
