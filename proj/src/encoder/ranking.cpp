#include "ltm/encoder/ranking.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace ltm {

namespace {

PersonaSentence declared_to_persona(const DeclaredPersona& dp, Speaker owner,
                                    const std::string& dialogue_id) {
    PersonaSentence p;
    p.id = dp.id;
    p.owner = owner;
    p.text = dp.text;
    p.source = PersonaSource::Seeded;
    p.created_at_turn = -1;
    p.session_id = dialogue_id;
    return p;
}

}  // namespace

std::vector<RankingExample> mine_ranking_examples(const CorpusDialogue& dialogue) {
    std::vector<RankingExample> out;

    // Candidate pool: what the system can retrieve for this session.
    std::unordered_map<std::string, PersonaSentence> pool;
    for (const auto& dp : dialogue.bot_personas)
        pool.emplace(dp.id, declared_to_persona(dp, Speaker::Bot, dialogue.dialogue_id));
    for (const auto& dp : dialogue.user_personas_seen)
        pool.emplace(dp.id, declared_to_persona(dp, Speaker::User, dialogue.dialogue_id));
    if (pool.empty()) return out;

    for (std::size_t t = 0; t < dialogue.turns.size(); ++t) {
        const CorpusTurn& turn = dialogue.turns[t];
        if (turn.speaker != Speaker::Bot || t == 0) continue;

        // Positives: personas grounded by this response and by the user
        // utterance it answers.
        std::unordered_set<std::string> positive_ids;
        for (const auto& id : turn.grounded_persona_ids)
            if (pool.count(id)) positive_ids.insert(id);
        const CorpusTurn& prev = dialogue.turns[t - 1];
        if (prev.speaker == Speaker::User)
            for (const auto& id : prev.grounded_persona_ids)
                if (pool.count(id)) positive_ids.insert(id);
        if (positive_ids.empty()) continue;

        RankingExample ex;
        ex.context.session_id = dialogue.dialogue_id;
        for (std::size_t k = 0; k < t; ++k)
            ex.context.append(make_utterance(dialogue.turns[k].speaker, dialogue.turns[k].text, k));
        if (ex.context.empty()) continue;

        // Keep declaration order so mining is deterministic.
        for (const auto& dp : dialogue.bot_personas) {
            if (positive_ids.count(dp.id)) ex.positives.push_back(pool.at(dp.id));
            else ex.negatives.push_back(pool.at(dp.id));
        }
        for (const auto& dp : dialogue.user_personas_seen) {
            if (positive_ids.count(dp.id)) ex.positives.push_back(pool.at(dp.id));
            else ex.negatives.push_back(pool.at(dp.id));
        }
        out.push_back(std::move(ex));
    }
    return out;
}

RankerMetrics evaluate_ranker(const std::vector<RankingExample>& examples,
                              const EncoderPair& encoders, std::size_t context_window) {
    if (examples.empty())
        throw InvalidArgument("evaluate_ranker: no examples");
    if (!encoders.context || !encoders.persona)
        throw InvalidArgument("evaluate_ranker: encoder slots not configured");

    double pair_wins = 0.0;
    std::size_t pair_count = 0;
    std::size_t hit_at_1 = 0, hit_at_5 = 0;

    for (const auto& ex : examples) {
        if (ex.positives.empty() || ex.negatives.empty())
            throw InvalidArgument("evaluate_ranker: example needs >=1 positive and >=1 negative");

        Embedding query = embed_context(ex.context, *encoders.context, context_window);
        auto score_all = [&](const std::vector<PersonaSentence>& ps) {
            std::vector<double> s;
            s.reserve(ps.size());
            for (const auto& p : ps) s.push_back(cosine(query, embed_persona(p, *encoders.persona)));
            return s;
        };
        std::vector<double> pos = score_all(ex.positives);
        std::vector<double> neg = score_all(ex.negatives);

        for (double sp : pos) {
            for (double sn : neg) {
                if (sp > sn) pair_wins += 1.0;
                else if (sp == sn) pair_wins += 0.5;
                ++pair_count;
            }
        }

        // Rank all candidates, positives listed first so stable sort keeps
        // them ahead on exact ties.
        std::vector<std::pair<double, bool>> ranked;
        for (double s : pos) ranked.emplace_back(s, true);
        for (double s : neg) ranked.emplace_back(s, false);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        auto hit_in_top = [&](std::size_t k) {
            for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i)
                if (ranked[i].second) return true;
            return false;
        };
        if (hit_in_top(1)) ++hit_at_1;
        if (hit_in_top(5)) ++hit_at_5;
    }

    RankerMetrics m;
    m.n_examples = examples.size();
    m.auc = pair_wins / static_cast<double>(pair_count);
    m.recall_at_1 = static_cast<double>(hit_at_1) / static_cast<double>(examples.size());
    m.recall_at_5 = static_cast<double>(hit_at_5) / static_cast<double>(examples.size());
    return m;
}

}  // namespace ltm
