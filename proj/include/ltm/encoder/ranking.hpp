#pragma once

#include <vector>

#include "ltm/core/corpus.hpp"
#include "ltm/encoder/encoder.hpp"

namespace ltm {

// One retrieval-evaluation instance mined from an annotated dialogue:
// the context before a bot response, the personas that response (and the
// user's utterance) actually grounded in, and the session's remaining
// personas as negatives.
struct RankingExample {
    DialogueContext context;
    std::vector<PersonaSentence> positives;
    std::vector<PersonaSentence> negatives;
};

/// Mine examples from grounding annotations. Personas visible to the
/// system (bot personas plus user personas seen by the bot) form the
/// candidate pool; dialogues without annotations yield nothing.
std::vector<RankingExample> mine_ranking_examples(const CorpusDialogue& dialogue);

struct RankerMetrics {
    double auc = 0.0;
    double recall_at_1 = 0.0;
    double recall_at_5 = 0.0;
    std::size_t n_examples = 0;
};

/// Score candidates with cosine(E_c(context), E_rho(persona)). AUC is the
/// Mann-Whitney statistic over within-example (positive, negative) pairs
/// pooled across examples, ties credited 0.5; recall@k is the fraction of
/// examples whose top-k contains a positive.
RankerMetrics evaluate_ranker(const std::vector<RankingExample>& examples,
                              const EncoderPair& encoders, std::size_t context_window = 384);

}  // namespace ltm
