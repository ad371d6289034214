#pragma once

#include <string>
#include <vector>

#include "ltm/extractor/classifier.hpp"
#include "ltm/extractor/clause.hpp"

namespace ltm {

/// Single-clause classification through any backend.
ClassifierVerdict classify_clause(const Clause& clause, ClassifierPort& classifier);

/// Segment an utterance, classify each clause, and keep the positives as
/// persona sentences owned by the utterance's speaker, in clause order.
std::vector<PersonaSentence> extract_personas(const Utterance& utterance,
                                              ClassifierPort& classifier,
                                              std::string_view session_id = "");

/// Ensemble rule over exactly five binary votes: positive iff at least
/// two models voted positive.
bool aggregate_votes(const std::vector<bool>& votes);

struct ClassifierMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Binary classification metrics; undefined ratios are 0 by convention.
ClassifierMetrics evaluate_classifier(const std::vector<bool>& predictions,
                                      const std::vector<bool>& gold);

}  // namespace ltm
