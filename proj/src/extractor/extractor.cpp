#include "ltm/extractor/extractor.hpp"

#include "ltm/core/unicode.hpp"

namespace ltm {

ClassifierVerdict classify_clause(const Clause& clause, ClassifierPort& classifier) {
    return classifier.classify_one(clause.text);
}

std::vector<PersonaSentence> extract_personas(const Utterance& utterance,
                                              ClassifierPort& classifier,
                                              std::string_view session_id) {
    std::vector<PersonaSentence> out;
    if (trim(utterance.text).empty()) return out;

    auto clauses = segment_clauses(utterance);
    if (clauses.empty()) return out;

    std::vector<std::string> texts;
    texts.reserve(clauses.size());
    for (const auto& c : clauses) texts.push_back(c.text);
    auto verdicts = classifier.classify(texts);

    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (verdicts[i].label != PersonaLabel::Persona) continue;
        std::string_view trimmed = trim(clauses[i].text);
        if (trimmed.empty()) continue;
        PersonaSentence p;
        p.owner = utterance.speaker;
        p.text = std::string(trimmed);
        p.source = PersonaSource::Extracted;
        p.created_at_turn = static_cast<std::int64_t>(utterance.turn_index);
        p.session_id = std::string(session_id);
        p.id = persona_id(p.owner, session_id, p.created_at_turn, clauses[i].span_start, p.text);
        out.push_back(std::move(p));
    }
    return out;
}

bool aggregate_votes(const std::vector<bool>& votes) {
    if (votes.size() != 5)
        throw InvalidArgument("aggregate_votes: expected exactly 5 votes, got " +
                              std::to_string(votes.size()));
    int positives = 0;
    for (bool v : votes) positives += v ? 1 : 0;
    return positives >= 2;
}

ClassifierMetrics evaluate_classifier(const std::vector<bool>& predictions,
                                      const std::vector<bool>& gold) {
    if (predictions.empty() || gold.empty())
        throw InvalidArgument("evaluate_classifier: empty inputs");
    if (predictions.size() != gold.size())
        throw InvalidArgument("evaluate_classifier: length mismatch");

    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] && gold[i]) ++tp;
        else if (predictions[i] && !gold[i]) ++fp;
        else if (!predictions[i] && gold[i]) ++fn;
        else ++tn;
    }

    ClassifierMetrics m;
    const double n = static_cast<double>(predictions.size());
    m.accuracy = static_cast<double>(tp + tn) / n;
    m.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

}  // namespace ltm
