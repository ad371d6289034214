#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ltm/core/errors.hpp"

namespace ltm {

enum class PersonaLabel { Persona, NotPersona };

struct ClassifierVerdict {
    PersonaLabel label = PersonaLabel::NotPersona;
    double confidence = 1.0;  // in [0,1], defined for rule-based backends too
};

// Pluggable persona/not-persona classifier. Batched call mirrors the
// wire protocol: { "texts": [...] } -> { "labels": [...], "confidences": [...] }.
class ClassifierPort {
public:
    virtual ~ClassifierPort() = default;
    virtual std::vector<ClassifierVerdict> classify(const std::vector<std::string>& texts) = 0;

    ClassifierVerdict classify_one(const std::string& text) {
        return classify(std::vector<std::string>{text}).front();
    }
};

// Deterministic pattern classifier: first-person pronoun plus a
// copula / preference / occupation cue. Keeps the whole pipeline
// testable without model weights.
class LexiconClassifier : public ClassifierPort {
public:
    std::vector<ClassifierVerdict> classify(const std::vector<std::string>& texts) override;
};

// Fixed-label stub. The constant-positive variant stores every clause,
// which is how the memory behaves with the extractor disabled.
class ConstantClassifier : public ClassifierPort {
public:
    explicit ConstantClassifier(PersonaLabel label = PersonaLabel::Persona) : label_(label) {}
    std::vector<ClassifierVerdict> classify(const std::vector<std::string>& texts) override;

private:
    PersonaLabel label_;
};

// HTTP/JSON client for a remote classifier service. POSTs to
// <base_url>/classify; transport failures raise retriable BackendError.
class RemoteClassifier : public ClassifierPort {
public:
    explicit RemoteClassifier(std::string base_url, int timeout_seconds = 5);
    std::vector<ClassifierVerdict> classify(const std::vector<std::string>& texts) override;

private:
    std::string base_url_;
    int timeout_seconds_;
};

}  // namespace ltm
