#pragma once

#include <cstddef>
#include <vector>

#include "ltm/core/config.hpp"
#include "ltm/core/errors.hpp"

namespace ltm {

// Dense vector plus its cached Euclidean norm. Dimension is fixed per
// engine instance; the reference encoder emits unit-norm vectors.
struct Embedding {
    std::vector<float> values;
    double norm = 0.0;

    std::size_t dim() const { return values.size(); }
};

/// Build an embedding, computing and caching the norm.
Embedding make_embedding(std::vector<float> values);

/// cos(a,b) = <a,b> / (|a||b|). Throws on dimension mismatch or a
/// zero-norm operand.
double cosine(const Embedding& a, const Embedding& b);

/// Retrieval margin penalty: max(sim_neg - sim_pos + alpha, 0) in the
/// canonical orientation, which rewards positives scoring above
/// negatives. AsPrinted flips the operands for side-by-side comparison
/// with the published form.
double triplet_hinge(double sim_pos, double sim_neg, double alpha,
                     LossOrientation orientation = LossOrientation::Canonical);

}  // namespace ltm
