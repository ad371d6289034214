#include "ltm/encoder/embedding.hpp"

#include <cmath>

namespace ltm {

Embedding make_embedding(std::vector<float> values) {
    Embedding e;
    e.values = std::move(values);
    double sq = 0.0;
    for (float v : e.values) sq += static_cast<double>(v) * static_cast<double>(v);
    e.norm = std::sqrt(sq);
    return e;
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim())
        throw InvalidArgument("cosine: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()) + ")");
    if (a.norm <= 0.0 || b.norm <= 0.0)
        throw InvalidArgument("cosine: zero-norm vector");
    double dot = 0.0;
    const float* pa = a.values.data();
    const float* pb = b.values.data();
    for (std::size_t i = 0; i < a.values.size(); ++i)
        dot += static_cast<double>(pa[i]) * static_cast<double>(pb[i]);
    return dot / (a.norm * b.norm);
}

double triplet_hinge(double sim_pos, double sim_neg, double alpha, LossOrientation orientation) {
    if (alpha < 0.0) throw InvalidArgument("triplet_hinge: alpha must be >= 0");
    double margin = orientation == LossOrientation::Canonical ? sim_neg - sim_pos + alpha
                                                              : sim_pos - sim_neg + alpha;
    return margin > 0.0 ? margin : 0.0;
}

}  // namespace ltm
