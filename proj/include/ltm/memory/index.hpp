#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "ltm/core/config.hpp"
#include "ltm/encoder/embedding.hpp"

namespace ltm {

struct IndexHit {
    std::uint64_t id = 0;
    double score = 0.0;
};

// Dense-vector search over entry embeddings, keyed by stable entry ids.
// Hits come back sorted by (score desc, id asc).
class VectorIndex {
public:
    virtual ~VectorIndex() = default;
    virtual void add(std::uint64_t id, const Embedding& embedding) = 0;
    virtual void update(std::uint64_t id, const Embedding& embedding) = 0;
    virtual void remove(std::uint64_t id) = 0;
    virtual std::vector<IndexHit> search(const Embedding& query, std::size_t k) const = 0;
    virtual std::size_t size() const = 0;
};

// Exact brute-force scan. The default backend and the oracle the ANN
// backend is measured against.
class ExhaustiveIndex : public VectorIndex {
public:
    void add(std::uint64_t id, const Embedding& embedding) override;
    void update(std::uint64_t id, const Embedding& embedding) override;
    void remove(std::uint64_t id) override;
    std::vector<IndexHit> search(const Embedding& query, std::size_t k) const override;
    std::size_t size() const override { return entries_.size(); }

private:
    std::vector<std::pair<std::uint64_t, Embedding>> entries_;
    std::unordered_map<std::uint64_t, std::size_t> slots_;
};

// Inverted-file ANN. The first nlist inserted vectors seed the coarse
// centroids; each vector joins the list of its nearest centroid and a
// query probes the nprobe closest lists. Centroids are re-fit with a
// couple of Lloyd iterations at size doublings while the index is
// small; past refine_cap they freeze and inserts stay O(nlist + list).
class IvfIndex : public VectorIndex {
public:
    IvfIndex(std::size_t nlist = 64, std::size_t nprobe = 40,
             std::size_t refine_cap = 20000);
    void add(std::uint64_t id, const Embedding& embedding) override;
    void update(std::uint64_t id, const Embedding& embedding) override;
    void remove(std::uint64_t id) override;
    std::vector<IndexHit> search(const Embedding& query, std::size_t k) const override;
    std::size_t size() const override { return count_; }

private:
    struct Cell {
        Embedding centroid;
        std::vector<std::pair<std::uint64_t, Embedding>> members;
    };
    std::size_t nearest_cell(const Embedding& embedding) const;
    void refine();

    std::size_t nlist_;
    std::size_t nprobe_;
    std::size_t refine_cap_;
    std::size_t last_refine_size_ = 0;
    std::vector<Cell> cells_;
    std::unordered_map<std::uint64_t, std::size_t> cell_of_;
    std::size_t count_ = 0;
};

std::unique_ptr<VectorIndex> make_index(IndexBackend backend, const EngineConfig& cfg);

}  // namespace ltm
