#include "ltm/memory/index.hpp"

#include <algorithm>
#include <cmath>

namespace ltm {

namespace {

void sort_and_clip(std::vector<IndexHit>& hits, std::size_t k) {
    std::sort(hits.begin(), hits.end(), [](const IndexHit& a, const IndexHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (hits.size() > k) hits.resize(k);
}

}  // namespace

// ─── ExhaustiveIndex ───────────────────────────────────────────

void ExhaustiveIndex::add(std::uint64_t id, const Embedding& embedding) {
    if (slots_.count(id)) throw InvalidArgument("index: duplicate id");
    slots_[id] = entries_.size();
    entries_.emplace_back(id, embedding);
}

void ExhaustiveIndex::update(std::uint64_t id, const Embedding& embedding) {
    auto it = slots_.find(id);
    if (it == slots_.end()) throw InvalidArgument("index: unknown id");
    entries_[it->second].second = embedding;
}

void ExhaustiveIndex::remove(std::uint64_t id) {
    auto it = slots_.find(id);
    if (it == slots_.end()) throw InvalidArgument("index: unknown id");
    std::size_t slot = it->second;
    slots_.erase(it);
    if (slot + 1 != entries_.size()) {
        entries_[slot] = std::move(entries_.back());
        slots_[entries_[slot].first] = slot;
    }
    entries_.pop_back();
}

std::vector<IndexHit> ExhaustiveIndex::search(const Embedding& query, std::size_t k) const {
    std::vector<IndexHit> hits;
    hits.reserve(entries_.size());
    for (const auto& [id, emb] : entries_)
        hits.push_back({id, cosine(query, emb)});
    sort_and_clip(hits, k);
    return hits;
}

// ─── IvfIndex ──────────────────────────────────────────────────

IvfIndex::IvfIndex(std::size_t nlist, std::size_t nprobe, std::size_t refine_cap)
    : nlist_(nlist), nprobe_(nprobe), refine_cap_(refine_cap) {
    if (nlist == 0 || nprobe == 0)
        throw InvalidArgument("IvfIndex: nlist and nprobe must be positive");
}

std::size_t IvfIndex::nearest_cell(const Embedding& embedding) const {
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        double s = cosine(embedding, cells_[c].centroid);
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return best;
}

void IvfIndex::refine() {
    const std::size_t dim = cells_.front().centroid.dim();

    for (std::size_t iter = 0; iter < 2; ++iter) {
        // centroids <- mean of current members (empty cells keep theirs)
        for (auto& cell : cells_) {
            if (cell.members.empty()) continue;
            std::vector<float> mean(dim, 0.0f);
            for (const auto& [id, emb] : cell.members)
                for (std::size_t d = 0; d < dim; ++d) mean[d] += emb.values[d];
            const float inv = 1.0f / static_cast<float>(cell.members.size());
            for (auto& v : mean) v *= inv;
            Embedding e = make_embedding(std::move(mean));
            if (e.norm > 0.0) cell.centroid = std::move(e);
        }

        // reassign every member to its now-nearest cell
        std::vector<std::vector<std::pair<std::uint64_t, Embedding>>> next(cells_.size());
        for (auto& cell : cells_) {
            for (auto& member : cell.members)
                next[nearest_cell(member.second)].push_back(std::move(member));
            cell.members.clear();
        }
        for (std::size_t c = 0; c < cells_.size(); ++c) {
            cells_[c].members = std::move(next[c]);
            for (const auto& [id, emb] : cells_[c].members) cell_of_[id] = c;
        }
    }
    last_refine_size_ = count_;
}

void IvfIndex::add(std::uint64_t id, const Embedding& embedding) {
    if (cell_of_.count(id)) throw InvalidArgument("index: duplicate id");
    std::size_t cell;
    if (cells_.size() < nlist_) {
        cell = cells_.size();
        cells_.push_back(Cell{embedding, {}});
    } else {
        cell = nearest_cell(embedding);
    }
    cells_[cell].members.emplace_back(id, embedding);
    cell_of_[id] = cell;
    ++count_;

    if (count_ <= refine_cap_ && count_ >= nlist_ * 4 &&
        count_ >= 2 * std::max<std::size_t>(last_refine_size_, nlist_ * 2))
        refine();
}

void IvfIndex::update(std::uint64_t id, const Embedding& embedding) {
    auto it = cell_of_.find(id);
    if (it == cell_of_.end()) throw InvalidArgument("index: unknown id");
    auto& members = cells_[it->second].members;
    auto pos = std::find_if(members.begin(), members.end(),
                            [&](const auto& m) { return m.first == id; });
    if (pos != members.end()) {
        *pos = std::move(members.back());
        members.pop_back();
    }
    std::size_t cell = nearest_cell(embedding);
    cells_[cell].members.emplace_back(id, embedding);
    it->second = cell;
}

void IvfIndex::remove(std::uint64_t id) {
    auto it = cell_of_.find(id);
    if (it == cell_of_.end()) throw InvalidArgument("index: unknown id");
    auto& members = cells_[it->second].members;
    auto pos = std::find_if(members.begin(), members.end(),
                            [&](const auto& m) { return m.first == id; });
    if (pos != members.end()) {
        *pos = std::move(members.back());
        members.pop_back();
    }
    cell_of_.erase(it);
    --count_;
}

std::vector<IndexHit> IvfIndex::search(const Embedding& query, std::size_t k) const {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c)
        ranked.emplace_back(cosine(query, cells_[c].centroid), c);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<IndexHit> hits;
    std::size_t probes = std::min(nprobe_, ranked.size());
    for (std::size_t p = 0; p < probes; ++p) {
        for (const auto& [id, emb] : cells_[ranked[p].second].members)
            hits.push_back({id, cosine(query, emb)});
    }
    sort_and_clip(hits, k);
    return hits;
}

std::unique_ptr<VectorIndex> make_index(IndexBackend backend, const EngineConfig& cfg) {
    if (backend == IndexBackend::Exhaustive) return std::make_unique<ExhaustiveIndex>();
    return std::make_unique<IvfIndex>(cfg.ivf_nlist, cfg.ivf_nprobe);
}

}  // namespace ltm
