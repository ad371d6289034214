#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "ltm/core/config.hpp"
#include "ltm/core/types.hpp"
#include "ltm/encoder/encoder.hpp"
#include "ltm/memory/index.hpp"

namespace ltm {

// One resident persona. The embedding is whatever the engine's active
// persona encoder produced at write time; written_at is a per-store
// monotonic sequence refreshed on replacement.
struct MemoryEntry {
    PersonaSentence persona;
    Embedding embedding;
    std::uint64_t written_at = 0;
    std::uint32_t replaced_count = 0;
};

enum class WriteKind { Inserted, Replaced };

struct WriteOutcome {
    WriteKind kind = WriteKind::Inserted;
    std::string replaced_id;  // id of the persona that was overwritten
};

// Everything needed to undo one write, so a failed turn leaves the
// store untouched. Receipts must be reverted in reverse write order.
struct WriteReceipt {
    WriteKind kind = WriteKind::Inserted;
    std::uint64_t slot = 0;
    std::uint64_t prev_next_seq = 0;
    std::optional<MemoryEntry> previous;  // replaced entry, for restore
    std::optional<MemoryEntry> evicted;   // capacity eviction, if any
    std::uint64_t evicted_slot = 0;
};

struct ReadHit {
    PersonaSentence persona;
    double score = 0.0;
};

struct ReadResult {
    std::vector<ReadHit> hits;  // scores non-increasing, all >= sim_threshold
    std::string query_id;
};

// Per-speaker long-term persona memory: dedup-on-write, thresholded
// top-k read, pluggable index backend. Many concurrent readers, one
// writer; every write is atomic from a reader's point of view.
class MemoryStore {
public:
    MemoryStore(Speaker owner, const EngineConfig& cfg, std::string encoder_id = "hashing");

    Speaker owner() const { return owner_; }
    const std::string& encoder_id() const { return encoder_id_; }
    std::size_t size() const;

    /// Write with a precomputed embedding. Replaces the most similar
    /// resident entry when its cosine reaches dup_threshold (earliest
    /// written on ties), otherwise inserts.
    WriteOutcome write(const PersonaSentence& persona, const Embedding& embedding);
    std::pair<WriteOutcome, WriteReceipt> write_with_receipt(const PersonaSentence& persona,
                                                             const Embedding& embedding);
    WriteOutcome write(const PersonaSentence& persona, EncoderPort& encoder);

    /// Undo a write; call in reverse order of the receipts.
    void revert(const WriteReceipt& receipt);

    /// Top-k by cosine against the query embedding, then drop hits
    /// scoring below sim_threshold. Empty store yields empty hits.
    ReadResult read(const Embedding& query) const;
    ReadResult read(const DialogueContext& context, EncoderPort& encoder) const;

    /// Two-step read: coarse candidates from cached embeddings, exact
    /// scores from a separate matching model.
    using Rescorer = std::function<std::vector<double>(const std::vector<PersonaSentence>&)>;
    ReadResult read_rescored(const Embedding& coarse_query, const Rescorer& rescore) const;

    /// Alive entries in slot order.
    std::vector<MemoryEntry> entries() const;

    void clear();

    void snapshot(const std::string& path) const;
    static std::unique_ptr<MemoryStore> restore(const std::string& path, const EngineConfig& cfg);

private:
    struct Slot {
        MemoryEntry entry;
        bool alive = true;
    };

    WriteOutcome write_locked(const PersonaSentence& persona, const Embedding& embedding,
                              WriteReceipt& receipt);
    ReadResult finish_read(std::vector<IndexHit> hits) const;

    Speaker owner_;
    EngineConfig cfg_;
    std::string encoder_id_;
    std::vector<Slot> slots_;
    std::unique_ptr<VectorIndex> index_;
    std::uint64_t next_seq_ = 1;
    std::size_t alive_count_ = 0;
    mutable std::atomic<std::uint64_t> query_counter_{0};
    mutable std::shared_mutex mutex_;
};

/// The same context against both memories; user hits first.
std::pair<ReadResult, ReadResult> read_both(const MemoryStore& user_store,
                                            const MemoryStore& bot_store,
                                            const DialogueContext& context,
                                            EncoderPort& context_encoder,
                                            std::size_t context_window = 384);

}  // namespace ltm
