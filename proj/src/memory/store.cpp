#include "ltm/memory/store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "ltm/core/json_io.hpp"

namespace ltm {

using nlohmann::json;

MemoryStore::MemoryStore(Speaker owner, const EngineConfig& cfg, std::string encoder_id)
    : owner_(owner), cfg_(cfg), encoder_id_(std::move(encoder_id)),
      index_(make_index(cfg.index_backend, cfg)) {
    cfg_.validate();
}

std::size_t MemoryStore::size() const {
    std::shared_lock lock(mutex_);
    return alive_count_;
}

WriteOutcome MemoryStore::write(const PersonaSentence& persona, const Embedding& embedding) {
    return write_with_receipt(persona, embedding).first;
}

std::pair<WriteOutcome, WriteReceipt> MemoryStore::write_with_receipt(
    const PersonaSentence& persona, const Embedding& embedding) {
    std::unique_lock lock(mutex_);
    WriteReceipt receipt;
    WriteOutcome outcome = write_locked(persona, embedding, receipt);
    return {outcome, receipt};
}

WriteOutcome MemoryStore::write(const PersonaSentence& persona, EncoderPort& encoder) {
    return write(persona, embed_persona(persona, encoder));
}

WriteOutcome MemoryStore::write_locked(const PersonaSentence& persona, const Embedding& embedding,
                                       WriteReceipt& receipt) {
    if (persona.owner != owner_)
        throw InvalidArgument("memory write: persona owner does not match store owner");
    if (embedding.dim() != cfg_.embedding_dim)
        throw InvalidArgument("memory write: embedding dimension mismatch");

    receipt.prev_next_seq = next_seq_;

    // Nearest resident entry; a small tie window so equal-similarity
    // duplicates resolve to the earliest-written one.
    if (alive_count_ > 0) {
        auto hits = index_->search(embedding, 8);
        if (!hits.empty() && hits.front().score >= cfg_.dup_threshold) {
            std::uint64_t target = hits.front().id;
            for (const auto& h : hits) {
                if (h.score != hits.front().score) break;
                if (slots_[h.id].entry.written_at < slots_[target].entry.written_at)
                    target = h.id;
            }
            Slot& slot = slots_[target];
            receipt.kind = WriteKind::Replaced;
            receipt.slot = target;
            receipt.previous = slot.entry;

            WriteOutcome outcome;
            outcome.kind = WriteKind::Replaced;
            outcome.replaced_id = slot.entry.persona.id;

            slot.entry.persona = persona;
            slot.entry.embedding = embedding;
            slot.entry.written_at = next_seq_++;
            slot.entry.replaced_count += 1;
            index_->update(target, embedding);
            return outcome;
        }
    }

    // Insert; bounded stores drop their oldest entry first.
    if (cfg_.capacity_limit && alive_count_ >= *cfg_.capacity_limit) {
        std::size_t oldest = slots_.size();
        for (std::size_t s = 0; s < slots_.size(); ++s) {
            if (!slots_[s].alive) continue;
            if (oldest == slots_.size() ||
                slots_[s].entry.written_at < slots_[oldest].entry.written_at)
                oldest = s;
        }
        receipt.evicted = slots_[oldest].entry;
        receipt.evicted_slot = oldest;
        slots_[oldest].alive = false;
        index_->remove(oldest);
        --alive_count_;
    }

    receipt.kind = WriteKind::Inserted;
    receipt.slot = slots_.size();

    Slot slot;
    slot.entry.persona = persona;
    slot.entry.embedding = embedding;
    slot.entry.written_at = next_seq_++;
    slot.entry.replaced_count = 0;
    slots_.push_back(std::move(slot));
    index_->add(receipt.slot, embedding);
    ++alive_count_;
    return WriteOutcome{WriteKind::Inserted, ""};
}

void MemoryStore::revert(const WriteReceipt& receipt) {
    std::unique_lock lock(mutex_);
    if (receipt.kind == WriteKind::Replaced) {
        Slot& slot = slots_.at(receipt.slot);
        slot.entry = *receipt.previous;
        index_->update(receipt.slot, slot.entry.embedding);
    } else {
        index_->remove(receipt.slot);
        if (receipt.slot + 1 == slots_.size())
            slots_.pop_back();
        else
            slots_.at(receipt.slot).alive = false;
        --alive_count_;
        if (receipt.evicted) {
            Slot& slot = slots_.at(receipt.evicted_slot);
            slot.entry = *receipt.evicted;
            slot.alive = true;
            index_->add(receipt.evicted_slot, slot.entry.embedding);
            ++alive_count_;
        }
    }
    next_seq_ = receipt.prev_next_seq;
}

ReadResult MemoryStore::finish_read(std::vector<IndexHit> hits) const {
    ReadResult result;
    result.query_id = "q" + std::to_string(query_counter_.fetch_add(1) + 1);
    for (const auto& h : hits) {
        if (h.score < cfg_.sim_threshold) continue;
        result.hits.push_back({slots_[h.id].entry.persona, h.score});
    }
    return result;
}

ReadResult MemoryStore::read(const Embedding& query) const {
    std::shared_lock lock(mutex_);
    if (alive_count_ == 0)
        return ReadResult{{}, "q" + std::to_string(query_counter_.fetch_add(1) + 1)};
    return finish_read(index_->search(query, cfg_.top_k));
}

ReadResult MemoryStore::read(const DialogueContext& context, EncoderPort& encoder) const {
    return read(embed_context(context, encoder, cfg_.budget_context));
}

ReadResult MemoryStore::read_rescored(const Embedding& coarse_query,
                                      const Rescorer& rescore) const {
    std::shared_lock lock(mutex_);
    if (alive_count_ == 0)
        return ReadResult{{}, "q" + std::to_string(query_counter_.fetch_add(1) + 1)};

    auto coarse = index_->search(coarse_query, cfg_.top_k * 4);
    std::vector<PersonaSentence> candidates;
    candidates.reserve(coarse.size());
    for (const auto& h : coarse) candidates.push_back(slots_[h.id].entry.persona);

    auto scores = rescore(candidates);
    if (scores.size() != candidates.size())
        throw InvalidArgument("read_rescored: rescorer returned wrong count");

    std::vector<IndexHit> rescored;
    rescored.reserve(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i)
        rescored.push_back({coarse[i].id, scores[i]});
    std::sort(rescored.begin(), rescored.end(), [](const IndexHit& a, const IndexHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (rescored.size() > cfg_.top_k) rescored.resize(cfg_.top_k);
    return finish_read(std::move(rescored));
}

std::vector<MemoryEntry> MemoryStore::entries() const {
    std::shared_lock lock(mutex_);
    std::vector<MemoryEntry> out;
    out.reserve(alive_count_);
    for (const auto& s : slots_)
        if (s.alive) out.push_back(s.entry);
    return out;
}

void MemoryStore::clear() {
    std::unique_lock lock(mutex_);
    slots_.clear();
    alive_count_ = 0;
    next_seq_ = 1;
    index_ = make_index(cfg_.index_backend, cfg_);
}

// ─── Snapshot format ───────────────────────────────────────────
// "LTMSNAP\x01" | u32 dim | u8 owner | u64 next_seq | u64 count |
// u16 encoder_id len + bytes | per entry: u32 persona-JSON len + bytes,
// u64 written_at, u32 replaced_count, dim x f32 little-endian.

namespace {

constexpr char kMagic[8] = {'L', 'T', 'M', 'S', 'N', 'A', 'P', '\x01'};

void put_u16(std::string& out, std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_f32(std::string& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(out, v);
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > data.size()) throw IoError("snapshot truncated");
    }
    std::uint16_t u16() { need(2); std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(
            static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 2; return v; }
    std::uint32_t u32() { need(4); std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(
            static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 4; return v; }
    std::uint64_t u64() { need(8); std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(
            static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8; return v; }
    float f32() { std::uint32_t v = u32(); float f; std::memcpy(&f, &v, 4); return f; }
    std::string bytes(std::size_t n) { need(n); std::string s = data.substr(pos, n); pos += n; return s; }
};

}  // namespace

void MemoryStore::snapshot(const std::string& path) const {
    std::shared_lock lock(mutex_);
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(cfg_.embedding_dim));
    out.push_back(owner_ == Speaker::User ? '\x00' : '\x01');
    put_u64(out, next_seq_);
    put_u64(out, alive_count_);
    put_u16(out, static_cast<std::uint16_t>(encoder_id_.size()));
    out += encoder_id_;
    for (const auto& s : slots_) {
        if (!s.alive) continue;
        std::string pj = persona_to_json(s.entry.persona).dump();
        put_u32(out, static_cast<std::uint32_t>(pj.size()));
        out += pj;
        put_u64(out, s.entry.written_at);
        put_u32(out, s.entry.replaced_count);
        for (float f : s.entry.embedding.values) put_f32(out, f);
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write snapshot: " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw IoError("short write on snapshot: " + path);
}

std::unique_ptr<MemoryStore> MemoryStore::restore(const std::string& path,
                                                  const EngineConfig& cfg) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open snapshot: " + path);
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

    Reader r{data};
    if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
        throw IoError("not a memory snapshot: " + path);
    std::uint32_t dim = r.u32();
    if (dim != cfg.embedding_dim)
        throw IoError("snapshot dimension " + std::to_string(dim) +
                      " does not match configured dimension " + std::to_string(cfg.embedding_dim));
    Speaker owner = r.bytes(1)[0] == '\x00' ? Speaker::User : Speaker::Bot;
    std::uint64_t next_seq = r.u64();
    std::uint64_t count = r.u64();
    std::string encoder_id = r.bytes(r.u16());

    auto store = std::make_unique<MemoryStore>(owner, cfg, encoder_id);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string pj = r.bytes(r.u32());
        Slot slot;
        try {
            slot.entry.persona = persona_from_json(json::parse(pj));
        } catch (const json::exception& e) {
            throw IoError(std::string("corrupt persona record in snapshot: ") + e.what());
        }
        slot.entry.written_at = r.u64();
        slot.entry.replaced_count = r.u32();
        std::vector<float> values(dim);
        for (std::uint32_t d = 0; d < dim; ++d) values[d] = r.f32();
        slot.entry.embedding = make_embedding(std::move(values));

        std::size_t id = store->slots_.size();
        store->index_->add(id, slot.entry.embedding);
        store->slots_.push_back(std::move(slot));
        ++store->alive_count_;
    }
    store->next_seq_ = next_seq;
    return store;
}

std::pair<ReadResult, ReadResult> read_both(const MemoryStore& user_store,
                                            const MemoryStore& bot_store,
                                            const DialogueContext& context,
                                            EncoderPort& context_encoder,
                                            std::size_t context_window) {
    Embedding query = embed_context(context, context_encoder, context_window);
    return {user_store.read(query), bot_store.read(query)};
}

}  // namespace ltm
