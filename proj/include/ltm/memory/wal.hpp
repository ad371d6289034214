#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ltm/core/types.hpp"

namespace ltm {

// Append-only log of persona texts, one JSON record per line. Writes of
// one turn are followed by a commit marker; replay applies committed
// turns only, so a crash mid-turn loses at most that turn. Embeddings
// are not logged; they are recomputed on replay.

class WalWriter {
public:
    explicit WalWriter(std::string path);

    void append_write(Speaker owner, const PersonaSentence& persona);
    void commit(std::uint64_t turn_id);  // flushes

    /// Truncate after a snapshot has captured the state.
    void reset();

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

struct WalTurn {
    std::uint64_t turn_id = 0;
    std::vector<std::pair<Speaker, PersonaSentence>> writes;
};

/// Committed turns in log order. A missing file reads as empty; an
/// uncommitted or torn tail is dropped.
std::vector<WalTurn> replay_wal(const std::string& path);

}  // namespace ltm
