#include "ltm/memory/wal.hpp"

#include <json.hpp>

#include "ltm/core/errors.hpp"
#include "ltm/core/json_io.hpp"

namespace ltm {

using nlohmann::json;

WalWriter::WalWriter(std::string path) : path_(std::move(path)) {
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw IoError("cannot open WAL for append: " + path_);
}

void WalWriter::append_write(Speaker owner, const PersonaSentence& persona) {
    json record{{"op", "write"}, {"owner", to_string(owner)}, {"persona", persona_to_json(persona)}};
    out_ << record.dump() << '\n';
    if (!out_) throw IoError("WAL append failed: " + path_);
}

void WalWriter::commit(std::uint64_t turn_id) {
    json record{{"op", "commit"}, {"turn", turn_id}};
    out_ << record.dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("WAL commit failed: " + path_);
}

void WalWriter::reset() {
    out_.close();
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot truncate WAL: " + path_);
}

std::vector<WalTurn> replay_wal(const std::string& path) {
    std::vector<WalTurn> turns;
    std::ifstream in(path, std::ios::binary);
    if (!in) return turns;  // no log yet

    WalTurn pending;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception&) {
            break;  // torn tail from a crash mid-append
        }
        try {
            std::string op = record.at("op").get<std::string>();
            if (op == "write") {
                pending.writes.emplace_back(
                    speaker_from_string(record.at("owner").get<std::string>()),
                    persona_from_json(record.at("persona")));
            } else if (op == "commit") {
                pending.turn_id = record.at("turn").get<std::uint64_t>();
                turns.push_back(std::move(pending));
                pending = WalTurn{};
            } else {
                break;
            }
        } catch (const json::exception&) {
            break;
        }
    }
    // anything after the last commit is an in-flight turn; drop it
    return turns;
}

}  // namespace ltm
