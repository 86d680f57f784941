#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace normcase::service {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only JSON-lines event log plus the latest snapshot, both kept in
/// one data directory.
class EventLog {
public:
    explicit EventLog(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path log_path() const { return dir_ / "events.jsonl"; }
    std::filesystem::path snapshot_path() const { return dir_ / "snapshot.json"; }

    /// Every complete record in order. A torn final line, left by a crash
    /// mid-write, is cut from the file.
    std::vector<nlohmann::json> read_all();
    void append(const nlohmann::json& event);

    std::optional<nlohmann::json> read_snapshot() const;
    /// Replaces the snapshot atomically.
    void write_snapshot(const nlohmann::json& snapshot) const;

private:
    std::filesystem::path dir_;
    std::ofstream out_;
};

}  // namespace normcase::service
