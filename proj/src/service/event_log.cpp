#include "normcase/service/event_log.hpp"

#include <sstream>

namespace normcase::service {

namespace fs = std::filesystem;
using json = nlohmann::json;

EventLog::EventLog(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StoreError("cannot create data directory " + dir_.string() + ": " + ec.message());
}

std::vector<json> EventLog::read_all() {
    std::vector<json> out;
    std::string content;
    {
        std::ifstream in(log_path(), std::ios::binary);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            content = ss.str();
        }
    }
    std::size_t pos = 0;
    std::size_t good_end = 0;
    int line = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        ++line;
        if (nl == std::string::npos) break;
        try {
            out.push_back(json::parse(content.begin() + static_cast<long>(pos),
                                      content.begin() + static_cast<long>(nl)));
        } catch (const json::parse_error& e) {
            throw StoreError(log_path().string() + ":" + std::to_string(line) + ": corrupt record: " + e.what());
        }
        pos = nl + 1;
        good_end = pos;
    }
    if (good_end < content.size()) fs::resize_file(log_path(), good_end);
    return out;
}

void EventLog::append(const json& event) {
    if (!out_.is_open()) {
        out_.open(log_path(), std::ios::binary | std::ios::app);
        if (!out_) throw StoreError("cannot open " + log_path().string() + " for writing");
    }
    out_ << event.dump() << '\n';
    out_.flush();
    if (!out_) throw StoreError("write to " + log_path().string() + " failed");
}

std::optional<json> EventLog::read_snapshot() const {
    std::ifstream in(snapshot_path(), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw StoreError(snapshot_path().string() + ": " + e.what());
    }
}

void EventLog::write_snapshot(const json& snapshot) const {
    fs::path tmp = snapshot_path();
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << snapshot.dump(1) << '\n';
        if (!out) throw StoreError("cannot write " + tmp.string());
    }
    fs::rename(tmp, snapshot_path());
}

}  // namespace normcase::service
