#include "normcase/service/config.hpp"

#include <cstdlib>

#include "normcase/core/kv_file.hpp"

namespace normcase::service {

namespace fs = std::filesystem;

int ServiceConfig::decision_period_for(const std::string& case_type) const {
    auto it = decision_period_days.find(case_type);
    return it == decision_period_days.end() ? default_decision_period_days : it->second;
}

ServiceConfig load_service_config(const fs::path& path) {
    KvFile file = [&] {
        try {
            return KvFile::load(path);
        } catch (const KvFile::Error& e) {
            throw ConfigError(e.what());
        }
    }();
    ServiceConfig c;
    fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    auto positive = [&](std::int64_t v, const char* key) {
        if (v <= 0) throw ConfigError(path.string() + ": " + key + " must be positive");
        return static_cast<int>(v);
    };
    try {
        if (auto v = file.get_string("server", "data-dir")) c.data_dir = resolve(*v);
        if (auto v = file.get_string("server", "host")) c.host = *v;
        if (auto v = file.get_int("server", "port")) {
            if (*v < 0 || *v > 65535) throw ConfigError(path.string() + ": port out of range");
            c.port = static_cast<int>(*v);
        }
        if (auto v = file.get_int("server", "snapshot-every")) c.snapshot_every = positive(*v, "snapshot-every");
        if (auto v = file.get_int("server", "sweep-interval-seconds")) {
            if (*v < 0) throw ConfigError(path.string() + ": sweep-interval-seconds must not be negative");
            c.sweep_interval_seconds = static_cast<int>(*v);
        }
        auto spec = file.get_string("policy", "spec");
        if (!spec) throw ConfigError(path.string() + ": missing [policy] spec");
        c.spec_path = resolve(*spec);
        if (auto v = file.get_int("urgency", "red-days")) c.urgency.red_days = positive(*v, "red-days");
        if (auto v = file.get_int("urgency", "yellow-days")) c.urgency.yellow_days = positive(*v, "yellow-days");
        if (c.urgency.yellow_days < c.urgency.red_days)
            throw ConfigError(path.string() + ": yellow-days must not be below red-days");
        if (auto v = file.get_int("cases", "decision-period-days"))
            c.default_decision_period_days = positive(*v, "decision-period-days");
        for (const auto& [type, value] : file.section("decision-period")) {
            const auto* days = std::get_if<std::int64_t>(&value);
            if (!days) throw ConfigError(path.string() + ": decision-period." + type + " must be an integer");
            c.decision_period_days[type] = positive(*days, "decision-period");
        }
        if (auto v = file.get_int("simulation", "max-depth")) c.tree_max_depth = positive(*v, "max-depth");
        if (auto v = file.get_int("simulation", "node-cap")) c.tree_node_cap = positive(*v, "node-cap");
    } catch (const KvFile::Error& e) {
        throw ConfigError(e.what());
    }
    if (const char* dir = std::getenv("NORMCASE_DATA_DIR"); dir && *dir) c.data_dir = dir;
    return c;
}

}  // namespace normcase::service
