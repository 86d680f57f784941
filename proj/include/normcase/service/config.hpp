#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace normcase::service {

struct UrgencyThresholds {
    int red_days = 7;
    int yellow_days = 21;
};

struct ServiceConfig {
    std::filesystem::path data_dir = "data";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path spec_path;
    UrgencyThresholds urgency;
    int default_decision_period_days = 56;
    /// Per case type override of the decision period.
    std::map<std::string, int> decision_period_days;
    int tree_max_depth = 4;
    std::size_t tree_node_cap = 10000;
    /// A snapshot is written after this many events.
    int snapshot_every = 100;
    /// Seconds between background duty sweeps in `serve`; 0 disables them.
    int sweep_interval_seconds = 3600;

    int decision_period_for(const std::string& case_type) const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads the key-value config file. Relative paths resolve against the
/// file's directory; NORMCASE_DATA_DIR overrides the data directory.
ServiceConfig load_service_config(const std::filesystem::path& path);

}  // namespace normcase::service
