#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "normcase/dsl/parser.hpp"

namespace normcase::testing {

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path policy_dir() { return NORMCASE_POLICY_DIR; }
inline std::filesystem::path test_data() { return NORMCASE_TEST_DATA; }

inline dsl::NormSpec iit_spec() {
    auto r = dsl::parse_spec({read_file(policy_dir() / "iit.norm"), "iit.norm"});
    if (!r.ok()) throw std::runtime_error("bundled spec does not parse");
    return *r.spec;
}

/// Bundled spec plus every .norm file under tests/data/specs.
inline std::vector<std::filesystem::path> spec_corpus() {
    std::vector<std::filesystem::path> out{policy_dir() / "iit.norm"};
    for (const auto& e : std::filesystem::directory_iterator(test_data() / "specs"))
        if (e.path().extension() == ".norm") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace normcase::testing
