#pragma once

#include <map>
#include <string>
#include <vector>

#include "normcase/engine/engine.hpp"

namespace normcase::testing {

struct OraclePath {
    std::string status;
    bool motivation_required = false;
    bool expanded = false;
    std::string digest;
};

/// Depth-first enumeration of every act sequence of length <= depth, cloning
/// the state before each attempt. Keys are act names joined by '/'.
std::map<std::string, OraclePath> enumerate_paths(const engine::Engine& engine, const engine::NormState& base,
                                                  int depth);

}  // namespace normcase::testing
