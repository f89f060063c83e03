#pragma once

#include <string>

#include "codl/engine_state.hpp"

namespace codl {

inline constexpr const char* kStateVersion = "codl-state-v1";

// Full-fidelity round trip of an EngineState as a single self-describing
// JSON document; numeric arrays are written as decimal text that reloads
// bit-identically. Rejects files with a missing or foreign version string.
void save_state(const EngineState& state, const std::string& path);
EngineState load_state(const std::string& path);

}  // namespace codl
