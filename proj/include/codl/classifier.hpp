#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "codl/engine_state.hpp"

namespace codl {

// One prototype per learned concept: the mean exemplar feature vector,
// L2-normalized when the flag is set. Always computed from the current
// parameters, never cached across updates, so prototypes follow the
// representation as it changes.
struct PrototypeTable {
    std::vector<Vec> prototypes;  // indexed by learned index
    bool normalized = false;
};

struct EvalItem {
    Vec input;
    std::size_t concept_index = 0;  // learned index of the true concept
};

// Accuracy of one phase's concepts, recorded when that phase finished.
struct PhaseRecord {
    std::uint64_t phase = 0;
    double accuracy = 0.0;
};

struct EvalReport {
    double overall_accuracy = 0.0;
    std::map<std::size_t, double> per_concept_accuracy;   // learned index
    std::map<std::uint64_t, double> per_phase_accuracy;
    // Present only when a phase history was supplied: accuracy now minus
    // accuracy at the end of the concept's own phase.
    std::map<std::uint64_t, double> per_phase_forgetting;
    std::optional<double> overall_forgetting;
};

PrototypeTable prototypes(const EngineState& state);

// Nearest prototype by L2 distance, feature vector normalized iff the state
// flag is on; ties go to the lowest learned index.
std::size_t classify(const EngineState& state, const Vec& x);

EvalReport evaluate(const EngineState& state,
                    const std::vector<EvalItem>& test_set,
                    const std::vector<PhaseRecord>& phase_history = {});

}  // namespace codl
