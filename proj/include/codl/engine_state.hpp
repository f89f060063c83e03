#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codl/concept_graph.hpp"
#include "codl/embedder.hpp"
#include "codl/exemplar.hpp"

namespace codl {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double lr = 0.1;
    std::size_t total_exemplar_budget = 100;  // K, shared across all concepts
    std::vector<TransformSpec> augment_specs;
    std::uint64_t seed = 0;
};

// Labeled instances for the concepts introduced in one incremental phase.
// Each sample's label is a local index into new_concepts.
struct PhaseBatch {
    struct NewConcept {
        std::string name;
        std::string instance;  // optional metadata, empty when absent
    };
    struct Sample {
        Vec input;
        std::size_t local_concept = 0;
    };
    std::vector<NewConcept> new_concepts;
    std::vector<Sample> samples;
};

struct LossBreakdown {
    double classification = 0.0;  // BCE over new-concept columns
    double distillation = 0.0;    // BCE over old-concept columns
    double total = 0.0;           // classification + distillation
};

// The unit of persistence: taxonomy, embedder, exemplar sets and training
// configuration. The trainer is the single writer; evaluation-only consumers
// may hold immutable snapshots.
//
// Learned concepts are identified by their head row ("learned index") in
// [0, learned_count). learned_to_graph maps each learned index to its node
// in the concept graph, which may also hold ingested taxonomy-only concepts.
struct EngineState {
    ConceptGraph graph;
    EmbedderParams params;
    std::vector<ExemplarSet> exemplar_sets;     // indexed by learned index
    std::vector<ConceptId> learned_to_graph;    // learned index -> graph id
    std::vector<std::uint64_t> concept_phase;   // learned index -> phase
    std::vector<std::string> instance_metadata; // learned index -> instance
    TrainConfig config;
    std::uint64_t phase_counter = 0;
    bool normalize_prototypes = true;

    std::size_t learned_count() const { return learned_to_graph.size(); }

    const std::string& concept_name(std::size_t learned_index) const {
        return graph.concept_at(learned_to_graph[learned_index]).name;
    }

    std::size_t total_stored_exemplars() const {
        std::size_t n = 0;
        for (const auto& s : exemplar_sets) n += s.items.size();
        return n;
    }
};

}  // namespace codl
