#pragma once

#include <functional>
#include <vector>

#include "codl/engine_state.hpp"

namespace codl {

struct AugmentedItem {
    Vec input;
    std::size_t concept_index = 0;  // learned index
    bool is_new = false;
};

// Receives one record per epoch.
using MetricsSink =
    std::function<void(std::size_t epoch, const LossBreakdown&)>;

// Ablation switches used by benchmarks; the full method keeps both on.
struct UpdateOptions {
    bool rehearse_exemplars = true;
    bool distillation = true;
};

// New-phase samples mapped to fresh learned indices, followed by every
// stored exemplar of the already-learned concepts (by concept, priority
// order). Throws parse_error when a phase concept was already learned.
std::vector<AugmentedItem> build_augmented_set(const PhaseBatch& phase,
                                               const EngineState& state);

// q[i][c] = sigmoid score of old concept c on augmented item i, computed
// with the current parameters before any update of this phase. Empty per-row
// tables when nothing was learned yet.
std::vector<Vec> store_old_outputs(const EngineState& state,
                                   const std::vector<AugmentedItem>& augmented);

// Loss over one batch of augmented items against their stored score rows:
// old-concept columns reproduce q (distillation), new-concept columns carry
// the one-hot concept indicator (classification).
LossBreakdown total_loss(const EmbedderParams& params,
                         const std::vector<AugmentedItem>& items,
                         const std::vector<Vec>& q_rows,
                         std::size_t old_concept_count);

// One incremental phase:
//   1. register the phase concepts and grow the head,
//   2. build the augmented training set,
//   3. store old-concept outputs,
//   4. epochs x minibatch SGD on classification + distillation loss with
//      seeded shuffles and on-the-fly exemplar augmentation,
//   5. reduce existing exemplar sets and select exemplars for the new
//      concepts under the shared budget,
//   6. bump the phase counter.
// Concepts whose names already exist in the graph (e.g. from an ingested
// taxonomy) are linked by exact name match rather than duplicated.
void incremental_update(EngineState& state, const PhaseBatch& phase,
                        const MetricsSink& sink = nullptr,
                        const UpdateOptions& options = {});

struct PretrainResult {
    EmbedderParams params;        // trunk only, head reset to zero rows
    double surrogate_accuracy = 0.0;
};

// Exemplar-style unsupervised warm start: each input seeds a surrogate class
// made of itself plus its transformed copies, and a throwaway |inputs|-way
// head is trained to tell the classes apart. The returned trunk keeps the
// learned invariances; the head is discarded.
PretrainResult pretrain_unsupervised(const std::vector<Vec>& exemplar_inputs,
                                     const std::vector<TransformSpec>& specs,
                                     const EmbedderConfig& embedder_config,
                                     const TrainConfig& config);

}  // namespace codl
