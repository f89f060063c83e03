#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codl/linalg.hpp"

namespace codl {

struct EmbedderConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t feature_dim = 0;
    std::string activation = "relu";
    std::uint64_t seed = 0;
};

// Trunk layers followed by a growable per-concept sigmoid head. Plain value
// type: every operation below is a pure function of its inputs, so params can
// be copied, snapshotted and moved across threads freely.
struct EmbedderParams {
    EmbedderConfig config;
    struct Layer {
        Matrix w;
        Vec b;
    };
    std::vector<Layer> trunk;  // input -> hidden... -> feature_dim
    Matrix head_w;             // num_concepts x feature_dim
    Vec head_b;                // one bias per concept

    std::size_t num_concepts() const { return head_w.rows; }
};

// Gradients share the parameter layout exactly.
using EmbedderGrads = EmbedderParams;

struct TrainingItem {
    Vec input;
    Vec target;  // one entry per concept, each in [0, 1]
};

// Xavier-uniform trunk (range sqrt(6/(fan_in+fan_out))), zero biases, empty
// head. Deterministic in config.seed.
EmbedderParams init_embedder(const EmbedderConfig& config);

// Appends k zero-initialized head rows; existing entries are untouched, so a
// fresh concept scores sigmoid(0) = 0.5 everywhere.
void grow_head(EmbedderParams& params, std::size_t k);

// Forward pass through the trunk: affine + relu per hidden layer, final
// affine without activation.
Vec features(const EmbedderParams& params, const Vec& x);

// sigmoid(head_w * features(x) + head_b), one score per concept.
Vec scores(const EmbedderParams& params, const Vec& x);

// Mean over the batch of the per-concept binary cross-entropy
//   sum_c -[t_c ln p_c + (1 - t_c) ln(1 - p_c)]
// with probabilities clamped to [1e-7, 1 - 1e-7] inside the logs. Gradients
// are exact analytic backprop (head logit gradient p - t).
std::pair<double, EmbedderGrads> loss_and_grad(
    const EmbedderParams& params, const std::vector<TrainingItem>& batch);

// theta <- theta - lr * g, entrywise. Shapes must match.
void sgd_step(EmbedderParams& params, const EmbedderGrads& grads, double lr);

EmbedderGrads zero_grads(const EmbedderParams& params);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

namespace detail {
// Test seam: when set, invoked once per features() evaluation. Used to
// verify that classification recomputes prototypes from current parameters.
extern void (*feature_eval_hook)();
}  // namespace detail

}  // namespace codl
