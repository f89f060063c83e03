#include "codl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "codl/errors.hpp"
#include "codl/rng.hpp"

namespace codl {

namespace {

constexpr double kProbClamp = 1e-7;
constexpr std::uint64_t kShuffleStream = 0x73687566;   // shuffle draws
constexpr std::uint64_t kPretrainStream = 0x70726574;  // pretrain draws

double bce(double target, double p) {
    double pc = std::min(std::max(p, kProbClamp), 1.0 - kProbClamp);
    return -(target * std::log(pc) + (1.0 - target) * std::log(1.0 - pc));
}

// Learned index of a graph concept, or npos when the graph node was never
// trained (taxonomy-only concepts from TSV ingestion).
std::size_t learned_index_of(const EngineState& state, ConceptId gid) {
    for (std::size_t i = 0; i < state.learned_to_graph.size(); ++i)
        if (state.learned_to_graph[i] == gid) return i;
    return static_cast<std::size_t>(-1);
}

void validate_phase(const PhaseBatch& phase, const EngineState& state) {
    if (phase.new_concepts.empty())
        throw parse_error("phase batch introduces no concepts");
    std::unordered_set<std::string> names;
    for (const auto& nc : phase.new_concepts) {
        if (nc.name.empty()) throw parse_error("phase concept with empty name");
        if (!names.insert(nc.name).second)
            throw parse_error("duplicate concept '" + nc.name +
                              "' within phase");
        if (state.graph.has_concept(nc.name)) {
            std::size_t li = learned_index_of(state, state.graph.id_of(nc.name));
            if (li != static_cast<std::size_t>(-1) &&
                li < state.exemplar_sets.size())
                throw parse_error("concept '" + nc.name + "' already learned");
        }
    }
    std::vector<std::size_t> per_concept(phase.new_concepts.size(), 0);
    for (const auto& s : phase.samples) {
        if (s.local_concept >= phase.new_concepts.size())
            throw parse_error("phase sample references unknown local concept");
        if (s.input.size() != state.params.config.input_dim)
            throw parse_error("phase sample input dimension mismatch");
        ++per_concept[s.local_concept];
    }
    for (std::size_t c = 0; c < per_concept.size(); ++c)
        if (per_concept[c] == 0)
            throw parse_error("phase concept '" + phase.new_concepts[c].name +
                              "' has no samples");
}

// BCE breakdown of a set of items against explicit targets. Columns below
// split_col count as distillation, the rest as classification; both are
// means over the item set.
LossBreakdown breakdown_from_targets(const EmbedderParams& params,
                                     const std::vector<TrainingItem>& items,
                                     std::size_t split_col) {
    LossBreakdown out;
    const double inv = 1.0 / static_cast<double>(items.size());
    for (const auto& item : items) {
        Vec p = scores(params, item.input);
        for (std::size_t c = 0; c < p.size(); ++c) {
            double term = inv * bce(item.target[c], p[c]);
            if (c < split_col)
                out.distillation += term;
            else
                out.classification += term;
        }
    }
    out.total = out.classification + out.distillation;
    return out;
}

// epochs x minibatch SGD over a fixed item list, one seeded permutation per
// epoch, gradients accumulated in index order within each minibatch.
void run_sgd(EmbedderParams& params, const std::vector<TrainingItem>& items,
             const TrainConfig& config, std::uint64_t stream,
             std::uint64_t phase,
             const std::function<void(std::size_t)>& epoch_done) {
    if (config.epochs == 0 || config.batch_size == 0)
        throw std::invalid_argument("train config: epochs/batch_size >= 1");
    if (config.lr <= 0.0)
        throw std::invalid_argument("train config: lr must be positive");
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng rng(derive_seed(config.seed, stream, phase, epoch));
        shuffle_indices(order, rng);
        for (std::size_t start = 0; start < order.size();
             start += config.batch_size) {
            std::size_t stop =
                std::min(order.size(), start + config.batch_size);
            std::vector<TrainingItem> batch;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i)
                batch.push_back(items[order[i]]);
            auto [loss, grads] = loss_and_grad(params, batch);
            (void)loss;
            sgd_step(params, grads, config.lr);
        }
        if (epoch_done) epoch_done(epoch);
    }
}

}  // namespace

std::vector<AugmentedItem> build_augmented_set(const PhaseBatch& phase,
                                               const EngineState& state) {
    validate_phase(phase, state);
    const std::size_t old_count = state.exemplar_sets.size();
    std::vector<AugmentedItem> out;
    out.reserve(phase.samples.size() + state.total_stored_exemplars());
    for (const auto& s : phase.samples)
        out.push_back({s.input, old_count + s.local_concept, true});
    for (std::size_t c = 0; c < old_count; ++c)
        for (const Vec& item : state.exemplar_sets[c].items)
            out.push_back({item, c, false});
    return out;
}

std::vector<Vec> store_old_outputs(
    const EngineState& state, const std::vector<AugmentedItem>& augmented) {
    const std::size_t old_count = state.exemplar_sets.size();
    if (old_count == 0) return {};
    if (state.params.num_concepts() < old_count)
        throw std::invalid_argument("store_old_outputs: head smaller than "
                                    "learned concept count");
    std::vector<Vec> q;
    q.reserve(augmented.size());
    for (const auto& item : augmented) {
        Vec p = scores(state.params, item.input);
        q.emplace_back(p.begin(), p.begin() + old_count);
    }
    return q;
}

LossBreakdown total_loss(const EmbedderParams& params,
                         const std::vector<AugmentedItem>& items,
                         const std::vector<Vec>& q_rows,
                         std::size_t old_concept_count) {
    if (items.empty()) throw std::invalid_argument("total_loss: empty batch");
    if (old_concept_count > 0 && q_rows.size() != items.size())
        throw std::invalid_argument(
            "total_loss: missing stored scores for old concepts");
    const std::size_t num_concepts = params.num_concepts();
    std::vector<TrainingItem> batch;
    batch.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        Vec target(num_concepts, 0.0);
        if (old_concept_count > 0) {
            if (q_rows[i].size() != old_concept_count)
                throw std::invalid_argument(
                    "total_loss: stored score row has wrong width");
            for (std::size_t c = 0; c < old_concept_count; ++c)
                target[c] = q_rows[i][c];
        }
        if (items[i].is_new) target[items[i].concept_index] = 1.0;
        batch.push_back({items[i].input, std::move(target)});
    }
    return breakdown_from_targets(params, batch, old_concept_count);
}

void incremental_update(EngineState& state, const PhaseBatch& phase,
                        const MetricsSink& sink,
                        const UpdateOptions& options) {
    validate_phase(phase, state);
    const std::size_t old_count = state.exemplar_sets.size();
    const std::size_t new_count = phase.new_concepts.size();
    const std::size_t total_count = old_count + new_count;
    if (state.config.total_exemplar_budget < total_count)
        throw budget_error(
            "exemplar budget " +
            std::to_string(state.config.total_exemplar_budget) +
            " cannot cover " + std::to_string(total_count) + " concepts");

    // (1) Register concepts and grow the head. Names already present in the
    // graph are linked by exact name match.
    for (const auto& nc : phase.new_concepts) {
        ConceptId gid = state.graph.has_concept(nc.name)
                            ? state.graph.id_of(nc.name)
                            : state.graph.add_concept(nc.name);
        state.learned_to_graph.push_back(gid);
        state.concept_phase.push_back(state.phase_counter);
        state.instance_metadata.push_back(nc.instance);
    }
    grow_head(state.params, new_count);

    // (2) Augmented training set: new samples plus stored exemplars.
    std::vector<AugmentedItem> augmented = build_augmented_set(phase, state);
    if (!options.rehearse_exemplars)
        augmented.resize(phase.samples.size());

    // (3) Old-concept outputs, stored once before any update.
    std::vector<Vec> q;
    if (options.distillation) q = store_old_outputs(state, augmented);
    const std::size_t distill_cols = options.distillation ? old_count : 0;

    // (4) Per-item targets: stored scores on the old columns, the one-hot
    // concept indicator on the new ones. With distillation disabled every
    // item falls back to a plain one-hot target.
    std::vector<TrainingItem> originals;
    originals.reserve(augmented.size());
    for (std::size_t i = 0; i < augmented.size(); ++i) {
        Vec target(total_count, 0.0);
        if (distill_cols > 0)
            for (std::size_t c = 0; c < old_count; ++c) target[c] = q[i][c];
        if (!options.distillation || augmented[i].is_new)
            target[augmented[i].concept_index] = 1.0;
        originals.push_back({augmented[i].input, std::move(target)});
    }

    // Exemplar items are expanded into (1 + |specs|) training items;
    // transformed copies inherit the target of their source.
    std::vector<TrainingItem> items;
    for (std::size_t i = 0; i < augmented.size(); ++i) {
        items.push_back(originals[i]);
        if (!augmented[i].is_new)
            for (Vec& copy :
                 augment(augmented[i].input, state.config.augment_specs))
                items.push_back({std::move(copy), originals[i].target});
    }

    run_sgd(state.params, items, state.config, kShuffleStream,
            state.phase_counter, [&](std::size_t epoch) {
                if (sink)
                    sink(epoch, breakdown_from_targets(state.params, originals,
                                                       distill_cols));
            });

    // (5) Exemplar maintenance under the shared budget: equal split, floor.
    const std::size_t quota =
        state.config.total_exemplar_budget / total_count;
    for (auto& set : state.exemplar_sets)
        set = reduce(set, std::min(quota, set.items.size()));
    for (std::size_t local = 0; local < new_count; ++local) {
        std::vector<Vec> class_inputs;
        for (const auto& s : phase.samples)
            if (s.local_concept == local) class_inputs.push_back(s.input);
        std::size_t m = std::min(quota, class_inputs.size());
        ExemplarSet set = select_exemplars(class_inputs, state.params, m);
        set.concept_id = static_cast<int>(old_count + local);
        state.exemplar_sets.push_back(std::move(set));
    }

    // (6)
    state.phase_counter += 1;
}

PretrainResult pretrain_unsupervised(const std::vector<Vec>& exemplar_inputs,
                                     const std::vector<TransformSpec>& specs,
                                     const EmbedderConfig& embedder_config,
                                     const TrainConfig& config) {
    if (exemplar_inputs.size() < 2)
        throw std::invalid_argument(
            "pretrain: need at least 2 surrogate classes");
    if (specs.empty())
        throw std::invalid_argument(
            "pretrain: need at least one transform spec");

    EmbedderParams params = init_embedder(embedder_config);
    grow_head(params, exemplar_inputs.size());

    std::vector<TrainingItem> items;
    for (std::size_t i = 0; i < exemplar_inputs.size(); ++i) {
        Vec target(exemplar_inputs.size(), 0.0);
        target[i] = 1.0;
        items.push_back({exemplar_inputs[i], target});
        for (Vec& copy : augment(exemplar_inputs[i], specs))
            items.push_back({std::move(copy), target});
    }

    run_sgd(params, items, config, kPretrainStream, 0, nullptr);

    std::size_t correct = 0;
    for (const auto& item : items) {
        Vec p = scores(params, item.input);
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < p.size(); ++c)
            if (p[c] > p[argmax]) argmax = c;
        if (item.target[argmax] == 1.0) ++correct;
    }

    PretrainResult result;
    result.surrogate_accuracy =
        static_cast<double>(correct) / static_cast<double>(items.size());
    params.head_w = Matrix(0, embedder_config.feature_dim);
    params.head_b.clear();
    result.params = std::move(params);
    return result;
}

}  // namespace codl
