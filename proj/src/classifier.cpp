#include "codl/classifier.hpp"

#include <stdexcept>

#include "codl/errors.hpp"

namespace codl {

PrototypeTable prototypes(const EngineState& state) {
    PrototypeTable table;
    table.normalized = state.normalize_prototypes;
    table.prototypes.reserve(state.exemplar_sets.size());
    for (const auto& set : state.exemplar_sets) {
        if (set.items.empty())
            throw std::invalid_argument(
                "prototypes: concept has an empty exemplar set");
        Vec proto = exemplar_mean(set, state.params);
        if (state.normalize_prototypes) normalize_l2(proto);
        table.prototypes.push_back(std::move(proto));
    }
    return table;
}

namespace {

std::size_t nearest_prototype(const PrototypeTable& table, Vec feature,
                              bool normalize) {
    if (normalize) normalize_l2(feature);
    std::size_t best = 0;
    double best_dist = squared_distance(feature, table.prototypes[0]);
    for (std::size_t c = 1; c < table.prototypes.size(); ++c) {
        double dist = squared_distance(feature, table.prototypes[c]);
        if (dist < best_dist) {  // strict: ties keep the lowest index
            best = c;
            best_dist = dist;
        }
    }
    return best;
}

}  // namespace

std::size_t classify(const EngineState& state, const Vec& x) {
    if (state.exemplar_sets.empty())
        throw std::invalid_argument("classify: no learned concepts");
    PrototypeTable table = prototypes(state);
    return nearest_prototype(table, features(state.params, x),
                             state.normalize_prototypes);
}

EvalReport evaluate(const EngineState& state,
                    const std::vector<EvalItem>& test_set,
                    const std::vector<PhaseRecord>& phase_history) {
    if (test_set.empty()) throw parse_error("evaluate: empty test set");
    for (const auto& item : test_set)
        if (item.concept_index >= state.learned_count())
            throw parse_error("evaluate: test item references an unlearned "
                              "concept");

    PrototypeTable table = prototypes(state);

    std::map<std::size_t, std::size_t> concept_total, concept_correct;
    std::map<std::uint64_t, std::size_t> phase_total, phase_correct;
    std::size_t correct = 0;
    for (const auto& item : test_set) {
        std::size_t predicted = nearest_prototype(
            table, features(state.params, item.input),
            state.normalize_prototypes);
        bool hit = predicted == item.concept_index;
        if (hit) ++correct;
        concept_total[item.concept_index] += 1;
        concept_correct[item.concept_index] += hit ? 1 : 0;
        std::uint64_t phase = state.concept_phase[item.concept_index];
        phase_total[phase] += 1;
        phase_correct[phase] += hit ? 1 : 0;
    }

    EvalReport report;
    report.overall_accuracy =
        static_cast<double>(correct) / static_cast<double>(test_set.size());
    for (const auto& [c, total] : concept_total)
        report.per_concept_accuracy[c] =
            static_cast<double>(concept_correct[c]) /
            static_cast<double>(total);
    for (const auto& [p, total] : phase_total)
        report.per_phase_accuracy[p] =
            static_cast<double>(phase_correct[p]) /
            static_cast<double>(total);

    if (!phase_history.empty()) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& record : phase_history) {
            auto it = report.per_phase_accuracy.find(record.phase);
            if (it == report.per_phase_accuracy.end()) continue;
            double delta = it->second - record.accuracy;
            report.per_phase_forgetting[record.phase] = delta;
            sum += delta;
            ++n;
        }
        if (n > 0) report.overall_forgetting = sum / static_cast<double>(n);
    }
    return report;
}

}  // namespace codl
