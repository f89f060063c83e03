#include "codl/exemplar.hpp"

#include <cmath>
#include <stdexcept>

#include "codl/errors.hpp"
#include "codl/rng.hpp"

namespace codl {

TransformKind transform_kind_from_string(const std::string& name) {
    if (name == "jitter") return TransformKind::jitter;
    if (name == "scale") return TransformKind::scale;
    if (name == "translate") return TransformKind::translate;
    if (name == "rotate90") return TransformKind::rotate90;
    if (name == "contrast") return TransformKind::contrast;
    if (name == "colorshift") return TransformKind::colorshift;
    throw parse_error("unknown transform kind '" + name + "'");
}

std::string to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::jitter: return "jitter";
        case TransformKind::scale: return "scale";
        case TransformKind::translate: return "translate";
        case TransformKind::rotate90: return "rotate90";
        case TransformKind::contrast: return "contrast";
        case TransformKind::colorshift: return "colorshift";
    }
    throw std::invalid_argument("bad transform kind");
}

ExemplarSet select_exemplars(const std::vector<Vec>& class_inputs,
                             const EmbedderParams& params, std::size_t m,
                             bool normalize_features) {
    if (class_inputs.empty())
        throw std::invalid_argument("select_exemplars: no inputs");
    if (m < 1 || m > class_inputs.size())
        throw std::invalid_argument("select_exemplars: m out of range");

    const std::size_t n = class_inputs.size();
    std::vector<Vec> feats(n);
    for (std::size_t i = 0; i < n; ++i) {
        feats[i] = features(params, class_inputs[i]);
        if (normalize_features) normalize_l2(feats[i]);
    }

    const std::size_t dim = feats[0].size();
    Vec mean(dim, 0.0);
    for (const Vec& f : feats)
        for (std::size_t d = 0; d < dim; ++d) mean[d] += f[d];
    for (double& v : mean) v /= static_cast<double>(n);

    ExemplarSet set;
    std::vector<bool> taken(n, false);
    Vec selected_sum(dim, 0.0);
    for (std::size_t k = 1; k <= m; ++k) {
        std::size_t best = n;
        double best_dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double dist = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                double diff = mean[d] - (feats[i][d] + selected_sum[d]) /
                                            static_cast<double>(k);
                dist += diff * diff;
            }
            // Ascending scan with strict < keeps the lowest index on ties.
            if (best == n || dist < best_dist) {
                best = i;
                best_dist = dist;
            }
        }
        taken[best] = true;
        set.items.push_back(class_inputs[best]);
        set.provenance.push_back(best);
        for (std::size_t d = 0; d < dim; ++d) selected_sum[d] += feats[best][d];
    }
    return set;
}

ExemplarSet reduce(const ExemplarSet& set, std::size_t m_new) {
    if (m_new > set.items.size())
        throw std::invalid_argument("reduce: m_new exceeds stored exemplars");
    ExemplarSet out;
    out.concept_id = set.concept_id;
    out.items.assign(set.items.begin(), set.items.begin() + m_new);
    out.provenance.assign(set.provenance.begin(),
                          set.provenance.begin() + m_new);
    return out;
}

namespace {

const GridShape& require_grid(const TransformSpec& spec, std::size_t len) {
    if (!spec.grid)
        throw std::invalid_argument("augment: " + to_string(spec.kind) +
                                    " needs grid metadata");
    const GridShape& g = *spec.grid;
    if (g.height == 0 || g.width == 0 || g.channels == 0 ||
        g.flat_size() != len)
        throw std::invalid_argument("augment: grid shape does not match input");
    return g;
}

std::size_t grid_index(const GridShape& g, std::size_t r, std::size_t c,
                       std::size_t ch) {
    return (r * g.width + c) * g.channels + ch;
}

Vec apply_one(const Vec& x, const TransformSpec& spec) {
    switch (spec.kind) {
        case TransformKind::jitter: {
            Rng rng(spec.seed);
            Vec out = x;
            for (double& v : out)
                v += rng.uniform(-spec.magnitude, spec.magnitude);
            return out;
        }
        case TransformKind::scale: {
            Vec out = x;
            for (double& v : out) v *= 1.0 + spec.magnitude;
            return out;
        }
        case TransformKind::translate: {
            const GridShape& g = require_grid(spec, x.size());
            long shift = std::lround(spec.magnitude);
            Vec out(x.size(), 0.0);
            for (std::size_t r = 0; r < g.height; ++r)
                for (std::size_t c = 0; c < g.width; ++c) {
                    long src = static_cast<long>(c) - shift;
                    if (src < 0 || src >= static_cast<long>(g.width)) continue;
                    for (std::size_t ch = 0; ch < g.channels; ++ch)
                        out[grid_index(g, r, c, ch)] =
                            x[grid_index(g, r, static_cast<std::size_t>(src),
                                         ch)];
                }
            return out;
        }
        case TransformKind::rotate90: {
            const GridShape& g = require_grid(spec, x.size());
            if (g.height != g.width)
                throw std::invalid_argument(
                    "augment: rotate90 needs a square grid");
            long quarter_turns = std::lround(spec.magnitude) % 4;
            if (quarter_turns < 0) quarter_turns += 4;
            Vec out = x;
            const std::size_t n = g.height;
            for (long t = 0; t < quarter_turns; ++t) {
                Vec next(out.size());
                // 90 degrees clockwise: (r, c) <- (n-1-c, r)
                for (std::size_t r = 0; r < n; ++r)
                    for (std::size_t c = 0; c < n; ++c)
                        for (std::size_t ch = 0; ch < g.channels; ++ch)
                            next[grid_index(g, r, c, ch)] =
                                out[grid_index(g, n - 1 - c, r, ch)];
                out = std::move(next);
            }
            return out;
        }
        case TransformKind::contrast: {
            double mean = 0.0;
            for (double v : x) mean += v;
            mean /= static_cast<double>(x.size());
            Vec out(x.size());
            // v + m*(v - mean) == mean + (1+m)*(v - mean), but is exactly
            // the identity at m = 0.
            for (std::size_t i = 0; i < x.size(); ++i)
                out[i] = x[i] + spec.magnitude * (x[i] - mean);
            return out;
        }
        case TransformKind::colorshift: {
            const GridShape& g = require_grid(spec, x.size());
            std::size_t channel = spec.seed % g.channels;
            Vec out = x;
            for (std::size_t r = 0; r < g.height; ++r)
                for (std::size_t c = 0; c < g.width; ++c)
                    out[grid_index(g, r, c, channel)] += spec.magnitude;
            return out;
        }
    }
    throw std::invalid_argument("augment: unknown transform kind");
}

}  // namespace

std::vector<Vec> augment(const Vec& x,
                         const std::vector<TransformSpec>& specs) {
    std::vector<Vec> out;
    out.reserve(specs.size());
    for (const auto& spec : specs) out.push_back(apply_one(x, spec));
    return out;
}

Vec exemplar_mean(const ExemplarSet& set, const EmbedderParams& params) {
    if (set.items.empty())
        throw std::invalid_argument("exemplar_mean: empty exemplar set");
    Vec acc = features(params, set.items[0]);
    for (std::size_t i = 1; i < set.items.size(); ++i) {
        Vec f = features(params, set.items[i]);
        for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += f[d];
    }
    for (double& v : acc) v /= static_cast<double>(set.items.size());
    return acc;
}

}  // namespace codl
