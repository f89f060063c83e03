#include "codl/embedder.hpp"

#include <cmath>
#include <stdexcept>

#include "codl/rng.hpp"

namespace codl {

namespace detail {
void (*feature_eval_hook)() = nullptr;
}  // namespace detail

namespace {

constexpr double kProbClamp = 1e-7;

std::vector<std::size_t> layer_dims(const EmbedderConfig& c) {
    std::vector<std::size_t> dims;
    dims.push_back(c.input_dim);
    for (std::size_t h : c.hidden_dims) dims.push_back(h);
    dims.push_back(c.feature_dim);
    return dims;
}

void validate_config(const EmbedderConfig& c) {
    if (c.input_dim == 0 || c.feature_dim == 0)
        throw std::invalid_argument("embedder config: dims must be >= 1");
    for (std::size_t h : c.hidden_dims)
        if (h == 0)
            throw std::invalid_argument("embedder config: dims must be >= 1");
    if (c.activation != "relu")
        throw std::invalid_argument("embedder config: unsupported activation '" +
                                    c.activation + "'");
}

double clamp_prob(double p) {
    if (p < kProbClamp) return kProbClamp;
    if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
    return p;
}

}  // namespace

EmbedderParams init_embedder(const EmbedderConfig& config) {
    validate_config(config);
    EmbedderParams params;
    params.config = config;
    auto dims = layer_dims(config);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        std::size_t fan_in = dims[l];
        std::size_t fan_out = dims[l + 1];
        double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Rng rng(derive_seed(config.seed, l));
        EmbedderParams::Layer layer;
        layer.w = Matrix(fan_out, fan_in);
        for (double& w : layer.w.data) w = rng.uniform(-s, s);
        layer.b = Vec(fan_out, 0.0);
        params.trunk.push_back(std::move(layer));
    }
    params.head_w = Matrix(0, config.feature_dim);
    params.head_b = Vec();
    return params;
}

void grow_head(EmbedderParams& params, std::size_t k) {
    if (k == 0) throw std::invalid_argument("grow_head: k must be >= 1");
    params.head_w.rows += k;
    params.head_w.data.resize(params.head_w.rows * params.head_w.cols, 0.0);
    params.head_b.resize(params.head_b.size() + k, 0.0);
}

Vec features(const EmbedderParams& params, const Vec& x) {
    if (detail::feature_eval_hook) detail::feature_eval_hook();
    if (x.size() != params.config.input_dim)
        throw std::invalid_argument("features: input dimension mismatch");
    Vec a = x;
    for (std::size_t l = 0; l < params.trunk.size(); ++l) {
        Vec z = matvec(params.trunk[l].w, a);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += params.trunk[l].b[i];
        if (l + 1 < params.trunk.size())
            for (double& v : z) v = v > 0.0 ? v : 0.0;
        a = std::move(z);
    }
    return a;
}

Vec scores(const EmbedderParams& params, const Vec& x) {
    if (params.num_concepts() == 0)
        throw std::invalid_argument("scores: head has no concepts");
    Vec f = features(params, x);
    Vec logits = matvec(params.head_w, f);
    Vec p(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c)
        p[c] = sigmoid(logits[c] + params.head_b[c]);
    return p;
}

EmbedderGrads zero_grads(const EmbedderParams& params) {
    EmbedderGrads g;
    g.config = params.config;
    for (const auto& layer : params.trunk) {
        EmbedderParams::Layer gl;
        gl.w = Matrix(layer.w.rows, layer.w.cols);
        gl.b = Vec(layer.b.size(), 0.0);
        g.trunk.push_back(std::move(gl));
    }
    g.head_w = Matrix(params.head_w.rows, params.head_w.cols);
    g.head_b = Vec(params.head_b.size(), 0.0);
    return g;
}

std::pair<double, EmbedderGrads> loss_and_grad(
    const EmbedderParams& params, const std::vector<TrainingItem>& batch) {
    if (batch.empty())
        throw std::invalid_argument("loss_and_grad: empty batch");
    const std::size_t num_concepts = params.num_concepts();
    EmbedderGrads grads = zero_grads(params);
    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const auto& item : batch) {
        if (item.input.size() != params.config.input_dim)
            throw std::invalid_argument("loss_and_grad: input dim mismatch");
        if (item.target.size() != num_concepts)
            throw std::invalid_argument("loss_and_grad: target dim mismatch");
        for (double t : item.target)
            if (!std::isfinite(t) || t < 0.0 || t > 1.0)
                throw std::invalid_argument(
                    "loss_and_grad: target outside [0, 1]");

        // Forward, keeping activations for backprop.
        std::vector<Vec> acts;       // acts[0] = input, acts.back() = feature
        std::vector<Vec> preacts;    // pre-activation of each trunk layer
        acts.push_back(item.input);
        for (std::size_t l = 0; l < params.trunk.size(); ++l) {
            Vec z = matvec(params.trunk[l].w, acts.back());
            for (std::size_t i = 0; i < z.size(); ++i)
                z[i] += params.trunk[l].b[i];
            preacts.push_back(z);
            if (l + 1 < params.trunk.size())
                for (double& v : z) v = v > 0.0 ? v : 0.0;
            acts.push_back(std::move(z));
        }
        const Vec& feature = acts.back();

        Vec logit_grad(num_concepts);
        for (std::size_t c = 0; c < num_concepts; ++c) {
            // Accumulate exactly like scores() (matvec order, bias last) so
            // that p here is bitwise equal to a stored score at the same
            // params; the distillation fixed point depends on it.
            double z = 0.0;
            const double* w = params.head_w.row(c);
            for (std::size_t i = 0; i < feature.size(); ++i)
                z += w[i] * feature[i];
            z += params.head_b[c];
            double p = sigmoid(z);
            double pc = clamp_prob(p);
            double t = item.target[c];
            loss -= inv_batch *
                    (t * std::log(pc) + (1.0 - t) * std::log(1.0 - pc));
            // Sigmoid + BCE: d(loss)/d(logit) = p - t.
            logit_grad[c] = (p - t) * inv_batch;
        }

        Vec dfeature(feature.size(), 0.0);
        for (std::size_t c = 0; c < num_concepts; ++c) {
            double g = logit_grad[c];
            double* gw = grads.head_w.row(c);
            const double* w = params.head_w.row(c);
            for (std::size_t i = 0; i < feature.size(); ++i) {
                gw[i] += g * feature[i];
                dfeature[i] += g * w[i];
            }
            grads.head_b[c] += g;
        }

        // Back through the trunk. The last layer has no relu.
        Vec da = std::move(dfeature);
        for (std::size_t l = params.trunk.size(); l-- > 0;) {
            Vec dz = std::move(da);
            if (l + 1 < params.trunk.size()) {
                const Vec& z = preacts[l];
                for (std::size_t i = 0; i < dz.size(); ++i)
                    if (z[i] <= 0.0) dz[i] = 0.0;
            }
            const Vec& a_prev = acts[l];
            Matrix& gw = grads.trunk[l].w;
            for (std::size_t r = 0; r < gw.rows; ++r) {
                double g = dz[r];
                double* row = gw.row(r);
                for (std::size_t c = 0; c < gw.cols; ++c)
                    row[c] += g * a_prev[c];
                grads.trunk[l].b[r] += g;
            }
            if (l > 0) da = matvec_transposed(params.trunk[l].w, dz);
        }
    }
    return {loss, std::move(grads)};
}

void sgd_step(EmbedderParams& params, const EmbedderGrads& grads, double lr) {
    if (params.trunk.size() != grads.trunk.size())
        throw std::invalid_argument("sgd_step: trunk depth mismatch");
    for (std::size_t l = 0; l < params.trunk.size(); ++l) {
        if (!params.trunk[l].w.same_shape(grads.trunk[l].w) ||
            params.trunk[l].b.size() != grads.trunk[l].b.size())
            throw std::invalid_argument("sgd_step: trunk shape mismatch");
        for (std::size_t i = 0; i < params.trunk[l].w.data.size(); ++i)
            params.trunk[l].w.data[i] -= lr * grads.trunk[l].w.data[i];
        for (std::size_t i = 0; i < params.trunk[l].b.size(); ++i)
            params.trunk[l].b[i] -= lr * grads.trunk[l].b[i];
    }
    if (!params.head_w.same_shape(grads.head_w) ||
        params.head_b.size() != grads.head_b.size())
        throw std::invalid_argument("sgd_step: head shape mismatch");
    for (std::size_t i = 0; i < params.head_w.data.size(); ++i)
        params.head_w.data[i] -= lr * grads.head_w.data[i];
    for (std::size_t i = 0; i < params.head_b.size(); ++i)
        params.head_b[i] -= lr * grads.head_b[i];
}

}  // namespace codl
