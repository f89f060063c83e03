#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codl/embedder.hpp"
#include "codl/linalg.hpp"

namespace codl {

// Prioritized exemplar list for one concept. Items are stored in greedy
// selection order: index 0 is the most important, and reducing the budget
// keeps a prefix.
struct ExemplarSet {
    int concept_id = -1;
    std::vector<Vec> items;
    std::vector<std::size_t> provenance;  // source indices into the batch
};

struct GridShape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;

    std::size_t flat_size() const { return height * width * channels; }
};

enum class TransformKind {
    jitter,
    scale,
    translate,
    rotate90,
    contrast,
    colorshift,
};

TransformKind transform_kind_from_string(const std::string& name);
std::string to_string(TransformKind kind);

// Identity-preserving transformation. translate / rotate90 / colorshift act
// on a (H, W, C) row-major grid and require `grid`; rotate90 additionally
// needs a square grid so the shape survives. jitter / scale / contrast act
// on the raw vector.
struct TransformSpec {
    TransformKind kind = TransformKind::jitter;
    double magnitude = 0.0;
    std::uint64_t seed = 0;
    std::optional<GridShape> grid;
};

// Greedy herding: pick m inputs whose running feature mean tracks the class
// feature mean. At step k the unselected input minimizing
//   || class_mean - (feat(x) + sum of selected feats) / k ||_2
// is chosen, ties resolved toward the lowest source index. When
// normalize_features is set, feature vectors are L2-normalized before the
// mean and the scan (off by default).
ExemplarSet select_exemplars(const std::vector<Vec>& class_inputs,
                             const EmbedderParams& params, std::size_t m,
                             bool normalize_features = false);

// Keeps the first m_new items (the most important prefix).
ExemplarSet reduce(const ExemplarSet& set, std::size_t m_new);

// One transformed copy per spec. magnitude 0 reproduces the input for every
// kind.
std::vector<Vec> augment(const Vec& x, const std::vector<TransformSpec>& specs);

// Arithmetic mean of features over the stored items, in storage order.
Vec exemplar_mean(const ExemplarSet& set, const EmbedderParams& params);

}  // namespace codl
