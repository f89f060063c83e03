#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codl/engine_state.hpp"
#include "codl/exemplar.hpp"

namespace codl {

// Desk-scale synthetic concept stream: each concept is an isotropic Gaussian
// around a deterministically placed mean on a hypersphere of radius
// cluster_mean_scale, and phases partition the concepts in order.
struct GaussianStreamSpec {
    std::size_t num_concepts = 0;
    std::vector<std::size_t> phases;  // concepts per phase, sums to total
    std::size_t input_dim = 0;
    std::size_t samples_per_concept = 0;
    double cluster_mean_scale = 1.0;
    double cluster_std = 1.0;
    std::uint64_t seed = 0;
};

struct DatasetRow {
    std::string concept_name;
    std::string instance;  // optional, empty when absent
    Vec values;
};

struct DatasetFile {
    std::size_t dim = 0;
    std::vector<DatasetRow> rows;
};

// Cluster means for a spec: signed coordinate axes while they last (pairwise
// distance scale * sqrt(2) guaranteed), seeded unit directions beyond. The
// minimum pairwise separation is reproducible, so fixtures can assert it.
std::vector<Vec> gaussian_means(const GaussianStreamSpec& spec);

double min_pairwise_distance(const std::vector<Vec>& points);

std::vector<PhaseBatch> gen_gaussian_stream(const GaussianStreamSpec& spec);

// Seeded pixel grids in [0, 1), flattened row-major; fixture data for the
// grid transforms and for pretraining exemplars.
DatasetFile gen_synthetic_images(std::size_t n, const GridShape& grid,
                                 std::uint64_t seed);

// CSV with header `concept,instance,x0,...`; values as decimal text with 17
// significant digits so load(save(f)) reproduces f exactly.
void save_dataset(const DatasetFile& file, const std::string& path);
DatasetFile load_dataset(const std::string& path);

// Concept names in first-appearance order become the phase's new concepts;
// each concept's instance metadata is taken from its first row.
PhaseBatch phase_from_dataset(const DatasetFile& file);
DatasetFile dataset_from_phase(const PhaseBatch& phase);

// Stream manifest: one phase-file path per line, resolved against the
// manifest's own directory.
std::vector<std::string> load_manifest(const std::string& path);
void save_manifest(const std::vector<std::string>& phase_files,
                   const std::string& path);

// 17-significant-digit decimal text, the round-trip format used by every
// CSV surface.
std::string format_double(double v);

}  // namespace codl
