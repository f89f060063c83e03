#include "codl/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "codl/errors.hpp"
#include "codl/rng.hpp"

namespace codl {

namespace {

constexpr std::uint64_t kMeanStream = 0x6d65616e;    // cluster directions
constexpr std::uint64_t kSampleStream = 0x73616d70;  // per-concept samples

void validate_spec(const GaussianStreamSpec& spec) {
    if (spec.num_concepts == 0 || spec.input_dim == 0 ||
        spec.samples_per_concept == 0)
        throw std::invalid_argument("gaussian stream spec: zero-sized field");
    if (spec.cluster_std <= 0.0)
        throw std::invalid_argument("gaussian stream spec: std must be > 0");
    std::size_t total = 0;
    for (std::size_t p : spec.phases) total += p;
    if (spec.phases.empty() || total != spec.num_concepts)
        throw std::invalid_argument(
            "gaussian stream spec: phase counts must sum to num_concepts");
}

}  // namespace

std::vector<Vec> gaussian_means(const GaussianStreamSpec& spec) {
    validate_spec(spec);
    std::vector<Vec> means;
    means.reserve(spec.num_concepts);
    for (std::size_t c = 0; c < spec.num_concepts; ++c) {
        Vec mean(spec.input_dim, 0.0);
        if (c < 2 * spec.input_dim) {
            double sign = (c % 2 == 0) ? 1.0 : -1.0;
            mean[c / 2] = sign * spec.cluster_mean_scale;
        } else {
            Rng rng(derive_seed(spec.seed, kMeanStream, c));
            double n = 0.0;
            while (n == 0.0) {
                for (double& v : mean) v = rng.normal();
                n = norm(mean);
            }
            for (double& v : mean) v *= spec.cluster_mean_scale / n;
        }
        means.push_back(std::move(mean));
    }
    return means;
}

double min_pairwise_distance(const std::vector<Vec>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best,
                            std::sqrt(squared_distance(points[i], points[j])));
    return best;
}

std::vector<PhaseBatch> gen_gaussian_stream(const GaussianStreamSpec& spec) {
    std::vector<Vec> means = gaussian_means(spec);
    std::vector<PhaseBatch> stream;
    stream.reserve(spec.phases.size());
    std::size_t cidx = 0;
    for (std::size_t count : spec.phases) {
        PhaseBatch batch;
        for (std::size_t local = 0; local < count; ++local, ++cidx) {
            batch.new_concepts.push_back(
                {"concept_" + std::to_string(cidx), ""});
            Rng rng(derive_seed(spec.seed, kSampleStream, cidx));
            for (std::size_t s = 0; s < spec.samples_per_concept; ++s) {
                Vec x(spec.input_dim);
                for (std::size_t d = 0; d < spec.input_dim; ++d)
                    x[d] = means[cidx][d] + spec.cluster_std * rng.normal();
                batch.samples.push_back({std::move(x), local});
            }
        }
        stream.push_back(std::move(batch));
    }
    return stream;
}

DatasetFile gen_synthetic_images(std::size_t n, const GridShape& grid,
                                 std::uint64_t seed) {
    if (grid.height == 0 || grid.width == 0 || grid.channels == 0)
        throw std::invalid_argument("gen_synthetic_images: bad grid");
    DatasetFile file;
    file.dim = grid.flat_size();
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        DatasetRow row;
        row.concept_name = "img_" + std::to_string(i);
        row.values.resize(file.dim);
        for (double& v : row.values) v = rng.next_unit();
        file.rows.push_back(std::move(row));
    }
    return file;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void check_name_field(const std::string& s, const char* what) {
    if (s.find(',') != std::string::npos ||
        s.find('\n') != std::string::npos ||
        s.find('\r') != std::string::npos)
        throw std::invalid_argument(std::string("save_dataset: ") + what +
                                    " may not contain commas or newlines");
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string header_for(std::size_t dim) {
    std::string header = "concept,instance";
    for (std::size_t d = 0; d < dim; ++d)
        header += ",x" + std::to_string(d);
    return header;
}

double parse_double(const std::string& field, std::size_t lineno) {
    const char* begin = field.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + field.size() || field.empty())
        throw parse_error("dataset line " + std::to_string(lineno) +
                          ": non-numeric field '" + field + "'");
    return v;
}

}  // namespace

void save_dataset(const DatasetFile& file, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write dataset '" + path + "'");
    out << header_for(file.dim) << "\n";
    for (const auto& row : file.rows) {
        if (row.values.size() != file.dim)
            throw std::invalid_argument(
                "save_dataset: row width differs from file dim");
        check_name_field(row.concept_name, "concept name");
        check_name_field(row.instance, "instance name");
        out << row.concept_name << ',' << row.instance;
        for (double v : row.values) out << ',' << format_double(v);
        out << "\n";
    }
    if (!out) throw io_error("failed writing dataset '" + path + "'");
}

DatasetFile load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw parse_error("dataset '" + path + "': missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string header = line;
    auto head_fields = split_commas(header);
    if (head_fields.size() < 2 || head_fields[0] != "concept" ||
        head_fields[1] != "instance")
        throw parse_error("dataset '" + path + "': bad header");
    for (std::size_t d = 2; d < head_fields.size(); ++d)
        if (head_fields[d] != "x" + std::to_string(d - 2))
            throw parse_error("dataset '" + path + "': bad header column '" +
                              head_fields[d] + "'");

    DatasetFile file;
    file.dim = head_fields.size() - 2;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line == header)
            throw parse_error("dataset line " + std::to_string(lineno) +
                              ": duplicate header");
        auto fields = split_commas(line);
        if (fields.size() != file.dim + 2)
            throw parse_error("dataset line " + std::to_string(lineno) +
                              ": expected " + std::to_string(file.dim + 2) +
                              " fields, got " + std::to_string(fields.size()));
        DatasetRow row;
        row.concept_name = fields[0];
        row.instance = fields[1];
        row.values.reserve(file.dim);
        for (std::size_t d = 0; d < file.dim; ++d)
            row.values.push_back(parse_double(fields[d + 2], lineno));
        file.rows.push_back(std::move(row));
    }
    return file;
}

PhaseBatch phase_from_dataset(const DatasetFile& file) {
    PhaseBatch phase;
    std::unordered_map<std::string, std::size_t> local_of;
    for (const auto& row : file.rows) {
        auto it = local_of.find(row.concept_name);
        std::size_t local;
        if (it == local_of.end()) {
            local = phase.new_concepts.size();
            local_of.emplace(row.concept_name, local);
            phase.new_concepts.push_back({row.concept_name, row.instance});
        } else {
            local = it->second;
        }
        phase.samples.push_back({row.values, local});
    }
    return phase;
}

DatasetFile dataset_from_phase(const PhaseBatch& phase) {
    DatasetFile file;
    if (!phase.samples.empty()) file.dim = phase.samples[0].input.size();
    for (const auto& s : phase.samples) {
        const auto& nc = phase.new_concepts[s.local_concept];
        file.rows.push_back({nc.name, nc.instance, s.input});
    }
    return file;
}

std::vector<std::string> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open stream manifest '" + path + "'");
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    std::vector<std::string> files;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::filesystem::path p(line);
        if (p.is_relative()) p = base / p;
        files.push_back(p.string());
    }
    if (files.empty())
        throw parse_error("stream manifest '" + path + "' lists no files");
    return files;
}

void save_manifest(const std::vector<std::string>& phase_files,
                   const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write stream manifest '" + path + "'");
    for (const auto& f : phase_files) out << f << "\n";
    if (!out) throw io_error("failed writing stream manifest '" + path + "'");
}

}  // namespace codl
