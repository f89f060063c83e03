// codl — command-line front end: taxonomy queries, incremental training,
// evaluation, unsupervised pretraining and synthetic stream generation.
//
// Exit codes: 0 success, 1 I/O failure, 2 bad input, 3 infeasible budget.
// stdout carries the documented line formats only; progress goes to stderr
// and is controlled by CODL_LOG={quiet,info,debug} (default info).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "codl/classifier.hpp"
#include "codl/concept_graph.hpp"
#include "codl/corpus.hpp"
#include "codl/errors.hpp"
#include "codl/state_io.hpp"
#include "codl/trainer.hpp"

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("CODL_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "quiet") return 0;
        if (v == "debug") return 2;
        return 1;  // info, and the forgiving default for anything else
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << msg << "\n";
}

std::vector<std::size_t> parse_size_list(const std::string& text,
                                         const char* what) {
    std::vector<std::size_t> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(item, &pos);
            if (pos != item.size() || v < 0)
                throw codl::parse_error("");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw codl::parse_error(std::string("bad ") + what + " entry '" +
                                    item + "' in '" + text + "'");
        }
    }
    if (out.empty())
        throw codl::parse_error(std::string("empty ") + what + " list");
    return out;
}

codl::GridShape parse_grid(const std::string& text) {
    std::size_t a = text.find('x');
    std::size_t b = text.rfind('x');
    if (a == std::string::npos || b == a)
        throw codl::parse_error("grid must look like HxWxC, got '" + text +
                                "'");
    auto field = [&](std::size_t lo, std::size_t hi) -> std::size_t {
        const std::string part = text.substr(lo, hi - lo);
        try {
            std::size_t pos = 0;
            long long v = std::stoll(part, &pos);
            if (pos != part.size() || v < 1) throw codl::parse_error("");
            return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw codl::parse_error("bad grid dimension '" + part + "'");
        }
    };
    return {field(0, a), field(a + 1, b), field(b + 1, text.size())};
}

// kind:magnitude[:seed], e.g. jitter:0.05 or translate:1:7. Grid kinds pick
// up the shared --grid value.
codl::TransformSpec parse_augment(const std::string& text,
                                  const std::optional<codl::GridShape>& grid) {
    std::vector<std::string> parts;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3)
        throw codl::parse_error("augment spec must be kind:magnitude[:seed], "
                                "got '" + text + "'");
    codl::TransformSpec spec;
    spec.kind = codl::transform_kind_from_string(parts[0]);
    try {
        std::size_t pos = 0;
        spec.magnitude = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw codl::parse_error("");
    } catch (const std::exception&) {
        throw codl::parse_error("bad augment magnitude '" + parts[1] + "'");
    }
    if (parts.size() == 3) {
        try {
            std::size_t pos = 0;
            spec.seed = std::stoull(parts[2], &pos);
            if (pos != parts[2].size()) throw codl::parse_error("");
        } catch (const std::exception&) {
            throw codl::parse_error("bad augment seed '" + parts[2] + "'");
        }
    }
    const bool needs_grid = spec.kind == codl::TransformKind::translate ||
                            spec.kind == codl::TransformKind::rotate90 ||
                            spec.kind == codl::TransformKind::colorshift;
    if (needs_grid) {
        if (!grid)
            throw codl::parse_error("transform '" + parts[0] +
                                    "' needs --grid HxWxC");
        spec.grid = grid;
    }
    return spec;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw codl::io_error("cannot open '" + path + "' for writing");
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw codl::io_error("cannot create directory '" + dir + "'");
}

// Unreadable or missing input files count as bad input (exit 2); exit 1 is
// reserved for failures while producing output.
template <typename Fn>
auto as_input(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const codl::io_error& e) {
        throw codl::parse_error(e.what());
    }
}

// ---------------------------------------------------------------- graph ---

int run_graph(const std::string& graph_path, const std::string& action,
              const std::vector<std::string>& names) {
    codl::ConceptGraph graph;
    as_input([&] { graph.ingest_tsv_file(graph_path); return 0; });
    if (action == "ingest") {
        std::printf("concepts %zu\n", graph.size());
        std::printf("isa %zu\n", graph.isa_edges().size());
        std::printf("entities %zu\n", graph.counts().size());
        return 0;
    }
    if (action == "ancestors" || action == "attrs") {
        const codl::ConceptId id = graph.id_of(names.at(0));
        if (action == "ancestors") {
            for (codl::ConceptId a : graph.ancestors(id))
                std::printf("%s\n", graph.concept_at(a).name.c_str());
        } else {
            for (const std::string& attr : graph.inherited_attributes(id))
                std::printf("%s\n", attr.c_str());
        }
        return 0;
    }
    if (action == "tag") {
        const codl::TaggingResult result = graph.tag(names.at(0));
        for (const auto& [id, prob] : result.ranked)
            std::printf("%s %.6f\n", graph.concept_at(id).name.c_str(), prob);
        return 0;
    }
    // basic: chain of names, most specific first
    std::vector<codl::ConceptId> chain;
    for (const std::string& n : names) chain.push_back(graph.id_of(n));
    const codl::ConceptId winner = graph.basic_level(chain);
    std::printf("%s\n", graph.concept_at(winner).name.c_str());
    return 0;
}

// ---------------------------------------------------------------- train ---

std::vector<codl::EvalItem> eval_items(const codl::DatasetFile& ds,
                                       const codl::EngineState& state) {
    std::map<std::string, std::size_t> learned;
    for (std::size_t i = 0; i < state.learned_count(); ++i)
        learned[state.concept_name(i)] = i;
    std::vector<codl::EvalItem> items;
    items.reserve(ds.rows.size());
    for (const codl::DatasetRow& row : ds.rows) {
        auto it = learned.find(row.concept_name);
        if (it == learned.end())
            throw codl::parse_error("unknown concept '" + row.concept_name +
                                    "' in evaluation data");
        items.push_back({row.values, it->second});
    }
    return items;
}

void write_eval_rows(std::ofstream& out, std::uint64_t phase,
                     const codl::EngineState& state,
                     const codl::EvalReport& report) {
    out << phase << ",overall,,"
        << codl::format_double(report.overall_accuracy) << "\n";
    for (const auto& [index, acc] : report.per_concept_accuracy)
        out << phase << ",concept," << state.concept_name(index) << ","
            << codl::format_double(acc) << "\n";
}

struct TrainArgs {
    std::string manifest;
    std::string graph_tsv;
    std::string pretrain_state;
    std::string out_dir = ".";
    std::string hidden = "32";
    std::size_t feature_dim = 16;
    std::vector<std::string> augments;
    std::string grid_text;
    codl::TrainConfig config;
    bool normalize = true;
};

int run_train(const TrainArgs& args) {
    ensure_dir(args.out_dir);
    std::optional<codl::GridShape> grid;
    if (!args.grid_text.empty()) grid = parse_grid(args.grid_text);

    codl::EngineState state;
    if (!args.pretrain_state.empty()) {
        state = as_input([&] { return codl::load_state(args.pretrain_state); });
        log_info("warm start from '" + args.pretrain_state + "'");
    }
    state.config = args.config;
    for (const std::string& a : args.augments)
        state.config.augment_specs.push_back(parse_augment(a, grid));
    state.normalize_prototypes = args.normalize;
    if (!args.graph_tsv.empty())
        as_input([&] { state.graph.ingest_tsv_file(args.graph_tsv); return 0; });

    const std::vector<std::string> phase_files =
        as_input([&] { return codl::load_manifest(args.manifest); });

    std::ofstream metrics = open_output(args.out_dir + "/metrics.csv");
    metrics << "phase,epoch,classification_loss,distillation_loss\n";
    std::ofstream evals = open_output(args.out_dir + "/eval.csv");
    evals << "phase,kind,name,accuracy\n";

    codl::DatasetFile seen;  // accumulated training rows, the eval probe set
    for (const std::string& file : phase_files) {
        const codl::DatasetFile ds =
            as_input([&] { return codl::load_dataset(file); });
        if (state.params.trunk.empty() && state.params.config.input_dim == 0) {
            codl::EmbedderConfig ec;
            ec.input_dim = ds.dim;
            ec.hidden_dims = parse_size_list(args.hidden, "hidden dim");
            ec.feature_dim = args.feature_dim;
            ec.seed = state.config.seed;
            state.params = codl::init_embedder(ec);
        } else if (state.params.config.input_dim != ds.dim) {
            throw codl::parse_error(
                "dataset dimension " + std::to_string(ds.dim) +
                " does not match embedder input dimension " +
                std::to_string(state.params.config.input_dim));
        }
        const codl::PhaseBatch phase = codl::phase_from_dataset(ds);
        const std::uint64_t phase_no = state.phase_counter;
        codl::incremental_update(
            state, phase,
            [&](std::size_t epoch, const codl::LossBreakdown& loss) {
                metrics << phase_no << "," << epoch << ","
                        << codl::format_double(loss.classification) << ","
                        << codl::format_double(loss.distillation) << "\n";
                log_debug("phase " + std::to_string(phase_no) + " epoch " +
                          std::to_string(epoch) + " loss " +
                          codl::format_double(loss.total));
            });
        seen.dim = ds.dim;
        seen.rows.insert(seen.rows.end(), ds.rows.begin(), ds.rows.end());
        const codl::EvalReport report =
            codl::evaluate(state, eval_items(seen, state));
        write_eval_rows(evals, phase_no, state, report);
        log_info("phase " + std::to_string(phase_no) + ": " +
                 std::to_string(phase.new_concepts.size()) +
                 " new concepts, accuracy so far " +
                 codl::format_double(report.overall_accuracy));
    }

    metrics.close();
    evals.close();
    if (!metrics || !evals)
        throw codl::io_error("failed writing CSV output in '" + args.out_dir +
                             "'");
    codl::save_state(state, args.out_dir + "/state.codl");

    const codl::EvalReport final_report =
        codl::evaluate(state, eval_items(seen, state));
    std::printf("overall %.3f\n", final_report.overall_accuracy);
    return 0;
}

// ----------------------------------------------------------------- eval ---

int run_eval(const std::string& state_path, const std::string& dataset_path,
             const std::string& out_dir) {
    ensure_dir(out_dir);
    const codl::EngineState state =
        as_input([&] { return codl::load_state(state_path); });
    const codl::DatasetFile ds =
        as_input([&] { return codl::load_dataset(dataset_path); });
    if (ds.rows.empty())
        throw codl::parse_error("evaluation dataset '" + dataset_path +
                                "' has no rows");
    const codl::EvalReport report = codl::evaluate(state, eval_items(ds, state));

    std::ofstream out = open_output(out_dir + "/eval.csv");
    out << "phase,kind,name,accuracy\n";
    write_eval_rows(out, state.phase_counter, state, report);
    out.close();
    if (!out)
        throw codl::io_error("failed writing '" + out_dir + "/eval.csv'");

    std::printf("overall %.3f\n", report.overall_accuracy);
    for (const auto& [index, acc] : report.per_concept_accuracy)
        std::printf("%s %.3f\n", state.concept_name(index).c_str(), acc);
    return 0;
}

// ------------------------------------------------------------- pretrain ---

struct PretrainArgs {
    std::string dataset;
    std::string out_dir = ".";
    std::string hidden = "32";
    std::size_t feature_dim = 16;
    std::vector<std::string> augments;
    std::string grid_text;
    codl::TrainConfig config;
};

int run_pretrain(const PretrainArgs& args) {
    ensure_dir(args.out_dir);
    std::optional<codl::GridShape> grid;
    if (!args.grid_text.empty()) grid = parse_grid(args.grid_text);
    std::vector<codl::TransformSpec> specs;
    for (const std::string& a : args.augments)
        specs.push_back(parse_augment(a, grid));
    if (specs.empty())
        throw codl::parse_error("pretraining needs at least one --augment");

    const codl::DatasetFile ds =
        as_input([&] { return codl::load_dataset(args.dataset); });
    std::vector<codl::Vec> inputs;
    inputs.reserve(ds.rows.size());
    for (const codl::DatasetRow& row : ds.rows) inputs.push_back(row.values);

    codl::EmbedderConfig ec;
    ec.input_dim = ds.dim;
    ec.hidden_dims = parse_size_list(args.hidden, "hidden dim");
    ec.feature_dim = args.feature_dim;
    ec.seed = args.config.seed;

    const codl::PretrainResult result =
        codl::pretrain_unsupervised(inputs, specs, ec, args.config);

    codl::EngineState state;
    state.params = result.params;
    state.config = args.config;
    codl::save_state(state, args.out_dir + "/state.codl");
    log_info("pretrained trunk written to '" + args.out_dir + "/state.codl'");
    std::printf("surrogate_accuracy %.6f\n", result.surrogate_accuracy);
    return 0;
}

// ------------------------------------------------------------ gen-stream ---

struct GenStreamArgs {
    std::size_t concepts = 0;
    std::string phases;
    std::size_t dim = 0;
    std::size_t samples = 0;
    double scale = 1.0;
    double stddev = 1.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

int run_gen_stream(const GenStreamArgs& args) {
    ensure_dir(args.out_dir);
    codl::GaussianStreamSpec spec;
    spec.num_concepts = args.concepts;
    spec.phases = parse_size_list(args.phases, "phase size");
    spec.input_dim = args.dim;
    spec.samples_per_concept = args.samples;
    spec.cluster_mean_scale = args.scale;
    spec.cluster_std = args.stddev;
    spec.seed = args.seed;

    const std::vector<codl::PhaseBatch> stream = codl::gen_gaussian_stream(spec);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const std::string name = "phase_" + std::to_string(i) + ".csv";
        codl::save_dataset(codl::dataset_from_phase(stream[i]),
                           args.out_dir + "/" + name);
        names.push_back(name);  // manifest entries resolve against its dir
    }
    codl::save_manifest(names, args.out_dir + "/stream.manifest");

    const double sep =
        codl::min_pairwise_distance(codl::gaussian_means(spec));
    std::printf("min_separation %s\n", codl::format_double(sep).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"codl: concept-oriented incremental learner"};
    app.require_subcommand(1);

    // graph
    std::string graph_tsv;
    std::vector<std::string> graph_names;
    CLI::App* graph = app.add_subcommand(
        "graph", "query a concept taxonomy loaded from TSV");
    graph->require_subcommand(1);
    CLI::App* g_ingest =
        graph->add_subcommand("ingest", "validate a TSV and print a summary");
    g_ingest->add_option("tsv", graph_tsv, "taxonomy TSV file")->required();
    auto add_query = [&](const char* name, const char* help, bool multi) {
        CLI::App* sub = graph->add_subcommand(name, help);
        sub->add_option("--graph", graph_tsv, "taxonomy TSV file")->required();
        auto* opt = sub->add_option("name", graph_names,
                                    "concept or entity name(s)");
        opt->required();
        if (!multi) opt->expected(1);
        return sub;
    };
    CLI::App* g_anc =
        add_query("ancestors", "print all ancestors, one per line", false);
    CLI::App* g_attr =
        add_query("attrs", "print inherited attributes, one per line", false);
    CLI::App* g_tag =
        add_query("tag", "print 'concept probability' lines for an entity",
                  false);
    CLI::App* g_basic = add_query(
        "basic", "basic-level concept of an isA chain (most specific first)",
        true);

    // train
    TrainArgs t;
    CLI::App* train = app.add_subcommand(
        "train", "run incremental phases from a stream manifest");
    train->add_option("manifest", t.manifest, "stream manifest path")
        ->required();
    train->add_option("--graph", t.graph_tsv, "taxonomy TSV to pre-ingest");
    train->add_option("--pretrain", t.pretrain_state,
                      "state file with warm-start parameters");
    train->add_option("--seed", t.config.seed, "master RNG seed");
    train->add_option("--epochs", t.config.epochs, "epochs per phase");
    train->add_option("--lr", t.config.lr, "SGD learning rate");
    train->add_option("--batch-size", t.config.batch_size, "minibatch size");
    train->add_option("--budget", t.config.total_exemplar_budget,
                      "total exemplar budget K");
    train->add_flag("--normalize,!--no-normalize", t.normalize,
                    "L2-normalize features and prototypes for classification");
    train->add_option("--hidden", t.hidden, "hidden layer sizes, e.g. 64,32");
    train->add_option("--feature-dim", t.feature_dim, "feature dimension");
    train->add_option("--augment", t.augments,
                      "transform spec kind:magnitude[:seed], repeatable");
    train->add_option("--grid", t.grid_text, "grid shape HxWxC");
    train->add_option("--out", t.out_dir, "output directory");

    // eval
    std::string e_state, e_dataset, e_out = ".";
    CLI::App* eval =
        app.add_subcommand("eval", "evaluate a saved state on a dataset");
    eval->add_option("state", e_state, "state file")->required();
    eval->add_option("dataset", e_dataset, "dataset CSV")->required();
    eval->add_option("--out", e_out, "output directory");

    // pretrain
    PretrainArgs p;
    CLI::App* pretrain = app.add_subcommand(
        "pretrain", "unsupervised surrogate-class warm start");
    pretrain->add_option("dataset", p.dataset, "exemplar dataset CSV")
        ->required();
    pretrain->add_option("--seed", p.config.seed, "master RNG seed");
    pretrain->add_option("--epochs", p.config.epochs, "training epochs");
    pretrain->add_option("--lr", p.config.lr, "SGD learning rate");
    pretrain->add_option("--batch-size", p.config.batch_size,
                         "minibatch size");
    pretrain->add_option("--hidden", p.hidden, "hidden layer sizes");
    pretrain->add_option("--feature-dim", p.feature_dim, "feature dimension");
    pretrain->add_option("--augment", p.augments,
                         "transform spec kind:magnitude[:seed], repeatable")
        ->required();
    pretrain->add_option("--grid", p.grid_text, "grid shape HxWxC");
    pretrain->add_option("--out", p.out_dir, "output directory");

    // gen-stream
    GenStreamArgs g;
    CLI::App* gen = app.add_subcommand(
        "gen-stream", "generate a synthetic Gaussian concept stream");
    gen->add_option("--concepts", g.concepts, "total concept count")
        ->required();
    gen->add_option("--phases", g.phases, "concepts per phase, e.g. 2,2,2")
        ->required();
    gen->add_option("--dim", g.dim, "input dimension")->required();
    gen->add_option("--samples", g.samples, "samples per concept")->required();
    gen->add_option("--scale", g.scale, "cluster mean scale");
    gen->add_option("--std", g.stddev, "cluster standard deviation");
    gen->add_option("--seed", g.seed, "stream seed");
    gen->add_option("--out", g.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (g_ingest->parsed()) return run_graph(graph_tsv, "ingest", {});
        if (g_anc->parsed())
            return run_graph(graph_tsv, "ancestors", graph_names);
        if (g_attr->parsed()) return run_graph(graph_tsv, "attrs", graph_names);
        if (g_tag->parsed()) return run_graph(graph_tsv, "tag", graph_names);
        if (g_basic->parsed())
            return run_graph(graph_tsv, "basic", graph_names);
        if (train->parsed()) return run_train(t);
        if (eval->parsed()) return run_eval(e_state, e_dataset, e_out);
        if (pretrain->parsed()) return run_pretrain(p);
        if (gen->parsed()) return run_gen_stream(g);
    } catch (const codl::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const codl::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const codl::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
