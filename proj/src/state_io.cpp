#include "codl/state_io.hpp"

#include <fstream>

#include <json.hpp>

#include "codl/errors.hpp"

namespace codl {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.data = j.at("data").get<Vec>();
    if (m.data.size() != m.rows * m.cols)
        throw parse_error("state file: matrix data does not match its shape");
    return m;
}

json specs_to_json(const std::vector<TransformSpec>& specs) {
    json arr = json::array();
    for (const auto& spec : specs) {
        json j{{"kind", to_string(spec.kind)},
               {"magnitude", spec.magnitude},
               {"seed", spec.seed}};
        if (spec.grid)
            j["grid"] = {spec.grid->height, spec.grid->width,
                         spec.grid->channels};
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<TransformSpec> specs_from_json(const json& arr) {
    std::vector<TransformSpec> specs;
    for (const auto& j : arr) {
        TransformSpec spec;
        spec.kind = transform_kind_from_string(j.at("kind").get<std::string>());
        spec.magnitude = j.at("magnitude").get<double>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("grid")) {
            auto g = j.at("grid");
            spec.grid = GridShape{g.at(0).get<std::size_t>(),
                                  g.at(1).get<std::size_t>(),
                                  g.at(2).get<std::size_t>()};
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

void require_finite(const Vec& v, const char* what) {
    if (!all_finite(v))
        throw std::invalid_argument(std::string("save_state: non-finite ") +
                                    what);
}

}  // namespace

void save_state(const EngineState& state, const std::string& path) {
    json doc;
    doc["version"] = kStateVersion;
    doc["phase_counter"] = state.phase_counter;
    doc["normalize"] = state.normalize_prototypes;

    doc["config"] = {{"epochs", state.config.epochs},
                     {"batch_size", state.config.batch_size},
                     {"lr", state.config.lr},
                     {"budget", state.config.total_exemplar_budget},
                     {"seed", state.config.seed},
                     {"augment_specs",
                      specs_to_json(state.config.augment_specs)}};

    const auto& p = state.params;
    json trunk = json::array();
    for (const auto& layer : p.trunk) {
        require_finite(layer.w.data, "trunk weights");
        require_finite(layer.b, "trunk biases");
        trunk.push_back({{"w", matrix_to_json(layer.w)}, {"b", layer.b}});
    }
    require_finite(p.head_w.data, "head weights");
    require_finite(p.head_b, "head biases");
    doc["embedder"] = {
        {"config",
         {{"input_dim", p.config.input_dim},
          {"hidden_dims", p.config.hidden_dims},
          {"feature_dim", p.config.feature_dim},
          {"activation", p.config.activation},
          {"seed", p.config.seed}}},
        {"trunk", std::move(trunk)},
        {"head", {{"w", matrix_to_json(p.head_w)}, {"b", p.head_b}}}};

    json concepts = json::array();
    for (const auto& c : state.graph.concepts())
        concepts.push_back({{"name", c.name}, {"attributes", c.attributes}});
    json isa = json::array();
    for (const auto& [child, parent] : state.graph.isa_edges())
        isa.push_back({child, parent});
    json counts = json::array();
    for (const auto& [entity, per_concept] : state.graph.counts())
        for (const auto& [cid, count] : per_concept)
            counts.push_back({entity, cid, count});
    doc["graph"] = {{"concepts", std::move(concepts)},
                    {"isa", std::move(isa)},
                    {"counts", std::move(counts)}};

    doc["learned"] = state.learned_to_graph;
    doc["concept_phase"] = state.concept_phase;
    doc["instance_metadata"] = state.instance_metadata;

    json exemplars = json::array();
    for (const auto& set : state.exemplar_sets) {
        for (const auto& item : set.items) require_finite(item, "exemplar");
        exemplars.push_back({{"concept", set.concept_id},
                             {"provenance", set.provenance},
                             {"items", set.items}});
    }
    doc["exemplars"] = std::move(exemplars);

    std::ofstream out(path);
    if (!out) throw io_error("cannot write state file '" + path + "'");
    out << doc.dump(1) << "\n";
    if (!out) throw io_error("failed writing state file '" + path + "'");
}

EngineState load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open state file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw parse_error("state file '" + path + "' is corrupt: " + e.what());
    }

    try {
        if (!doc.contains("version") ||
            doc.at("version").get<std::string>() != kStateVersion)
            throw parse_error("state file '" + path +
                              "': version mismatch (expected " +
                              std::string(kStateVersion) + ")");

        EngineState state;
        state.phase_counter = doc.at("phase_counter").get<std::uint64_t>();
        state.normalize_prototypes = doc.at("normalize").get<bool>();

        const auto& cfg = doc.at("config");
        state.config.epochs = cfg.at("epochs").get<std::size_t>();
        state.config.batch_size = cfg.at("batch_size").get<std::size_t>();
        state.config.lr = cfg.at("lr").get<double>();
        state.config.total_exemplar_budget =
            cfg.at("budget").get<std::size_t>();
        state.config.seed = cfg.at("seed").get<std::uint64_t>();
        state.config.augment_specs =
            specs_from_json(cfg.at("augment_specs"));

        const auto& emb = doc.at("embedder");
        const auto& ec = emb.at("config");
        state.params.config.input_dim = ec.at("input_dim").get<std::size_t>();
        state.params.config.hidden_dims =
            ec.at("hidden_dims").get<std::vector<std::size_t>>();
        state.params.config.feature_dim =
            ec.at("feature_dim").get<std::size_t>();
        state.params.config.activation =
            ec.at("activation").get<std::string>();
        state.params.config.seed = ec.at("seed").get<std::uint64_t>();
        for (const auto& jl : emb.at("trunk")) {
            EmbedderParams::Layer layer;
            layer.w = matrix_from_json(jl.at("w"));
            layer.b = jl.at("b").get<Vec>();
            if (layer.b.size() != layer.w.rows)
                throw parse_error("state file: trunk bias width mismatch");
            state.params.trunk.push_back(std::move(layer));
        }
        state.params.head_w = matrix_from_json(emb.at("head").at("w"));
        state.params.head_b = emb.at("head").at("b").get<Vec>();
        if (state.params.head_b.size() != state.params.head_w.rows)
            throw parse_error("state file: head bias width mismatch");

        const auto& jg = doc.at("graph");
        for (const auto& jc : jg.at("concepts"))
            state.graph.add_concept(
                jc.at("name").get<std::string>(),
                jc.at("attributes").get<std::set<std::string>>());
        for (const auto& je : jg.at("isa"))
            state.graph.add_isa(je.at(0).get<ConceptId>(),
                                je.at(1).get<ConceptId>());
        for (const auto& jc : jg.at("counts"))
            state.graph.add_instance_count(jc.at(1).get<ConceptId>(),
                                           jc.at(0).get<std::string>(),
                                           jc.at(2).get<std::uint64_t>());

        state.learned_to_graph =
            doc.at("learned").get<std::vector<ConceptId>>();
        state.concept_phase =
            doc.at("concept_phase").get<std::vector<std::uint64_t>>();
        state.instance_metadata =
            doc.at("instance_metadata").get<std::vector<std::string>>();
        for (ConceptId gid : state.learned_to_graph)
            state.graph.concept_at(gid);  // validates the id

        for (const auto& js : doc.at("exemplars")) {
            ExemplarSet set;
            set.concept_id = js.at("concept").get<int>();
            set.provenance =
                js.at("provenance").get<std::vector<std::size_t>>();
            set.items = js.at("items").get<std::vector<Vec>>();
            if (set.items.size() != set.provenance.size())
                throw parse_error(
                    "state file: exemplar provenance width mismatch");
            state.exemplar_sets.push_back(std::move(set));
        }
        if (state.exemplar_sets.size() != state.learned_to_graph.size() ||
            state.learned_to_graph.size() != state.params.num_concepts() ||
            state.concept_phase.size() != state.learned_to_graph.size() ||
            state.instance_metadata.size() != state.learned_to_graph.size())
            throw parse_error("state file: inconsistent concept registries");
        return state;
    } catch (const json::exception& e) {
        throw parse_error("state file '" + path + "' is corrupt: " + e.what());
    }
}

}  // namespace codl
