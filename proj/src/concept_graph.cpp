#include "codl/concept_graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "codl/errors.hpp"

namespace codl {

ConceptId ConceptGraph::add_concept(const std::string& name,
                                    const std::set<std::string>& attributes) {
    if (name.empty()) throw parse_error("add_concept: empty concept name");
    if (name_to_id_.count(name))
        throw parse_error("add_concept: duplicate concept name '" + name + "'");
    ConceptId id = static_cast<ConceptId>(concepts_.size());
    concepts_.push_back(Concept{id, name, attributes});
    name_to_id_.emplace(name, id);
    parents_.emplace_back();
    return id;
}

void ConceptGraph::check_id(ConceptId id, const char* who) const {
    if (id < 0 || static_cast<std::size_t>(id) >= concepts_.size())
        throw parse_error(std::string(who) + ": unknown concept id " +
                          std::to_string(id));
}

void ConceptGraph::add_isa(ConceptId child, ConceptId parent) {
    check_id(child, "add_isa");
    check_id(parent, "add_isa");
    if (child == parent)
        throw parse_error("add_isa: self-edge on concept '" +
                          concepts_[child].name + "'");
    // child would become reachable from itself iff child is already an
    // ancestor of parent.
    if (ancestors(parent).count(child))
        throw parse_error("add_isa: edge '" + concepts_[child].name +
                          "' isA '" + concepts_[parent].name +
                          "' would create a cycle");
    if (isa_edges_.insert({child, parent}).second)
        parents_[child].push_back(parent);
}

void ConceptGraph::add_attribute(ConceptId id, const std::string& attribute) {
    check_id(id, "add_attribute");
    concepts_[id].attributes.insert(attribute);
}

void ConceptGraph::add_instance_count(ConceptId id, const std::string& instance,
                                      std::uint64_t count) {
    check_id(id, "add_instance_count");
    counts_[instance][id] += count;
}

std::set<ConceptId> ConceptGraph::ancestors(ConceptId id) const {
    check_id(id, "ancestors");
    std::set<ConceptId> seen;
    std::deque<ConceptId> frontier{id};
    while (!frontier.empty()) {
        ConceptId cur = frontier.front();
        frontier.pop_front();
        for (ConceptId p : parents_[cur]) {
            if (seen.insert(p).second) frontier.push_back(p);
        }
    }
    seen.erase(id);
    return seen;
}

std::set<std::string> ConceptGraph::inherited_attributes(ConceptId id) const {
    check_id(id, "inherited_attributes");
    std::set<std::string> result = concepts_[id].attributes;
    for (ConceptId a : ancestors(id)) {
        const auto& attrs = concepts_[a].attributes;
        result.insert(attrs.begin(), attrs.end());
    }
    return result;
}

TaggingResult ConceptGraph::tag(const std::string& entity) const {
    TaggingResult result;
    auto it = counts_.find(entity);
    if (it == counts_.end()) return result;
    std::uint64_t total = 0;
    for (const auto& [id, count] : it->second) total += count;
    if (total == 0) return result;
    result.ranked.reserve(it->second.size());
    for (const auto& [id, count] : it->second)
        result.ranked.emplace_back(id,
                                   static_cast<double>(count) /
                                       static_cast<double>(total));
    // Descending probability; the map already yields ascending ids, and
    // stable_sort keeps that order among equals.
    std::stable_sort(result.ranked.begin(), result.ranked.end(),
                     [](const auto& a, const auto& b) {
                         return a.second > b.second;
                     });
    return result;
}

ConceptId ConceptGraph::basic_level(const std::vector<ConceptId>& chain) const {
    if (chain.empty()) throw parse_error("basic_level: empty chain");
    for (ConceptId id : chain) check_id(id, "basic_level");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        if (!ancestors(chain[i]).count(chain[i + 1]))
            throw parse_error("basic_level: '" + concepts_[chain[i + 1]].name +
                              "' is not an ancestor of '" +
                              concepts_[chain[i]].name + "'");
    }
    ConceptId best = chain[0];
    std::size_t best_score = 0;
    bool first = true;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        ConceptId c = chain[i];
        std::size_t informativeness = inherited_attributes(c).size();
        std::size_t distinctiveness = 0;
        if (i + 1 < chain.size()) {
            auto parent_attrs = inherited_attributes(chain[i + 1]);
            for (const auto& a : concepts_[c].attributes)
                if (!parent_attrs.count(a)) ++distinctiveness;
        } else {
            distinctiveness = concepts_[c].attributes.size();
        }
        std::size_t score = informativeness * distinctiveness;
        // Strict > keeps the deepest (earliest) element on ties.
        if (first || score > best_score) {
            best = c;
            best_score = score;
            first = false;
        }
    }
    return best;
}

bool ConceptGraph::has_concept(const std::string& name) const {
    return name_to_id_.count(name) != 0;
}

ConceptId ConceptGraph::id_of(const std::string& name) const {
    auto it = name_to_id_.find(name);
    if (it == name_to_id_.end())
        throw parse_error("unknown concept name '" + name + "'");
    return it->second;
}

const Concept& ConceptGraph::concept_at(ConceptId id) const {
    check_id(id, "concept");
    return concepts_[id];
}

ConceptId ConceptGraph::get_or_create(const std::string& name) {
    auto it = name_to_id_.find(name);
    if (it != name_to_id_.end()) return it->second;
    return add_concept(name);
}

namespace {
std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}
}  // namespace

void ConceptGraph::ingest_tsv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        auto fail = [&](const std::string& what) {
            throw parse_error("graph tsv line " + std::to_string(lineno) +
                              ": " + what);
        };
        const std::string& kind = fields[0];
        try {
        if (kind == "ISA") {
            if (fields.size() != 3) fail("ISA expects 3 fields");
            if (fields[1].empty() || fields[2].empty())
                fail("empty concept name");
            const ConceptId child = get_or_create(fields[1]);
            const ConceptId parent = get_or_create(fields[2]);
            add_isa(child, parent);
        } else if (kind == "ATTR") {
            if (fields.size() != 3) fail("ATTR expects 3 fields");
            if (fields[1].empty()) fail("empty concept name");
            add_attribute(get_or_create(fields[1]), fields[2]);
        } else if (kind == "INST") {
            if (fields.size() != 4) fail("INST expects 4 fields");
            if (fields[1].empty()) fail("empty concept name");
            std::uint64_t count = 0;
            try {
                std::size_t used = 0;
                count = std::stoull(fields[3], &used);
                if (used != fields[3].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                fail("bad count '" + fields[3] + "'");
            }
            add_instance_count(get_or_create(fields[1]), fields[2], count);
        } else {
            fail("unknown record kind '" + kind + "'");
        }
        } catch (const parse_error& e) {
            std::string msg = e.what();
            if (msg.rfind("graph tsv line", 0) == 0) throw;
            fail(msg);
        }
    }
}

void ConceptGraph::ingest_tsv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open graph tsv '" + path + "'");
    try {
        ingest_tsv(in);
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

}  // namespace codl
