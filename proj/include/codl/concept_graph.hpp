#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace codl {

using ConceptId = int;

struct Concept {
    ConceptId id = -1;
    std::string name;
    std::set<std::string> attributes;  // own attributes only
};

struct TaggingResult {
    // (concept id, probability), descending probability, id ascending on ties.
    std::vector<std::pair<ConceptId, double>> ranked;

    bool empty() const { return ranked.empty(); }
};

// Local conceptual knowledge base: an isA DAG with attribute inheritance and
// count-based probabilistic tagging of instance names.
//
// Mutation is single-writer; all query methods are const and safe to run
// concurrently once construction is done. The graph is a plain value and can
// be copied or moved across threads.
class ConceptGraph {
public:
    // Registers a concept under the next dense id. Throws parse_error on an
    // empty or duplicate name.
    ConceptId add_concept(const std::string& name,
                          const std::set<std::string>& attributes = {});

    // Records child isA parent. Rejects unknown ids, self-edges and any edge
    // that would close a cycle (the relation must stay asymmetric).
    void add_isa(ConceptId child, ConceptId parent);

    // Adds an own attribute to an existing concept.
    void add_attribute(ConceptId id, const std::string& attribute);

    // Bumps the (concept, instance) occurrence count used by tag().
    void add_instance_count(ConceptId id, const std::string& instance,
                            std::uint64_t count);

    // Exact transitive closure over isA edges, excluding the concept itself.
    std::set<ConceptId> ancestors(ConceptId id) const;

    // Own attributes plus the attributes of every ancestor.
    std::set<std::string> inherited_attributes(ConceptId id) const;

    // Count-proportional concept distribution for an instance name. Unknown
    // entities yield an empty ranking.
    TaggingResult tag(const std::string& entity) const;

    // Picks the basic-level concept of an isA chain, given most specific
    // first (each element must be an ancestor of its predecessor). Score is
    // |inherited attributes| times |own attributes not inherited from the
    // chain parent|; ties go to the deepest (earliest) element.
    ConceptId basic_level(const std::vector<ConceptId>& chain) const;

    bool has_concept(const std::string& name) const;
    ConceptId id_of(const std::string& name) const;  // throws if unknown
    const Concept& concept_at(ConceptId id) const;      // throws if unknown
    std::size_t size() const { return concepts_.size(); }

    const std::vector<Concept>& concepts() const { return concepts_; }
    const std::set<std::pair<ConceptId, ConceptId>>& isa_edges() const {
        return isa_edges_;
    }
    const std::map<std::string, std::map<ConceptId, std::uint64_t>>& counts()
        const {
        return counts_;
    }

    // TSV ingestion. Row kinds:
    //   ISA <tab> child_name <tab> parent_name
    //   ATTR <tab> concept_name <tab> attribute
    //   INST <tab> concept_name <tab> instance_name <tab> count
    // Unknown concept names auto-create concepts with empty attribute sets.
    // Throws parse_error with the offending line number on malformed rows.
    void ingest_tsv(std::istream& in);
    void ingest_tsv_file(const std::string& path);

private:
    void check_id(ConceptId id, const char* who) const;
    ConceptId get_or_create(const std::string& name);

    std::vector<Concept> concepts_;
    std::unordered_map<std::string, ConceptId> name_to_id_;
    std::vector<std::vector<ConceptId>> parents_;  // child -> direct parents
    std::set<std::pair<ConceptId, ConceptId>> isa_edges_;
    // entity -> concept -> count; ordered maps keep tagging and
    // serialization deterministic.
    std::map<std::string, std::map<ConceptId, std::uint64_t>> counts_;
};

}  // namespace codl
