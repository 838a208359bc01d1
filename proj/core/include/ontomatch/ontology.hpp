#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ontomatch {

enum class Role { source, target };

/// The three concept input representations: the concept alone, the concept
/// with its direct parents, the concept with its direct children.
enum class Variant { C, CP, CC };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);  // throws ConfigError on unknown value

struct Concept {
  std::string id;
  std::string label;
  std::vector<std::string> synonyms;
  std::vector<std::string> parent_ids;
  std::vector<std::string> child_ids;
};

/// Parsed concept graph. Immutable after construction; edges are kept
/// mutually consistent (x in parents(y) iff y in children(x)) and free of
/// self-loops.
class Ontology {
 public:
  Ontology() = default;
  Ontology(std::string name, Role role, std::vector<Concept> concepts);

  const std::string& name() const noexcept { return name_; }
  Role role() const noexcept { return role_; }
  const std::vector<Concept>& concepts() const noexcept { return concepts_; }
  std::size_t size() const noexcept { return concepts_.size(); }

  bool contains(std::string_view id) const;
  /// Throws NotFoundError for unknown ids.
  const Concept& at(std::string_view id) const;

 private:
  std::string name_;
  Role role_ = Role::source;
  std::vector<Concept> concepts_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// One concept rendered under a variant. This is the unit that gets embedded,
/// retrieved and substituted into prompts.
struct ConceptRepresentation {
  std::string concept_id;
  Variant variant = Variant::C;
  std::string core_text;                   // normalized label + synonyms
  std::vector<std::string> context_texts;  // normalized parent/child labels, in declared order
};

/// Parse the native exchange format: a UTF-8 JSON object
///   { "name": text, "concepts": [ { "id", "label", "synonyms"[], "parents"[], "children"[] } ] }
/// Missing reverse edges are added by closure; duplicate ids, dangling edge
/// references, self-loops and empty normalized labels are rejected.
Ontology parse_ontology(std::string_view document, Role role);
Ontology parse_ontology(std::istream& document, Role role);

ConceptRepresentation build_representation(const Ontology& ontology, std::string_view concept_id,
                                           Variant variant);

/// Flatten a representation into the single text handed to embedding
/// providers: the core text, followed for CP/CC by a ", parents: ..." /
/// ", children: ..." clause when context is present.
std::string verbalize_representation(const ConceptRepresentation& rep);

/// Stable content hash over name plus every concept field, in document order.
/// Keys knowledge-base cache files.
std::uint64_t ontology_content_hash(const Ontology& ontology);

}  // namespace ontomatch
