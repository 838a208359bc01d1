#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>

namespace ontomatch {

enum class ReferenceFormat { native, alignment_xml };

/// Gold-standard equivalence pairs for one matching task.
struct ReferenceAlignment {
  std::set<std::pair<std::string, std::string>> pairs;  // (source_id, target_id)
  std::string name;

  bool contains(const std::string& source_id, const std::string& target_id) const {
    return pairs.find({source_id, target_id}) != pairs.end();
  }
};

/// native: JSON `{ "name": text, "pairs": [ { "source", "target" } ] }` (a bare
/// array of records is also accepted).
/// alignment_xml: an RDF/XML-shaped alignment document; every Cell whose
/// relation is "=" contributes its entity1/entity2 resources, other relations
/// are ignored, measure values are not read. Identifiers are extracted
/// bit-exactly apart from XML entity decoding.
/// Throws ParseError on malformed input and MetricError when no equivalence
/// pair survives.
ReferenceAlignment parse_reference_alignment(std::string_view document, ReferenceFormat format);

}  // namespace ontomatch
