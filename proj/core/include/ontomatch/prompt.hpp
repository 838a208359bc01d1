#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ontomatch/ontology.hpp"

namespace ontomatch {

/// An in-context demonstration: a concept pair plus its gold yes/no answer.
struct Exemplar {
  ConceptRepresentation source;
  ConceptRepresentation target;
  bool match = false;
};

/// A labeled pair available for few-shot selection.
struct LabeledPair {
  ConceptRepresentation source;
  ConceptRepresentation target;
  bool match = false;
};

/// Fully rendered classification prompt for one candidate pair.
struct PromptInstance {
  std::string text;
  std::string source_id;
  std::string target_id;
  Variant variant = Variant::C;
  std::size_t exemplar_count = 0;
};

/// Renders the fixed classification template. The C variant carries only the
/// two concept texts; CP/CC insert one "Parents:"/"Children:" line per
/// concept. Exemplars are prepended as complete blocks in the same template
/// with their gold answer filled in. Byte-deterministic.
/// Throws ContractError when the two representations disagree on variant.
PromptInstance render_prompt(const ConceptRepresentation& source_rep,
                             const ConceptRepresentation& target_rep,
                             const std::vector<Exemplar>& exemplars = {});

using PairKey = std::pair<std::string, std::string>;

/// Seeded, class-balanced selection of n exemplars from the labeled pool.
/// Pairs listed in `exclude` (the evaluation pairs) are never selected.
/// Throws ConfigError when the pool cannot supply n exemplars, or when
/// n >= 2 and one class is missing entirely.
std::vector<Exemplar> build_fewshot_exemplars(const std::vector<LabeledPair>& train_pairs,
                                              std::size_t n, std::uint64_t seed,
                                              const std::set<PairKey>& exclude = {});

}  // namespace ontomatch
