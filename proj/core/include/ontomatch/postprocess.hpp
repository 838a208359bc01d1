#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ontomatch/llm.hpp"

namespace ontomatch {

enum class MappingOrigin { llm, exact };

/// A surviving correspondence. llm-origin mappings passed the confidence
/// filter (s_llm > threshold); exact-origin mappings passed the high-precision
/// retrieval filter (s_ir > threshold). s_llm is absent for exact matches the
/// LLM never judged.
struct Mapping {
  std::string source_id;
  std::string target_id;
  double s_ir = 0.0;
  std::optional<double> s_llm;
  MappingOrigin origin = MappingOrigin::llm;
};

/// Final one-to-one alignment: no source and no target appears twice.
struct Alignment {
  std::vector<Mapping> mappings;
  std::string source_ontology;
  std::string target_ontology;
  std::string config_fingerprint;
};

/// Stage 1: drop "no" verdicts, keep "yes" decisions with s_llm strictly
/// above the threshold.
std::vector<MatchDecision> confidence_filter(const std::vector<MatchDecision>& decisions,
                                             double threshold = 0.7);

/// Stage 2: retrieval-score matcher. Emits an exact-origin Mapping for every
/// candidate with s_ir strictly above the threshold, carrying the pair's LLM
/// confidence when a decision exists.
std::vector<Mapping> high_precision_matches(const std::vector<CandidatePair>& candidates,
                                            const std::vector<MatchDecision>& decisions,
                                            double threshold = 0.9);

/// Stage 3: greedy 1:1 selection. Sorts by (s_llm desc, s_ir desc, source_id
/// asc, target_id asc) — absent s_llm counts as 0 — and accepts a mapping iff
/// neither endpoint is taken. Deterministic and invariant to input order.
std::vector<Mapping> cardinality_filter(std::vector<Mapping> pool);

/// Union of the confidence-filtered LLM verdicts and the exact matches,
/// de-duplicated per pair (higher s_llm wins, llm origin on ties), then
/// cardinality-filtered.
Alignment assemble_alignment(const std::vector<MatchDecision>& llm_kept,
                             const std::vector<Mapping>& exact, std::string source_ontology,
                             std::string target_ontology, std::string config_fingerprint);

}  // namespace ontomatch
