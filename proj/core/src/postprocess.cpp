#include "ontomatch/postprocess.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace ontomatch {

namespace {

// Total order: (s_llm desc, s_ir desc, source_id asc, target_id asc),
// absent s_llm treated as 0.
bool mapping_precedes(const Mapping& a, const Mapping& b) {
  const double al = a.s_llm.value_or(0.0);
  const double bl = b.s_llm.value_or(0.0);
  if (al != bl) return al > bl;
  if (a.s_ir != b.s_ir) return a.s_ir > b.s_ir;
  if (a.source_id != b.source_id) return a.source_id < b.source_id;
  return a.target_id < b.target_id;
}

}  // namespace

std::vector<MatchDecision> confidence_filter(const std::vector<MatchDecision>& decisions,
                                             double threshold) {
  std::vector<MatchDecision> kept;
  for (const auto& d : decisions) {
    if (d.predicted_class == MatchClass::yes && d.s_llm > threshold) {
      kept.push_back(d);
    }
  }
  return kept;
}

std::vector<Mapping> high_precision_matches(const std::vector<CandidatePair>& candidates,
                                            const std::vector<MatchDecision>& decisions,
                                            double threshold) {
  std::map<std::pair<std::string, std::string>, double> llm_scores;
  for (const auto& d : decisions) {
    auto [it, inserted] = llm_scores.emplace(std::make_pair(d.source_id, d.target_id), d.s_llm);
    if (!inserted && d.s_llm > it->second) it->second = d.s_llm;  // order-independent under duplicates
  }

  std::vector<Mapping> out;
  for (const auto& c : candidates) {
    if (!(c.s_ir > threshold)) continue;
    Mapping m;
    m.source_id = c.source_id;
    m.target_id = c.target_id;
    m.s_ir = c.s_ir;
    m.origin = MappingOrigin::exact;
    auto it = llm_scores.find({c.source_id, c.target_id});
    if (it != llm_scores.end()) m.s_llm = it->second;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Mapping> cardinality_filter(std::vector<Mapping> pool) {
  std::sort(pool.begin(), pool.end(), mapping_precedes);

  std::set<std::string> used_sources, used_targets;
  std::vector<Mapping> kept;
  for (auto& m : pool) {
    if (used_sources.count(m.source_id) > 0 || used_targets.count(m.target_id) > 0) continue;
    used_sources.insert(m.source_id);
    used_targets.insert(m.target_id);
    kept.push_back(std::move(m));
  }
  return kept;
}

Alignment assemble_alignment(const std::vector<MatchDecision>& llm_kept,
                             const std::vector<Mapping>& exact, std::string source_ontology,
                             std::string target_ontology, std::string config_fingerprint) {
  std::map<std::pair<std::string, std::string>, Mapping> pool;

  // Total preference order so de-duplication is invariant to input order:
  // higher s_llm, then higher s_ir, then llm origin, then a present s_llm.
  auto prefer = [](const Mapping& a, const Mapping& b) {
    const double al = a.s_llm.value_or(0.0), bl = b.s_llm.value_or(0.0);
    if (al != bl) return al > bl;
    if (a.s_ir != b.s_ir) return a.s_ir > b.s_ir;
    if (a.origin != b.origin) return a.origin == MappingOrigin::llm;
    return a.s_llm.has_value() && !b.s_llm.has_value();
  };
  auto offer = [&pool, &prefer](Mapping m) {
    auto key = std::make_pair(m.source_id, m.target_id);
    auto it = pool.find(key);
    if (it == pool.end()) {
      pool.emplace(std::move(key), std::move(m));
    } else if (prefer(m, it->second)) {
      it->second = std::move(m);
    }
  };

  for (const auto& d : llm_kept) {
    Mapping m;
    m.source_id = d.source_id;
    m.target_id = d.target_id;
    m.s_ir = d.s_ir;
    m.s_llm = d.s_llm;
    m.origin = MappingOrigin::llm;
    offer(std::move(m));
  }
  for (const auto& m : exact) offer(m);

  std::vector<Mapping> flat;
  flat.reserve(pool.size());
  for (auto& [key, m] : pool) flat.push_back(std::move(m));

  Alignment alignment;
  alignment.mappings = cardinality_filter(std::move(flat));
  alignment.source_ontology = std::move(source_ontology);
  alignment.target_ontology = std::move(target_ontology);
  alignment.config_fingerprint = std::move(config_fingerprint);
  return alignment;
}

}  // namespace ontomatch
