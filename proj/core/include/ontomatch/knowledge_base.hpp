#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ontomatch/embedding.hpp"
#include "ontomatch/ontology.hpp"
#include "ontomatch/reference.hpp"

namespace ontomatch {

/// One source/target candidate produced by top-k retrieval, scored by cosine
/// similarity.
struct CandidatePair {
  std::string source_id;
  std::string target_id;
  double s_ir = 0.0;
};

/// Embedding knowledge base over every target concept, one entry per concept
/// in ontology order. Immutable after build.
struct KnowledgeBase {
  struct Entry {
    std::string concept_id;
    EmbeddingVector vector;
  };

  std::vector<Entry> entries;
  std::string provider_name;
  Variant variant = Variant::C;
  std::uint64_t ontology_hash = 0;
};

/// Embeds the verbalized representation of every target concept, batching
/// provider calls. Provider errors are re-raised with the failed batch range.
KnowledgeBase build_knowledge_base(const Ontology& target, Variant variant,
                                   EmbeddingProvider& provider, std::size_t batch_size = 128);

/// Exhaustive top-k: scores the query against every entry and returns
/// min(k, |kb|) pairs sorted by s_ir descending, ties broken by entry order.
std::vector<CandidatePair> retrieve_candidates(const KnowledgeBase& kb,
                                               const ConceptRepresentation& query,
                                               EmbeddingProvider& provider, std::size_t k);

/// Fraction of reference pairs (s, t) with t among the first k candidates of
/// s. Sources absent from the candidate map count as misses. Throws
/// MetricError on an empty reference.
double recall_at_k(const std::map<std::string, std::vector<CandidatePair>>& candidates_by_source,
                   const ReferenceAlignment& reference, std::size_t k);

/// Versioned JSON persistence keyed by (provider, variant, ontology hash).
/// load returns nullopt when the file is absent, unreadable or keyed for
/// different inputs.
void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& path);
std::optional<KnowledgeBase> load_knowledge_base(const std::filesystem::path& path,
                                                 const std::string& provider_name, Variant variant,
                                                 std::uint64_t ontology_hash);

}  // namespace ontomatch
