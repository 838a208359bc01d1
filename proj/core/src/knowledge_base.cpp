#include "ontomatch/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"

namespace ontomatch {

using nlohmann::json;

KnowledgeBase build_knowledge_base(const Ontology& target, Variant variant,
                                   EmbeddingProvider& provider, std::size_t batch_size) {
  if (target.size() == 0) {
    throw ContractError("build_knowledge_base: target ontology has no concepts");
  }
  if (batch_size == 0) batch_size = 1;

  std::vector<std::string> texts;
  texts.reserve(target.size());
  for (const auto& entry : target.concepts()) {
    texts.push_back(verbalize_representation(build_representation(target, entry.id, variant)));
  }

  KnowledgeBase kb;
  kb.provider_name = provider.name();
  kb.variant = variant;
  kb.ontology_hash = ontology_content_hash(target);
  kb.entries.reserve(target.size());

  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, texts.size());
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                   texts.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<EmbeddingVector> vectors;
    try {
      vectors = embed_texts(provider, batch);
    } catch (const ProviderError& e) {
      throw ProviderError("embedding batch [" + std::to_string(begin) + ", " + std::to_string(end) +
                              ") failed: " + e.what(),
                          e.retryable());
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      kb.entries.push_back({target.concepts()[begin + i].id, std::move(vectors[i])});
    }
  }
  return kb;
}

std::vector<CandidatePair> retrieve_candidates(const KnowledgeBase& kb,
                                               const ConceptRepresentation& query,
                                               EmbeddingProvider& provider, std::size_t k) {
  if (k == 0) throw ContractError("retrieve_candidates: k must be >= 1");
  if (provider.name() != kb.provider_name) {
    throw ContractError("retrieve_candidates: provider \"" + provider.name() +
                        "\" does not match knowledge base provider \"" + kb.provider_name + "\"");
  }
  if (query.variant != kb.variant) {
    throw ContractError("retrieve_candidates: query variant does not match knowledge base variant");
  }

  const EmbeddingVector query_vec =
      std::move(embed_texts(provider, {verbalize_representation(query)})[0]);

  std::vector<double> scores(kb.entries.size());
  for (std::size_t i = 0; i < kb.entries.size(); ++i) {
    scores[i] = cosine_similarity(query_vec, kb.entries[i].vector);
  }

  std::vector<std::size_t> order(kb.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const std::size_t count = std::min(k, order.size());
  std::vector<CandidatePair> out;
  out.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    out.push_back({query.concept_id, kb.entries[order[r]].concept_id, scores[order[r]]});
  }
  return out;
}

double recall_at_k(const std::map<std::string, std::vector<CandidatePair>>& candidates_by_source,
                   const ReferenceAlignment& reference, std::size_t k) {
  if (k == 0) throw ContractError("recall_at_k: k must be >= 1");
  if (reference.pairs.empty()) throw MetricError("recall_at_k: reference alignment is empty");

  std::size_t hits = 0;
  for (const auto& [source_id, target_id] : reference.pairs) {
    auto it = candidates_by_source.find(source_id);
    if (it == candidates_by_source.end()) continue;
    const auto& list = it->second;
    const std::size_t limit = std::min(k, list.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (list[i].target_id == target_id) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(reference.pairs.size());
}

namespace {

constexpr int kKbFileVersion = 1;

json vector_to_json(const EmbeddingVector& v) {
  if (const auto* d = std::get_if<DenseVector>(&v)) {
    return json{{"dense", *d}};
  }
  const auto& s = std::get<SparseVector>(v);
  json entries = json::array();
  for (const auto& e : s) entries.push_back(json::array({e.index, e.value}));
  return json{{"sparse", std::move(entries)}};
}

EmbeddingVector vector_from_json(const json& j) {
  if (j.contains("dense")) {
    return j["dense"].get<DenseVector>();
  }
  SparseVector s;
  for (const auto& e : j.at("sparse")) {
    s.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
  }
  return s;
}

}  // namespace

void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& path) {
  json doc;
  doc["version"] = kKbFileVersion;
  doc["provider"] = kb.provider_name;
  doc["variant"] = std::string(to_string(kb.variant));
  doc["ontology_hash"] = kb.ontology_hash;
  json entries = json::array();
  for (const auto& entry : kb.entries) {
    json e = vector_to_json(entry.vector);
    e["id"] = entry.concept_id;
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write knowledge base file " + path.string());
  out << doc.dump();
}

std::optional<KnowledgeBase> load_knowledge_base(const std::filesystem::path& path,
                                                 const std::string& provider_name, Variant variant,
                                                 std::uint64_t ontology_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json doc;
  try {
    in >> doc;
    if (doc.value("version", 0) != kKbFileVersion) return std::nullopt;
    if (doc.value("provider", std::string{}) != provider_name) return std::nullopt;
    if (doc.value("variant", std::string{}) != to_string(variant)) return std::nullopt;
    if (doc.value("ontology_hash", std::uint64_t{0}) != ontology_hash) return std::nullopt;

    KnowledgeBase kb;
    kb.provider_name = provider_name;
    kb.variant = variant;
    kb.ontology_hash = ontology_hash;
    for (const auto& e : doc.at("entries")) {
      kb.entries.push_back({e.at("id").get<std::string>(), vector_from_json(e)});
    }
    return kb;
  } catch (const json::exception&) {
    return std::nullopt;  // corrupted cache files count as misses
  }
}

}  // namespace ontomatch
