#include "ontomatch/embedding.hpp"

#include <cmath>

#include "ontomatch/errors.hpp"

namespace ontomatch {

bool is_sparse(const EmbeddingVector& v) {
  return std::holds_alternative<SparseVector>(v);
}

double l2_norm(const EmbeddingVector& v) {
  double sq = 0.0;
  if (const auto* d = std::get_if<DenseVector>(&v)) {
    for (double x : *d) sq += x * x;
  } else {
    for (const auto& e : std::get<SparseVector>(v)) sq += e.value * e.value;
  }
  return std::sqrt(sq);
}

double cosine_similarity(const DenseVector& u, const DenseVector& v) {
  if (u.size() != v.size()) {
    throw ContractError("cosine_similarity: dimensionality mismatch (" + std::to_string(u.size()) +
                        " vs " + std::to_string(v.size()) + ")");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double cosine_similarity(const SparseVector& u, const SparseVector& v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (const auto& e : u) nu += e.value * e.value;
  for (const auto& e : v) nv += e.value * e.value;
  std::size_t i = 0, j = 0;
  while (i < u.size() && j < v.size()) {
    if (u[i].index == v[j].index) {
      dot += u[i].value * v[j].value;
      ++i;
      ++j;
    } else if (u[i].index < v[j].index) {
      ++i;
    } else {
      ++j;
    }
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (const auto* du = std::get_if<DenseVector>(&u)) {
    const auto* dv = std::get_if<DenseVector>(&v);
    if (dv == nullptr) throw ContractError("cosine_similarity: cannot mix dense and sparse vectors");
    return cosine_similarity(*du, *dv);
  }
  const auto* sv = std::get_if<SparseVector>(&v);
  if (sv == nullptr) throw ContractError("cosine_similarity: cannot mix dense and sparse vectors");
  return cosine_similarity(std::get<SparseVector>(u), *sv);
}

std::vector<EmbeddingVector> embed_texts(EmbeddingProvider& provider,
                                         const std::vector<std::string>& texts) {
  if (texts.empty()) throw ContractError("embed_texts: texts must be non-empty");
  std::vector<EmbeddingVector> vectors = provider.embed(texts);
  if (vectors.size() != texts.size()) {
    throw ProviderError("provider \"" + provider.name() + "\" returned " +
                        std::to_string(vectors.size()) + " vectors for " +
                        std::to_string(texts.size()) + " texts");
  }
  const auto dim = provider.dimensionality();
  if (dim.has_value()) {
    for (const auto& v : vectors) {
      const auto* d = std::get_if<DenseVector>(&v);
      if (d == nullptr || d->size() != *dim) {
        throw ProviderError("provider \"" + provider.name() +
                            "\" broke its dimensionality contract (expected dense " +
                            std::to_string(*dim) + ")");
      }
    }
  }
  return vectors;
}

}  // namespace ontomatch
