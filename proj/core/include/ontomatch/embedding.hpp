#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ontomatch {

using DenseVector = std::vector<double>;

struct SparseEntry {
  std::uint32_t index;
  double value;
};

/// Sorted by index, no duplicate indices.
using SparseVector = std::vector<SparseEntry>;

/// A dense vector from a neural provider or a sparse TF-IDF vector.
using EmbeddingVector = std::variant<DenseVector, SparseVector>;

bool is_sparse(const EmbeddingVector& v);
double l2_norm(const EmbeddingVector& v);

/// dot(u, v) / (|u| |v|). Defined as 0 when either norm is 0 so the operation
/// stays total on degenerate embeddings. Throws ContractError on a dense
/// dimensionality mismatch or a dense/sparse mix.
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);
double cosine_similarity(const DenseVector& u, const DenseVector& v);
double cosine_similarity(const SparseVector& u, const SparseVector& v);

/// Port for embedding extractors. Implementations must be deterministic (or
/// cached to determinism): embedding the same text twice yields the same
/// vector.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;

  /// Vector width for dense providers, nullopt for sparse ones.
  virtual std::optional<std::size_t> dimensionality() const = 0;

  /// One vector per input text, in order.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

/// Calls provider.embed and enforces its contract: texts non-empty, exactly
/// one vector per text, consistent dense dimensionality across the batch.
std::vector<EmbeddingVector> embed_texts(EmbeddingProvider& provider,
                                         const std::vector<std::string>& texts);

}  // namespace ontomatch
