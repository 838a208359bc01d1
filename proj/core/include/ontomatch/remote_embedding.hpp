#pragma once

#include <memory>
#include <string>

#include "ontomatch/config.hpp"
#include "ontomatch/embedding.hpp"

namespace ontomatch {

/// Embedding extractor backed by an HTTP API with the common
/// `{"model": ..., "input": [texts]}` -> `{"data": [{"index", "embedding"}]}`
/// request/response shape. Credentials come from the environment variable
/// named in the spec; transient failures are retried with backoff.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEmbeddingProvider(ProviderSpec spec);
  ~RemoteEmbeddingProvider() override;

  std::string name() const override;
  std::optional<std::size_t> dimensionality() const override;
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ontomatch
