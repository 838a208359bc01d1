#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ontomatch/embedding.hpp"

namespace ontomatch {

/// Bag-of-words model with smoothed inverse document frequencies:
///   idf(t) = ln((1 + N) / (1 + df(t))) + 1
/// Tokens are normalize_text output split on whitespace. Vocabulary indices
/// follow first occurrence in the corpus.
struct TfidfModel {
  std::unordered_map<std::string, std::uint32_t> vocabulary;
  std::vector<double> idf;
  std::size_t document_count = 0;
};

/// Throws FitError on an empty corpus or when no document yields a token.
TfidfModel fit_tfidf(const std::vector<std::string>& corpus);

/// tf * idf, L2-normalized. Out-of-vocabulary tokens are dropped; a text with
/// no in-vocabulary tokens embeds to the zero vector.
SparseVector tfidf_embed(const TfidfModel& model, std::string_view text);

/// EmbeddingProvider over a fitted TF-IDF model.
class TfidfProvider final : public EmbeddingProvider {
 public:
  explicit TfidfProvider(TfidfModel model) : model_(std::move(model)) {}

  std::string name() const override { return "tfidf"; }
  std::optional<std::size_t> dimensionality() const override { return std::nullopt; }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  const TfidfModel& model() const noexcept { return model_; }

 private:
  TfidfModel model_;
};

}  // namespace ontomatch
