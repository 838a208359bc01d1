#include "ontomatch/tfidf.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include "ontomatch/errors.hpp"
#include "ontomatch/text.hpp"

namespace ontomatch {

TfidfModel fit_tfidf(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw FitError("fit_tfidf: corpus is empty");

  TfidfModel model;
  model.document_count = corpus.size();

  std::vector<std::size_t> document_frequency;
  std::unordered_set<std::string> seen;
  for (const auto& doc : corpus) {
    seen.clear();
    for (auto& token : tokenize(doc)) {
      if (!seen.insert(token).second) continue;  // count each token once per document
      auto [it, inserted] = model.vocabulary.emplace(std::move(token),
                                                     static_cast<std::uint32_t>(document_frequency.size()));
      if (inserted) {
        document_frequency.push_back(1);
      } else {
        ++document_frequency[it->second];
      }
    }
  }
  if (model.vocabulary.empty()) {
    throw FitError("fit_tfidf: corpus contains no tokens");
  }

  const double n = static_cast<double>(model.document_count);
  model.idf.resize(document_frequency.size());
  for (std::size_t i = 0; i < document_frequency.size(); ++i) {
    model.idf[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(document_frequency[i]))) + 1.0;
  }
  return model;
}

SparseVector tfidf_embed(const TfidfModel& model, std::string_view text) {
  std::map<std::uint32_t, double> weights;  // ordered -> sorted output
  for (const auto& token : tokenize(text)) {
    auto it = model.vocabulary.find(token);
    if (it == model.vocabulary.end()) continue;
    weights[it->second] += model.idf[it->second];
  }

  SparseVector vec;
  vec.reserve(weights.size());
  double sq = 0.0;
  for (const auto& [index, value] : weights) {
    vec.push_back({index, value});
    sq += value * value;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : vec) e.value *= inv;
  }
  return vec;
}

std::vector<EmbeddingVector> TfidfProvider::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    out.emplace_back(tfidf_embed(model_, text));
  }
  return out;
}

}  // namespace ontomatch
