#include <doctest.h>

#include <cmath>

#include "ontomatch/errors.hpp"
#include "ontomatch/tfidf.hpp"

using namespace ontomatch;

TEST_CASE("fit_tfidf reproduces the smoothed idf values") {
  const TfidfModel model = fit_tfidf({"heart", "heart valve"});
  REQUIRE(model.vocabulary.size() == 2);
  CHECK(model.document_count == 2);
  const double idf_heart = model.idf[model.vocabulary.at("heart")];
  const double idf_valve = model.idf[model.vocabulary.at("valve")];
  CHECK(idf_heart == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(idf_valve == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-9));
}

TEST_CASE("fit_tfidf single document") {
  const TfidfModel model = fit_tfidf({"a"});
  REQUIRE(model.vocabulary.count("a") == 1);
  CHECK(model.idf[model.vocabulary.at("a")] == doctest::Approx(1.0));
}

TEST_CASE("fit_tfidf rejects degenerate corpora") {
  CHECK_THROWS_AS(fit_tfidf({}), FitError);
  CHECK_THROWS_AS(fit_tfidf({"", ""}), FitError);
  CHECK_THROWS_AS(fit_tfidf({"...", "---"}), FitError);
}

TEST_CASE("tfidf_embed produces unit-norm vectors") {
  const TfidfModel model = fit_tfidf({"heart", "heart valve"});

  const SparseVector v = tfidf_embed(model, "heart");
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == model.vocabulary.at("heart"));
  CHECK(v[0].value == doctest::Approx(1.0).epsilon(1e-12));

  const SparseVector both = tfidf_embed(model, "heart valve");
  double sq = 0.0;
  for (const auto& e : both) sq += e.value * e.value;
  CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-12));

  // repeated tokens raise term frequency
  const SparseVector repeated = tfidf_embed(model, "valve valve heart");
  REQUIRE(repeated.size() == 2);

  // out-of-vocabulary text embeds to the zero vector
  CHECK(tfidf_embed(model, "zebra").empty());
}

TEST_CASE("TfidfProvider embeds deterministically") {
  TfidfProvider provider(fit_tfidf({"heart", "heart valve", "lung"}));
  const auto first = provider.embed({"heart valve", "heart valve"});
  REQUIRE(first.size() == 2);
  const auto& a = std::get<SparseVector>(first[0]);
  const auto& b = std::get<SparseVector>(first[1]);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].index == b[i].index);
    CHECK(a[i].value == b[i].value);
  }
}
