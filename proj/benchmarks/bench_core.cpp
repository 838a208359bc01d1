#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "ontomatch/knowledge_base.hpp"
#include "ontomatch/postprocess.hpp"
#include "ontomatch/text.hpp"
#include "ontomatch/tfidf.hpp"

namespace {

std::vector<std::string> synthetic_corpus(std::size_t docs, std::size_t words_per_doc) {
  std::mt19937 rng(17);
  std::vector<std::string> corpus;
  corpus.reserve(docs);
  for (std::size_t i = 0; i < docs; ++i) {
    std::string doc;
    for (std::size_t w = 0; w < words_per_doc; ++w) {
      if (w > 0) doc += ' ';
      doc += "tok" + std::to_string(rng() % 400);
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

void BM_NormalizeText(benchmark::State& state) {
  const std::string raw = "Pulmonary  (Heart-Valve) STRUCTURE, accessory; lobe #42";
  for (auto _ : state) {
    benchmark::DoNotOptimize(ontomatch::normalize_text(raw));
  }
}
BENCHMARK(BM_NormalizeText);

void BM_FitTfidf(benchmark::State& state) {
  const auto corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ontomatch::fit_tfidf(corpus));
  }
}
BENCHMARK(BM_FitTfidf)->Arg(100)->Arg(1000)->Arg(5000);

void BM_TfidfEmbed(benchmark::State& state) {
  const ontomatch::TfidfModel model = ontomatch::fit_tfidf(synthetic_corpus(1000, 8));
  const std::string query = "tok1 tok17 tok33 tok99 tok250";
  for (auto _ : state) {
    benchmark::DoNotOptimize(ontomatch::tfidf_embed(model, query));
  }
}
BENCHMARK(BM_TfidfEmbed);

void BM_CosineDense(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  ontomatch::DenseVector u(static_cast<std::size_t>(state.range(0)));
  ontomatch::DenseVector v(u.size());
  for (auto& x : u) x = coord(rng);
  for (auto& x : v) x = coord(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ontomatch::cosine_similarity(u, v));
  }
}
BENCHMARK(BM_CosineDense)->Arg(384)->Arg(1536);

void BM_RetrieveTopK(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto corpus = synthetic_corpus(n, 8);

  std::string doc = R"({"name":"bench","concepts":[)";
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) doc += ',';
    doc += R"({"id":"t)" + std::to_string(i) + R"(","label":")" + corpus[i] + R"("})";
  }
  doc += "]}";
  const ontomatch::Ontology target = ontomatch::parse_ontology(doc, ontomatch::Role::target);

  ontomatch::TfidfProvider provider(ontomatch::fit_tfidf(corpus));
  const ontomatch::KnowledgeBase kb =
      ontomatch::build_knowledge_base(target, ontomatch::Variant::C, provider, 256);
  const ontomatch::ConceptRepresentation query{"q", ontomatch::Variant::C, corpus[n / 2], {}};

  for (auto _ : state) {
    benchmark::DoNotOptimize(ontomatch::retrieve_candidates(kb, query, provider, 5));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_RetrieveTopK)->Arg(1000)->Arg(10000);

void BM_CardinalityFilter(benchmark::State& state) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ontomatch::Mapping> pool;
  for (int i = 0; i < 2000; ++i) {
    ontomatch::Mapping m;
    m.source_id = "s" + std::to_string(rng() % 500);
    m.target_id = "t" + std::to_string(rng() % 500);
    m.s_llm = unit(rng);
    m.s_ir = unit(rng);
    pool.push_back(std::move(m));
  }
  for (auto _ : state) {
    auto copy = pool;
    benchmark::DoNotOptimize(ontomatch::cardinality_filter(std::move(copy)));
  }
}
BENCHMARK(BM_CardinalityFilter);

}  // namespace

BENCHMARK_MAIN();
