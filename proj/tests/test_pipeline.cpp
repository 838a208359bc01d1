#include <doctest.h>

#include <fstream>

#include "ontomatch/errors.hpp"
#include "ontomatch/pipeline.hpp"
#include "test_support.hpp"

using namespace ontomatch;

namespace {

// 3x3 task whose diagonal is the gold alignment: identical labels retrieve at
// s_ir 1.0 and the mock answers yes only on the diagonal.
struct DiagonalFixture {
  testsupport::TempDir dir{"pipeline"};
  std::filesystem::path config_path;

  explicit DiagonalFixture(std::size_t k = 5, std::size_t workers = 1,
                           const std::string& cache_subdir = "cache") {
    dir.write("source.json", R"({
      "name": "left",
      "concepts": [
        {"id": "s1", "label": "heart"},
        {"id": "s2", "label": "lung"},
        {"id": "s3", "label": "kidney"}
      ]
    })");
    dir.write("target.json", R"({
      "name": "right",
      "concepts": [
        {"id": "t1", "label": "heart"},
        {"id": "t2", "label": "lung"},
        {"id": "t3", "label": "kidney"}
      ]
    })");
    dir.write("reference.json", R"({
      "pairs": [
        {"source": "s1", "target": "t1"},
        {"source": "s2", "target": "t2"},
        {"source": "s3", "target": "t3"}
      ]
    })");
    dir.write("llm_fixture.json", R"({
      "pairs": [
        {"source": "heart",  "target": "heart",  "tokens": {"yes": 0.9, "no": 0.1}},
        {"source": "lung",   "target": "lung",   "tokens": {"yes": 0.9, "no": 0.1}},
        {"source": "kidney", "target": "kidney", "tokens": {"yes": 0.9, "no": 0.1}}
      ]
    })");
    config_path = dir.write("run.json", R"({
      "source": "source.json",
      "target": "target.json",
      "reference": "reference.json",
      "llm": {"type": "mock", "fixture": "llm_fixture.json"},
      "cache_dir": ")" + cache_subdir + R"(",
      "k": )" + std::to_string(k) + R"(,
      "workers": )" + std::to_string(workers) + R"(
    })");
  }
};

}  // namespace

TEST_CASE("diagonal fixture reaches perfect scores") {
  DiagonalFixture fx;
  const RunConfig config = load_config(fx.config_path);
  const PipelineResult result = run_pipeline(config);

  CHECK(result.report.metrics.precision == doctest::Approx(1.0));
  CHECK(result.report.metrics.recall == doctest::Approx(1.0));
  CHECK(result.report.metrics.f1 == doctest::Approx(1.0));
  CHECK(result.report.recall_at_k == doctest::Approx(1.0));
  CHECK(result.report.sources == 3);
  CHECK(result.report.targets == 3);
  CHECK(result.report.llm_calls == 9);  // 3 sources x min(k, 3 targets)
  CHECK(result.report.undecidable == 0);
  REQUIRE(result.alignment.mappings.size() == 3);
  for (const auto& m : result.alignment.mappings) {
    CHECK(m.source_id.substr(1) == m.target_id.substr(1));
  }
}

TEST_CASE("warm cache reruns are byte-identical with zero provider calls") {
  DiagonalFixture fx;
  const RunConfig config = load_config(fx.config_path);

  const PipelineResult first = run_pipeline(config);
  CHECK(first.report.provider_calls == first.report.llm_calls);
  CHECK(first.report.cache_hits == 0);

  const PipelineResult second = run_pipeline(config);
  CHECK(second.report.provider_calls == 0);
  CHECK(second.report.cache_hits == second.report.llm_calls);
  CHECK(second.report.llm_calls == first.report.llm_calls);

  const std::string a = emit_report(first.report, first.alignment, ReportFormat::machine);
  const std::string b = emit_report(second.report, second.alignment, ReportFormat::machine);
  CHECK(a == b);
}

TEST_CASE("worker count never changes the machine report") {
  DiagonalFixture serial(5, 1, "cache-serial");
  DiagonalFixture parallel(5, 4, "cache-parallel");
  // identical inputs except concurrency; fingerprints differ only via paths,
  // so compare alignment and metrics blocks directly
  const PipelineResult a = run_pipeline(load_config(serial.config_path));
  const PipelineResult b = run_pipeline(load_config(parallel.config_path));
  REQUIRE(a.alignment.mappings.size() == b.alignment.mappings.size());
  for (std::size_t i = 0; i < a.alignment.mappings.size(); ++i) {
    CHECK(a.alignment.mappings[i].source_id == b.alignment.mappings[i].source_id);
    CHECK(a.alignment.mappings[i].target_id == b.alignment.mappings[i].target_id);
    CHECK(a.alignment.mappings[i].s_ir == b.alignment.mappings[i].s_ir);
  }
  CHECK(a.report.metrics.f1 == b.report.metrics.f1);
}

TEST_CASE("machine report round-trips alignment and metrics") {
  DiagonalFixture fx;
  const PipelineResult result = run_pipeline(load_config(fx.config_path));
  const std::string payload = emit_report(result.report, result.alignment, ReportFormat::machine);

  const Alignment parsed = parse_alignment_document(payload);
  REQUIRE(parsed.mappings.size() == result.alignment.mappings.size());
  for (std::size_t i = 0; i < parsed.mappings.size(); ++i) {
    CHECK(parsed.mappings[i].source_id == result.alignment.mappings[i].source_id);
    CHECK(parsed.mappings[i].s_ir == result.alignment.mappings[i].s_ir);
    CHECK(parsed.mappings[i].origin == result.alignment.mappings[i].origin);
  }
  const Metrics metrics = parse_report_metrics(payload);
  CHECK(metrics.precision == result.report.metrics.precision);
  CHECK(metrics.recall == result.report.metrics.recall);
  CHECK(metrics.f1 == result.report.metrics.f1);
  CHECK(metrics.true_positives == result.report.metrics.true_positives);
}

TEST_CASE("human report formats percentages") {
  DiagonalFixture fx;
  const PipelineResult result = run_pipeline(load_config(fx.config_path));
  const std::string text = emit_report(result.report, result.alignment, ReportFormat::human);
  CHECK(text.find("F1:        100.00") != std::string::npos);
  CHECK(text.find("recall@5") != std::string::npos);
  CHECK(text.find("llm calls: 9") != std::string::npos);
}

TEST_CASE("empty alignment still emits a valid machine report") {
  RunReport report;
  report.meta.k = 5;
  Alignment empty;
  empty.source_ontology = "a";
  empty.target_ontology = "b";
  const std::string payload = emit_report(report, empty, ReportFormat::machine);
  const Alignment parsed = parse_alignment_document(payload);
  CHECK(parsed.mappings.empty());
}

TEST_CASE("retrieval-only flow reports recall@k") {
  DiagonalFixture fx;
  RunConfig config = load_config(fx.config_path);
  const RetrievalReport report = run_retrieval(config);
  CHECK(report.recall_at_k == doctest::Approx(1.0));
  CHECK(report.sources == 3);
  CHECK(report.targets == 3);
  CHECK(report.retriever == "tfidf");
  const std::string machine = emit_retrieval_report(report, ReportFormat::machine);
  CHECK(machine.find("\"recall_at_k\": 1.0") != std::string::npos);
}

TEST_CASE("few-shot pipeline draws exemplars outside the candidate set") {
  DiagonalFixture fx(/*k=*/1);
  fx.dir.write("exemplars.json", R"({
    "pairs": [
      {"source": "s1", "target": "t2", "label": "no"},
      {"source": "s2", "target": "t3", "label": "yes"}
    ]
  })");
  RunConfig config = load_config(fx.config_path);
  config.n_shots = 2;
  config.exemplars_path = (fx.dir.path() / "exemplars.json").string();
  config.seed = 7;

  const PipelineResult result = run_pipeline(config);
  CHECK(result.report.metrics.f1 == doctest::Approx(1.0));
  CHECK(result.report.llm_calls == 3);  // k=1

  // n_shots without an exemplar file aborts in the classify stage
  RunConfig broken = load_config(fx.config_path);
  broken.n_shots = 2;
  CHECK_THROWS_WITH_AS(run_pipeline(broken), doctest::Contains("exemplars"), StageError);
}

TEST_CASE("stage errors name the failing stage") {
  DiagonalFixture fx;
  RunConfig config = load_config(fx.config_path);
  config.source_path = (fx.dir.path() / "absent.json").string();
  CHECK_THROWS_WITH_AS(run_pipeline(config), doctest::Contains("stage parse"), StageError);

  RunConfig no_llm = load_config(fx.config_path);
  no_llm.llm = ProviderSpec{};
  try {
    run_pipeline(no_llm);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "classify");
  }

  RunConfig bad_reference = load_config(fx.config_path);
  bad_reference.reference_path = fx.dir.write("broken.json", "{oops").string();
  CHECK_THROWS_WITH_AS(run_pipeline(bad_reference), doctest::Contains("stage parse"), StageError);
}

TEST_CASE("sweep expansion is the cartesian product in axis order") {
  RunConfig base = parse_config(
      R"({"source":"s.json","target":"t.json","reference":"r.json"})", "");
  SweepAxes axes;
  axes.retrieval_variants = {Variant::C, Variant::CP};
  axes.ks = {5, 10, 20};
  const auto cells = expand_sweep(base, axes);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].retrieval_variant == Variant::C);
  CHECK(cells[0].k == 5);
  CHECK(cells[1].k == 10);
  CHECK(cells[3].retrieval_variant == Variant::CP);
  // unspecified axes inherit the base value
  CHECK(cells[0].llm_variant == base.llm_variant);

  CHECK(expand_sweep(base, SweepAxes{}).size() == 1);
}
