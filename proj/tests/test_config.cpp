#include <doctest.h>

#include "ontomatch/config.hpp"
#include "ontomatch/errors.hpp"
#include "test_support.hpp"

using namespace ontomatch;

TEST_CASE("minimal config applies the documented defaults") {
  const RunConfig c = parse_config(
      R"({"source":"s.json","target":"t.json","reference":"r.json"})", "");
  CHECK(c.k == 5);
  CHECK(c.s_llm_threshold == doctest::Approx(0.7));
  CHECK(c.s_ir_threshold == doctest::Approx(0.9));
  CHECK(c.n_shots == 0);
  CHECK(c.retrieval_variant == Variant::C);
  CHECK(c.llm_variant == Variant::C);
  CHECK(c.retriever.type == "tfidf");
}

TEST_CASE("invalid values raise config errors naming the field") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"k":0})", ""), doctest::Contains("\"k\""), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"retrieval_variant":"CX"})", ""), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"s_llm_threshold":1.5})", ""),
                       doctest::Contains("s_llm_threshold"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"typo_field":1})", ""), doctest::Contains("typo_field"),
                       ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"retriever":{"type":"nope"}})", ""), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"llm":{"type":"mock"}})", ""), ConfigError);  // fixture missing
  CHECK_THROWS_AS(parse_config(R"({"llm":{"type":"remote"}})", ""), ConfigError);
  CHECK_THROWS_AS(parse_config("not json", ""), ConfigError);
}

TEST_CASE("a sweep section is tolerated on single runs") {
  const RunConfig c = parse_config(
      R"({"source":"s.json","target":"t.json","reference":"r.json",
          "sweep":{"retrieval_variants":["C","CP"],"k":[5,10]}})",
      "");
  CHECK(c.k == 5);  // base value; the sweep axes belong to the sweep subcommand
}

TEST_CASE("load_config resolves relative paths against the config directory") {
  testsupport::TempDir dir("config");
  const auto path = dir.write("run.json", R"({
    "source": "onts/source.json",
    "target": "/abs/target.json",
    "reference": "ref.xml",
    "llm": {"type": "mock", "fixture": "fixtures/llm.json"}
  })");
  const RunConfig c = load_config(path);
  CHECK(c.source_path == (dir.path() / "onts/source.json").string());
  CHECK(c.target_path == "/abs/target.json");
  CHECK(c.llm.fixture == (dir.path() / "fixtures/llm.json").string());

  CHECK_THROWS_AS(load_config(dir.path() / "missing.json"), ConfigError);
}

TEST_CASE("fingerprint tracks every semantic field") {
  RunConfig base = parse_config(
      R"({"source":"s.json","target":"t.json","reference":"r.json"})", "");
  const std::string fp = config_fingerprint(base);
  CHECK(fp.size() == 16);
  CHECK(config_fingerprint(base) == fp);  // stable

  auto differs = [&fp](RunConfig changed) { return config_fingerprint(changed) != fp; };

  RunConfig c = base;
  c.source_path = "other.json";
  CHECK(differs(c));
  c = base;
  c.target_path = "other.json";
  CHECK(differs(c));
  c = base;
  c.reference_path = "other.json";
  CHECK(differs(c));
  c = base;
  c.retrieval_variant = Variant::CP;
  CHECK(differs(c));
  c = base;
  c.llm_variant = Variant::CC;
  CHECK(differs(c));
  c = base;
  c.k = 10;
  CHECK(differs(c));
  c = base;
  c.s_llm_threshold = 0.75;
  CHECK(differs(c));
  c = base;
  c.s_ir_threshold = 0.95;
  CHECK(differs(c));
  c = base;
  c.n_shots = 3;
  CHECK(differs(c));
  c = base;
  c.seed = 99;
  CHECK(differs(c));
  c = base;
  c.retriever.model = "other-model";
  CHECK(differs(c));
  c = base;
  c.llm.type = "remote";
  c.llm.endpoint = "http://localhost:1/v1";
  CHECK(differs(c));
  c = base;
  c.exemplars_path = "ex.json";
  CHECK(differs(c));

  // non-semantic knobs leave the fingerprint alone
  c = base;
  c.cache_dir = "/tmp/somewhere";
  c.workers = 8;
  c.batch_size = 4;
  CHECK(config_fingerprint(c) == fp);
}
