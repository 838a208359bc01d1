#include <doctest.h>

#include <algorithm>
#include <random>

#include "ontomatch/postprocess.hpp"

using namespace ontomatch;

namespace {

MatchDecision decision(std::string s, std::string t, MatchClass cls, double s_llm,
                       double s_ir = 0.0) {
  MatchDecision d;
  d.source_id = std::move(s);
  d.target_id = std::move(t);
  d.predicted_class = cls;
  d.s_llm = s_llm;
  d.s_ir = s_ir;
  return d;
}

Mapping mapping(std::string s, std::string t, double s_llm, double s_ir,
                MappingOrigin origin = MappingOrigin::llm) {
  Mapping m;
  m.source_id = std::move(s);
  m.target_id = std::move(t);
  if (origin == MappingOrigin::llm || s_llm > 0.0) m.s_llm = s_llm;
  m.s_ir = s_ir;
  m.origin = origin;
  return m;
}

}  // namespace

TEST_CASE("confidence filter keeps strict yes verdicts only") {
  const std::vector<MatchDecision> decisions = {
      decision("a", "x", MatchClass::yes, 0.71),
      decision("b", "y", MatchClass::yes, 0.70),
      decision("c", "z", MatchClass::no, 0.01),  // "no" with s_llm 0.01 == 0.99 for the no class
  };
  const auto kept = confidence_filter(decisions, 0.7);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].source_id == "a");
}

TEST_CASE("high precision matcher applies the strict retrieval threshold") {
  const std::vector<CandidatePair> candidates = {
      {"a", "x", 0.95}, {"b", "y", 0.90}, {"c", "z", 0.9000001}};
  const std::vector<MatchDecision> decisions = {decision("a", "x", MatchClass::yes, 0.85, 0.95)};

  const auto exact = high_precision_matches(candidates, decisions, 0.9);
  REQUIRE(exact.size() == 2);
  CHECK(exact[0].source_id == "a");
  CHECK(exact[0].origin == MappingOrigin::exact);
  CHECK(exact[0].s_llm.has_value());
  CHECK(*exact[0].s_llm == doctest::Approx(0.85));
  CHECK(exact[1].source_id == "c");
  CHECK_FALSE(exact[1].s_llm.has_value());  // no decision to carry

  CHECK(high_precision_matches({}, {}, 0.9).empty());
}

TEST_CASE("cardinality filter follows the greedy sort key") {
  {
    const auto kept = cardinality_filter({mapping("a", "x", 0.9, 0.5), mapping("a", "y", 0.8, 0.5)});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].target_id == "x");
  }
  {
    const auto kept = cardinality_filter({mapping("a", "x", 0.9, 0.5), mapping("b", "y", 0.8, 0.5)});
    CHECK(kept.size() == 2);
  }
  {
    // equal s_llm: higher s_ir wins the shared target
    const auto kept = cardinality_filter({mapping("b", "x", 0.8, 0.4), mapping("a", "x", 0.8, 0.6)});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].source_id == "a");
  }
  {
    // full tie chain resolves by source then target id
    const auto kept = cardinality_filter({mapping("b", "x", 0.8, 0.5), mapping("a", "x", 0.8, 0.5)});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].source_id == "a");
  }
}

TEST_CASE("assemble_alignment unions llm and exact mappings") {
  {
    const Alignment a = assemble_alignment({decision("a", "x", MatchClass::yes, 0.9, 0.5)}, {},
                                           "src", "tgt", "fp");
    REQUIRE(a.mappings.size() == 1);
    CHECK(a.mappings[0].origin == MappingOrigin::llm);
    CHECK(a.source_ontology == "src");
    CHECK(a.config_fingerprint == "fp");
  }
  {
    // exact matches survive without LLM approval
    const Alignment a = assemble_alignment({}, {mapping("a", "x", 0.0, 0.95, MappingOrigin::exact)},
                                           "src", "tgt", "fp");
    REQUIRE(a.mappings.size() == 1);
    CHECK(a.mappings[0].origin == MappingOrigin::exact);
  }
  {
    // duplicates collapse to one mapping, llm origin preferred
    const Alignment a = assemble_alignment(
        {decision("a", "x", MatchClass::yes, 0.8, 0.95)},
        {mapping("a", "x", 0.8, 0.95, MappingOrigin::exact)}, "src", "tgt", "fp");
    REQUIRE(a.mappings.size() == 1);
    CHECK(a.mappings[0].origin == MappingOrigin::llm);
  }
}

TEST_CASE("post-processing properties over random pools") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> id(0, 9);

  for (int trial = 0; trial < 300; ++trial) {
    std::vector<MatchDecision> decisions;
    std::vector<CandidatePair> candidates;
    const int n = 1 + static_cast<int>(rng() % 25);
    for (int i = 0; i < n; ++i) {
      const std::string s = "s" + std::to_string(id(rng));
      const std::string t = "t" + std::to_string(id(rng));
      const double s_ir = unit(rng);
      candidates.push_back({s, t, s_ir});
      decisions.push_back(decision(s, t, rng() % 2 == 0 ? MatchClass::yes : MatchClass::no,
                                   unit(rng), s_ir));
    }

    const auto kept = confidence_filter(decisions, 0.7);
    const auto exact = high_precision_matches(candidates, decisions, 0.9);
    const Alignment alignment = assemble_alignment(kept, exact, "s", "t", "fp");

    // 1:1 cardinality
    std::set<std::string> sources, targets;
    for (const auto& m : alignment.mappings) {
      CHECK(sources.insert(m.source_id).second);
      CHECK(targets.insert(m.target_id).second);
    }
    // origin invariants
    for (const auto& m : alignment.mappings) {
      if (m.origin == MappingOrigin::llm) {
        REQUIRE(m.s_llm.has_value());
        CHECK(*m.s_llm > 0.7);
      } else {
        CHECK(m.s_ir > 0.9);
      }
    }

    // permutation invariance
    auto shuffled_decisions = decisions;
    auto shuffled_candidates = candidates;
    std::shuffle(shuffled_decisions.begin(), shuffled_decisions.end(), rng);
    std::shuffle(shuffled_candidates.begin(), shuffled_candidates.end(), rng);
    const Alignment again = assemble_alignment(confidence_filter(shuffled_decisions, 0.7),
                                               high_precision_matches(shuffled_candidates,
                                                                      shuffled_decisions, 0.9),
                                               "s", "t", "fp");
    REQUIRE(again.mappings.size() == alignment.mappings.size());
    for (std::size_t i = 0; i < alignment.mappings.size(); ++i) {
      CHECK(again.mappings[i].source_id == alignment.mappings[i].source_id);
      CHECK(again.mappings[i].target_id == alignment.mappings[i].target_id);
    }

    // raising the confidence threshold never adds a kept decision
    const auto stricter = confidence_filter(decisions, 0.85);
    for (const auto& d : stricter) {
      CHECK(std::any_of(kept.begin(), kept.end(), [&d](const MatchDecision& k) {
        return k.source_id == d.source_id && k.target_id == d.target_id;
      }));
    }
  }
}

TEST_CASE("cardinality filter output is a subset of its input") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Mapping> pool;
  for (int i = 0; i < 40; ++i) {
    pool.push_back(mapping("s" + std::to_string(rng() % 6), "t" + std::to_string(rng() % 6),
                           unit(rng), unit(rng)));
  }
  const auto kept = cardinality_filter(pool);
  CHECK(kept.size() <= pool.size());
  for (const auto& m : kept) {
    CHECK(std::any_of(pool.begin(), pool.end(), [&m](const Mapping& p) {
      return p.source_id == m.source_id && p.target_id == m.target_id;
    }));
  }
}
