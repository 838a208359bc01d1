#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ontomatch/config.hpp"
#include "ontomatch/evaluation.hpp"
#include "ontomatch/postprocess.hpp"

namespace ontomatch {

struct StageTimings {
  double parse = 0.0;
  double knowledge_base = 0.0;
  double retrieve = 0.0;
  double classify = 0.0;
  double postprocess = 0.0;
  double evaluate = 0.0;
  double total = 0.0;
};

/// Stable run-parameter echo embedded in machine reports.
struct RunMeta {
  std::string retriever;
  std::string llm;
  std::string retrieval_variant;
  std::string llm_variant;
  std::size_t k = 0;
  double s_llm_threshold = 0.7;
  double s_ir_threshold = 0.9;
  std::size_t n_shots = 0;
  std::uint64_t seed = 0;
  std::string hybrid = "union";  // exact matches survive an LLM "no"
};

struct RunReport {
  Metrics metrics;
  double recall_at_k = 0.0;
  std::size_t sources = 0;
  std::size_t targets = 0;
  std::uint64_t llm_calls = 0;       // pairs sent to the LLM stage (bounded by k * sources)
  std::uint64_t provider_calls = 0;  // completions actually computed (cache misses)
  std::uint64_t cache_hits = 0;
  std::uint64_t undecidable = 0;
  StageTimings timings;
  std::string config_fingerprint;
  RunMeta meta;
};

struct PipelineResult {
  Alignment alignment;
  RunReport report;
};

/// Full run: parse -> representations -> knowledge base -> top-k retrieval ->
/// LLM classification -> hybrid post-processing -> evaluation. Deterministic
/// for fixed inputs; with a warm cache no provider call is issued and the
/// machine report is byte-identical across runs.
PipelineResult run_pipeline(const RunConfig& config);

enum class ReportFormat { human, machine };

/// human: a metrics/counts/timings table. machine: a stable JSON document
/// carrying the alignment, the metrics and the run metadata -- no timings or
/// counters, so reruns with identical configs emit identical bytes.
std::string emit_report(const RunReport& report, const Alignment& alignment, ReportFormat format);

/// Retrieval-only flow behind the `retrieve` subcommand.
struct RetrievalReport {
  double recall_at_k = 0.0;
  std::size_t k = 0;
  std::size_t sources = 0;
  std::size_t targets = 0;
  StageTimings timings;
  std::string config_fingerprint;
  std::string retriever;
  std::string retrieval_variant;
};

RetrievalReport run_retrieval(const RunConfig& config);
std::string emit_retrieval_report(const RetrievalReport& report, ReportFormat format);

/// Reads an alignment back from a machine report or a bare alignment object.
Alignment parse_alignment_document(std::string_view text);

/// Reads the metrics block back from a machine report.
Metrics parse_report_metrics(std::string_view text);

/// Axes for grid runs; empty axes fall back to the base config's value.
struct SweepAxes {
  std::vector<Variant> retrieval_variants;
  std::vector<Variant> llm_variants;
  std::vector<std::size_t> ks;
  std::vector<ProviderSpec> retrievers;
};

/// Cartesian product of the axes over the base config, in axis order.
std::vector<RunConfig> expand_sweep(const RunConfig& base, const SweepAxes& axes);

}  // namespace ontomatch
