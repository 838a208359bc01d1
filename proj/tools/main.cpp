// ontomatch CLI: match / retrieve / eval / sweep over ontology pairs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ontomatch/config.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/evaluation.hpp"
#include "ontomatch/pipeline.hpp"

namespace {

using ontomatch::ReportFormat;
using ontomatch::RunConfig;
using ontomatch::Variant;

struct Overrides {
  std::string config_path;
  std::optional<std::string> source, target, reference, reference_format;
  std::optional<std::string> retrieval_variant, llm_variant;
  std::optional<std::size_t> k, n_shots, batch_size, workers;
  std::optional<double> s_llm_threshold, s_ir_threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir, exemplars;
  std::optional<std::string> retriever_type, retriever_model, retriever_endpoint,
      retriever_key_env;
  std::optional<std::size_t> retriever_dim;
  std::optional<std::string> llm_type, llm_model, llm_endpoint, llm_key_env, llm_fixture;
  std::optional<bool> llm_logprobs;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--source", o.source, "source ontology file");
  cmd->add_option("--target", o.target, "target ontology file");
  cmd->add_option("--reference", o.reference, "reference alignment file");
  cmd->add_option("--reference-format", o.reference_format, "auto | native | alignment-xml");
  cmd->add_option("--retrieval-variant", o.retrieval_variant, "C | CP | CC");
  cmd->add_option("--llm-variant", o.llm_variant, "C | CP | CC");
  cmd->add_option("-k,--k", o.k, "candidates retrieved per source concept");
  cmd->add_option("--s-llm-threshold", o.s_llm_threshold, "confidence filter threshold");
  cmd->add_option("--s-ir-threshold", o.s_ir_threshold, "high-precision matcher threshold");
  cmd->add_option("--n-shots", o.n_shots, "few-shot exemplars per prompt");
  cmd->add_option("--seed", o.seed, "seed for exemplar selection");
  cmd->add_option("--cache-dir", o.cache_dir, "provider response cache directory");
  cmd->add_option("--exemplars", o.exemplars, "labeled pairs file for few-shot runs");
  cmd->add_option("--batch-size", o.batch_size, "embedding batch size");
  cmd->add_option("--workers", o.workers, "concurrent classification workers");
  cmd->add_option("--retriever", o.retriever_type, "tfidf | remote");
  cmd->add_option("--retriever-model", o.retriever_model, "remote embedding model name");
  cmd->add_option("--retriever-endpoint", o.retriever_endpoint, "remote embedding URL");
  cmd->add_option("--retriever-key-env", o.retriever_key_env, "env var holding the embedding credential");
  cmd->add_option("--retriever-dim", o.retriever_dim, "expected embedding width");
  cmd->add_option("--llm", o.llm_type, "mock | remote");
  cmd->add_option("--llm-model", o.llm_model, "remote chat model name");
  cmd->add_option("--llm-endpoint", o.llm_endpoint, "remote chat URL");
  cmd->add_option("--llm-key-env", o.llm_key_env, "env var holding the chat credential");
  cmd->add_option("--llm-fixture", o.llm_fixture, "mock fixture file");
  cmd->add_option("--llm-logprobs", o.llm_logprobs, "request token logprobs (true/false)");
}

RunConfig assemble_config(const Overrides& o) {
  RunConfig config;
  if (!o.config_path.empty()) config = ontomatch::load_config(o.config_path);

  auto set = [](auto& field, const auto& opt) {
    if (opt.has_value()) field = *opt;
  };
  set(config.source_path, o.source);
  set(config.target_path, o.target);
  set(config.reference_path, o.reference);
  set(config.reference_format, o.reference_format);
  if (o.retrieval_variant) config.retrieval_variant = ontomatch::variant_from_string(*o.retrieval_variant);
  if (o.llm_variant) config.llm_variant = ontomatch::variant_from_string(*o.llm_variant);
  set(config.k, o.k);
  set(config.s_llm_threshold, o.s_llm_threshold);
  set(config.s_ir_threshold, o.s_ir_threshold);
  set(config.n_shots, o.n_shots);
  set(config.seed, o.seed);
  set(config.cache_dir, o.cache_dir);
  set(config.exemplars_path, o.exemplars);
  set(config.batch_size, o.batch_size);
  set(config.workers, o.workers);
  set(config.retriever.type, o.retriever_type);
  set(config.retriever.model, o.retriever_model);
  set(config.retriever.endpoint, o.retriever_endpoint);
  set(config.retriever.api_key_env, o.retriever_key_env);
  if (o.retriever_dim) config.retriever.dimensionality = *o.retriever_dim;
  set(config.llm.type, o.llm_type);
  set(config.llm.model, o.llm_model);
  set(config.llm.endpoint, o.llm_endpoint);
  set(config.llm.api_key_env, o.llm_key_env);
  set(config.llm.fixture, o.llm_fixture);
  set(config.llm.logprobs, o.llm_logprobs);

  ontomatch::validate_config(config);
  return config;
}

ReportFormat parse_format(const std::string& format) {
  if (format == "human") return ReportFormat::human;
  if (format == "machine") return ReportFormat::machine;
  throw ontomatch::ConfigError("unknown report format \"" + format + "\" (expected human or machine)");
}

void write_output(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ontomatch::ConfigError("cannot write output file " + out_path);
  out << payload;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ontomatch::ConfigError(std::string(what) + " file " + path + " does not exist");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ontomatch::ReferenceFormat sniff_reference_format(const std::string& format_choice,
                                                  const std::string& path) {
  if (format_choice == "native") return ontomatch::ReferenceFormat::native;
  if (format_choice == "alignment-xml") return ontomatch::ReferenceFormat::alignment_xml;
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".xml" || ext == ".rdf" || ext == ".owl") {
    return ontomatch::ReferenceFormat::alignment_xml;
  }
  return ontomatch::ReferenceFormat::native;
}

std::vector<Variant> parse_variant_list(const std::vector<std::string>& items) {
  std::vector<Variant> out;
  for (const auto& item : items) out.push_back(ontomatch::variant_from_string(item));
  return out;
}

int run_sweep(const Overrides& overrides, const std::vector<std::string>& rv_axis,
              const std::vector<std::string>& lv_axis, const std::vector<std::size_t>& k_axis,
              const std::string& out_dir, const std::string& format_name) {
  RunConfig base = assemble_config(overrides);

  ontomatch::SweepAxes axes;
  axes.retrieval_variants = parse_variant_list(rv_axis);
  axes.llm_variants = parse_variant_list(lv_axis);
  axes.ks = k_axis;

  // A "sweep" section in the config file supplies axes (and retriever specs)
  // that are awkward to spell as flags; explicit flags win.
  if (!overrides.config_path.empty()) {
    nlohmann::json doc = nlohmann::json::parse(read_file(overrides.config_path, "config"));
    if (doc.is_object() && doc.contains("sweep")) {
      const nlohmann::json& sweep = doc["sweep"];
      if (axes.retrieval_variants.empty() && sweep.contains("retrieval_variants")) {
        for (const auto& v : sweep["retrieval_variants"]) {
          axes.retrieval_variants.push_back(ontomatch::variant_from_string(v.get<std::string>()));
        }
      }
      if (axes.llm_variants.empty() && sweep.contains("llm_variants")) {
        for (const auto& v : sweep["llm_variants"]) {
          axes.llm_variants.push_back(ontomatch::variant_from_string(v.get<std::string>()));
        }
      }
      if (axes.ks.empty() && sweep.contains("k")) {
        for (const auto& v : sweep["k"]) axes.ks.push_back(v.get<std::size_t>());
      }
    }
  }

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const ReportFormat format = parse_format(format_name);

  int failures = 0;
  for (const RunConfig& cell : ontomatch::expand_sweep(base, axes)) {
    const std::string label = std::string(ontomatch::to_string(cell.retrieval_variant)) + "-" +
                              std::string(ontomatch::to_string(cell.llm_variant)) + "-k" +
                              std::to_string(cell.k);
    try {
      ontomatch::PipelineResult result = ontomatch::run_pipeline(cell);
      std::cout << label << ": P " << result.report.metrics.precision * 100.0 << "  R "
                << result.report.metrics.recall * 100.0 << "  F1 "
                << result.report.metrics.f1 * 100.0 << "  recall@" << cell.k << " "
                << result.report.recall_at_k * 100.0 << "\n";
      if (!out_dir.empty()) {
        const std::string payload = ontomatch::emit_report(result.report, result.alignment, format);
        std::ofstream out(std::filesystem::path(out_dir) / (label + ".json"),
                          std::ios::binary | std::ios::trunc);
        out << payload;
      }
    } catch (const ontomatch::Error& e) {
      ++failures;
      std::cerr << label << ": error: " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retrieve-and-classify ontology matching"};
  app.require_subcommand(1);

  Overrides match_flags, retrieve_flags, sweep_flags;
  std::string format_name = "human";
  std::string out_path;

  CLI::App* match_cmd = app.add_subcommand("match", "run the full matching pipeline");
  add_common_flags(match_cmd, match_flags);
  match_cmd->add_option("--format", format_name, "human | machine");
  match_cmd->add_option("-o,--out", out_path, "write the report to a file instead of stdout");

  CLI::App* retrieve_cmd = app.add_subcommand("retrieve", "retrieval only, reports recall@k");
  add_common_flags(retrieve_cmd, retrieve_flags);
  std::string retrieve_format = "human";
  std::string retrieve_out;
  retrieve_cmd->add_option("--format", retrieve_format, "human | machine");
  retrieve_cmd->add_option("-o,--out", retrieve_out, "write the report to a file instead of stdout");

  CLI::App* eval_cmd = app.add_subcommand("eval", "score an existing alignment file");
  std::string eval_alignment, eval_reference, eval_reference_format = "auto";
  std::string eval_format = "human";
  eval_cmd->add_option("--alignment", eval_alignment, "alignment or machine report file")->required();
  eval_cmd->add_option("--reference", eval_reference, "reference alignment file")->required();
  eval_cmd->add_option("--reference-format", eval_reference_format, "auto | native | alignment-xml");
  eval_cmd->add_option("--format", eval_format, "human | machine");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid runs over variants and k");
  add_common_flags(sweep_cmd, sweep_flags);
  std::vector<std::string> sweep_rv, sweep_lv;
  std::vector<std::size_t> sweep_k;
  std::string sweep_out_dir;
  std::string sweep_format = "machine";
  sweep_cmd->add_option("--retrieval-variants", sweep_rv, "retrieval variant axis")->delimiter(',');
  sweep_cmd->add_option("--llm-variants", sweep_lv, "prompt variant axis")->delimiter(',');
  sweep_cmd->add_option("--ks", sweep_k, "k axis")->delimiter(',');
  sweep_cmd->add_option("--out-dir", sweep_out_dir, "directory receiving one report per cell");
  sweep_cmd->add_option("--format", sweep_format, "per-cell report format");

  CLI11_PARSE(app, argc, argv);

  try {
    if (match_cmd->parsed()) {
      RunConfig config = assemble_config(match_flags);
      ontomatch::PipelineResult result = ontomatch::run_pipeline(config);
      write_output(ontomatch::emit_report(result.report, result.alignment, parse_format(format_name)),
                   out_path);
      return 0;
    }
    if (retrieve_cmd->parsed()) {
      RunConfig config = assemble_config(retrieve_flags);
      ontomatch::RetrievalReport report = ontomatch::run_retrieval(config);
      write_output(ontomatch::emit_retrieval_report(report, parse_format(retrieve_format)),
                   retrieve_out);
      return 0;
    }
    if (eval_cmd->parsed()) {
      const ontomatch::Alignment alignment =
          ontomatch::parse_alignment_document(read_file(eval_alignment, "alignment"));
      const ontomatch::ReferenceAlignment reference = ontomatch::parse_reference_alignment(
          read_file(eval_reference, "reference"),
          sniff_reference_format(eval_reference_format, eval_reference));
      const ontomatch::Metrics metrics = ontomatch::evaluate_alignment(alignment, reference);
      if (parse_format(eval_format) == ReportFormat::machine) {
        nlohmann::json doc;
        doc["metrics"] = {{"precision", metrics.precision},
                          {"recall", metrics.recall},
                          {"f1", metrics.f1},
                          {"true_positives", metrics.true_positives},
                          {"predicted_count", metrics.predicted_count},
                          {"reference_count", metrics.reference_count}};
        std::cout << doc.dump(2) << "\n";
      } else {
        std::printf("precision: %.2f\nrecall:    %.2f\nF1:        %.2f\n",
                    metrics.precision * 100.0, metrics.recall * 100.0, metrics.f1 * 100.0);
        std::printf("true positives: %zu   predicted: %zu   reference: %zu\n",
                    metrics.true_positives, metrics.predicted_count, metrics.reference_count);
      }
      return 0;
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_flags, sweep_rv, sweep_lv, sweep_k, sweep_out_dir, sweep_format);
    }
  } catch (const ontomatch::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
