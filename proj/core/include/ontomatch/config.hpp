#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ontomatch/ontology.hpp"

namespace ontomatch {

/// Which retriever / LLM backs a run.
///   retriever: type "tfidf" (self-contained) or "remote" (HTTP embedding API)
///   llm:       type "mock" (fixture file) or "remote" (HTTP chat API)
struct ProviderSpec {
  std::string type;
  std::string model;
  std::string endpoint;
  std::string api_key_env;  // env var holding the credential, resolved at call time
  std::string fixture;      // mock fixture path
  std::optional<std::size_t> dimensionality;
  bool logprobs = true;
  std::size_t max_retries = 3;
  std::size_t timeout_ms = 30000;
  std::size_t min_interval_ms = 0;
};

struct RunConfig {
  std::string source_path;
  std::string target_path;
  std::string reference_path;
  std::string reference_format = "auto";  // auto | native | alignment-xml
  Variant retrieval_variant = Variant::C;
  Variant llm_variant = Variant::C;
  ProviderSpec retriever{.type = "tfidf"};
  ProviderSpec llm;  // type must be set before matching
  std::size_t k = 5;
  double s_llm_threshold = 0.7;
  double s_ir_threshold = 0.9;
  std::size_t n_shots = 0;
  std::uint64_t seed = 0;
  std::string cache_dir;        // empty disables provider/KB caching
  std::string exemplars_path;   // labeled pairs for few-shot runs
  std::size_t batch_size = 128;
  std::size_t workers = 1;
};

/// Load and validate a JSON config file. Relative paths are resolved against
/// the config file's directory. Unknown fields and invalid values raise
/// ConfigError naming the field.
RunConfig load_config(const std::filesystem::path& path);

/// Same, from an in-memory document.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);

/// Re-check invariants (k >= 1, thresholds in [0,1], provider types known).
/// The CLI calls this again after flag overrides.
void validate_config(const RunConfig& config);

/// Stable hex digest over the semantically meaningful fields (paths, variants,
/// providers, k, thresholds, shots, seed). Cache location, worker count and
/// batch size do not participate.
std::string config_fingerprint(const RunConfig& config);

}  // namespace ontomatch
