#include "ontomatch/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"
#include "ontomatch/hash.hpp"

namespace ontomatch {

using nlohmann::json;

namespace {

void reject_unknown_fields(const json& obj, const std::set<std::string>& known,
                           const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (known.find(key) == known.end()) {
      throw ConfigError("unknown field \"" + key + "\" in " + where);
    }
  }
}

std::string resolve_path(const std::string& path, const std::filesystem::path& base_dir) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (base_dir / p).lexically_normal().string();
}

ProviderSpec parse_provider(const json& obj, const std::string& where,
                            const std::filesystem::path& base_dir, ProviderSpec defaults) {
  reject_unknown_fields(obj,
                        {"type", "model", "endpoint", "api_key_env", "fixture", "dimensionality",
                         "logprobs", "max_retries", "timeout_ms", "min_interval_ms"},
                        where);
  ProviderSpec spec = std::move(defaults);
  if (obj.contains("type")) spec.type = obj["type"].get<std::string>();
  if (obj.contains("model")) spec.model = obj["model"].get<std::string>();
  if (obj.contains("endpoint")) spec.endpoint = obj["endpoint"].get<std::string>();
  if (obj.contains("api_key_env")) spec.api_key_env = obj["api_key_env"].get<std::string>();
  if (obj.contains("fixture")) spec.fixture = resolve_path(obj["fixture"].get<std::string>(), base_dir);
  if (obj.contains("dimensionality")) spec.dimensionality = obj["dimensionality"].get<std::size_t>();
  if (obj.contains("logprobs")) spec.logprobs = obj["logprobs"].get<bool>();
  if (obj.contains("max_retries")) spec.max_retries = obj["max_retries"].get<std::size_t>();
  if (obj.contains("timeout_ms")) spec.timeout_ms = obj["timeout_ms"].get<std::size_t>();
  if (obj.contains("min_interval_ms")) spec.min_interval_ms = obj["min_interval_ms"].get<std::size_t>();
  return spec;
}

template <typename T>
T field_as(const json& obj, const char* key, const T& fallback) {
  if (!obj.contains(key)) return fallback;
  if constexpr (std::is_unsigned_v<T>) {
    if (!obj[key].is_number_unsigned()) {
      throw ConfigError(std::string("field \"") + key + "\" must be a non-negative integer");
    }
  }
  try {
    return obj[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");

  // "sweep" is read by the sweep subcommand, not by single runs
  reject_unknown_fields(doc,
                        {"source", "target", "reference", "reference_format", "retrieval_variant",
                         "llm_variant", "retriever", "llm", "k", "s_llm_threshold",
                         "s_ir_threshold", "n_shots", "seed", "cache_dir", "exemplars",
                         "batch_size", "workers", "sweep"},
                        "config");

  RunConfig config;
  config.source_path = resolve_path(field_as<std::string>(doc, "source", ""), base_dir);
  config.target_path = resolve_path(field_as<std::string>(doc, "target", ""), base_dir);
  config.reference_path = resolve_path(field_as<std::string>(doc, "reference", ""), base_dir);
  config.reference_format = field_as<std::string>(doc, "reference_format", "auto");
  if (doc.contains("retrieval_variant")) {
    config.retrieval_variant = variant_from_string(doc["retrieval_variant"].get<std::string>());
  }
  if (doc.contains("llm_variant")) {
    config.llm_variant = variant_from_string(doc["llm_variant"].get<std::string>());
  }
  if (doc.contains("retriever")) {
    config.retriever = parse_provider(doc["retriever"], "retriever", base_dir, config.retriever);
  }
  if (doc.contains("llm")) {
    config.llm = parse_provider(doc["llm"], "llm", base_dir, config.llm);
  }
  config.k = field_as<std::size_t>(doc, "k", config.k);
  config.s_llm_threshold = field_as<double>(doc, "s_llm_threshold", config.s_llm_threshold);
  config.s_ir_threshold = field_as<double>(doc, "s_ir_threshold", config.s_ir_threshold);
  config.n_shots = field_as<std::size_t>(doc, "n_shots", config.n_shots);
  config.seed = field_as<std::uint64_t>(doc, "seed", config.seed);
  config.cache_dir = resolve_path(field_as<std::string>(doc, "cache_dir", ""), base_dir);
  config.exemplars_path = resolve_path(field_as<std::string>(doc, "exemplars", ""), base_dir);
  config.batch_size = field_as<std::size_t>(doc, "batch_size", config.batch_size);
  config.workers = field_as<std::size_t>(doc, "workers", config.workers);

  validate_config(config);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file " + path.string() + " does not exist or is unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void validate_config(const RunConfig& config) {
  if (config.k < 1) throw ConfigError("field \"k\" must be >= 1");
  if (config.s_llm_threshold < 0.0 || config.s_llm_threshold > 1.0) {
    throw ConfigError("field \"s_llm_threshold\" must lie in [0, 1]");
  }
  if (config.s_ir_threshold < 0.0 || config.s_ir_threshold > 1.0) {
    throw ConfigError("field \"s_ir_threshold\" must lie in [0, 1]");
  }
  if (config.batch_size < 1) throw ConfigError("field \"batch_size\" must be >= 1");
  if (config.workers < 1) throw ConfigError("field \"workers\" must be >= 1");
  if (config.reference_format != "auto" && config.reference_format != "native" &&
      config.reference_format != "alignment-xml") {
    throw ConfigError("field \"reference_format\" must be auto, native or alignment-xml");
  }
  if (config.retriever.type != "tfidf" && config.retriever.type != "remote") {
    throw ConfigError("field \"retriever.type\" must be tfidf or remote");
  }
  auto env_set = [](const char* name) {
    const char* v = std::getenv(name);
    return v != nullptr && v[0] != '\0';
  };
  if (config.retriever.type == "remote" && config.retriever.endpoint.empty() &&
      !env_set("ONTOMATCH_RETRIEVER_ENDPOINT")) {
    throw ConfigError(
        "field \"retriever.endpoint\" (or ONTOMATCH_RETRIEVER_ENDPOINT) is required for remote "
        "retrievers");
  }
  if (!config.llm.type.empty() && config.llm.type != "mock" && config.llm.type != "remote") {
    throw ConfigError("field \"llm.type\" must be mock or remote");
  }
  if (config.llm.type == "mock" && config.llm.fixture.empty()) {
    throw ConfigError("field \"llm.fixture\" is required for the mock llm");
  }
  if (config.llm.type == "remote" && config.llm.endpoint.empty() &&
      !env_set("ONTOMATCH_LLM_ENDPOINT")) {
    throw ConfigError(
        "field \"llm.endpoint\" (or ONTOMATCH_LLM_ENDPOINT) is required for remote llms");
  }
}

std::string config_fingerprint(const RunConfig& config) {
  json provider_echo;
  auto echo_provider = [](const ProviderSpec& p) {
    json j;
    j["type"] = p.type;
    j["model"] = p.model;
    j["endpoint"] = p.endpoint;
    j["fixture"] = p.fixture;
    j["dimensionality"] = p.dimensionality.has_value() ? json(*p.dimensionality) : json(nullptr);
    j["logprobs"] = p.logprobs;
    return j;
  };

  json doc;
  doc["source"] = config.source_path;
  doc["target"] = config.target_path;
  doc["reference"] = config.reference_path;
  doc["reference_format"] = config.reference_format;
  doc["retrieval_variant"] = std::string(to_string(config.retrieval_variant));
  doc["llm_variant"] = std::string(to_string(config.llm_variant));
  doc["retriever"] = echo_provider(config.retriever);
  doc["llm"] = echo_provider(config.llm);
  doc["k"] = config.k;
  doc["s_llm_threshold"] = config.s_llm_threshold;
  doc["s_ir_threshold"] = config.s_ir_threshold;
  doc["n_shots"] = config.n_shots;
  doc["seed"] = config.seed;
  doc["exemplars"] = config.exemplars_path;

  return to_hex(fnv1a64(doc.dump()));
}

}  // namespace ontomatch
