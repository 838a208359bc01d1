#include "ontomatch/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ontomatch/cache.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/hash.hpp"
#include "ontomatch/remote_embedding.hpp"
#include "ontomatch/remote_llm.hpp"
#include "ontomatch/tfidf.hpp"

namespace ontomatch {

using nlohmann::json;

namespace {

class StageClock {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - mark_).count();
    mark_ = now;
    return seconds;
  }
  double since_start() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::chrono::steady_clock::time_point mark_ = start_;
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string(what) + " file " + path + " does not exist or is unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

// Remote endpoints may come from the environment instead of the config file.
ProviderSpec with_env_endpoint(ProviderSpec spec, const char* env_name) {
  if (spec.type == "remote" && spec.endpoint.empty()) {
    const char* url = std::getenv(env_name);
    if (url != nullptr && url[0] != '\0') spec.endpoint = url;
  }
  return spec;
}

ReferenceFormat resolve_reference_format(const RunConfig& config) {
  if (config.reference_format == "native") return ReferenceFormat::native;
  if (config.reference_format == "alignment-xml") return ReferenceFormat::alignment_xml;
  // auto: sniff by extension, XML-ish files go to the alignment parser
  const std::filesystem::path p(config.reference_path);
  const std::string ext = p.extension().string();
  if (ext == ".xml" || ext == ".rdf" || ext == ".owl") return ReferenceFormat::alignment_xml;
  return ReferenceFormat::native;
}

std::string ontology_display_name(const Ontology& ontology, const std::string& path) {
  if (!ontology.name().empty()) return ontology.name();
  return std::filesystem::path(path).stem().string();
}

// The TF-IDF retriever is fitted on the target-side corpus (the searched
// collection); remote retrievers are stateless HTTP clients.
std::unique_ptr<EmbeddingProvider> make_retriever(const RunConfig& config, const Ontology& target) {
  if (config.retriever.type == "tfidf") {
    std::vector<std::string> corpus;
    corpus.reserve(target.size());
    for (const auto& entry : target.concepts()) {
      corpus.push_back(verbalize_representation(
          build_representation(target, entry.id, config.retrieval_variant)));
    }
    return std::make_unique<TfidfProvider>(fit_tfidf(corpus));
  }
  return std::make_unique<RemoteEmbeddingProvider>(
      with_env_endpoint(config.retriever, "ONTOMATCH_RETRIEVER_ENDPOINT"));
}

std::unique_ptr<LlmProvider> make_llm(const RunConfig& config) {
  if (config.llm.type.empty()) {
    throw ConfigError("field \"llm.type\" must be set (mock or remote) for matching runs");
  }
  if (config.llm.type == "mock") {
    return std::make_unique<MockLlmProvider>(
        MockLlmProvider::from_file(config.llm.fixture));
  }
  return std::make_unique<RemoteLlmProvider>(
      with_env_endpoint(config.llm, "ONTOMATCH_LLM_ENDPOINT"));
}

struct RetrievalStage {
  Ontology source;
  Ontology target;
  ReferenceAlignment reference;
  std::map<std::string, std::vector<CandidatePair>> candidates_by_source;
  std::vector<CandidatePair> candidates_flat;  // source order, then rank order
  double recall = 0.0;
  double parse_seconds = 0.0;
  double kb_seconds = 0.0;
  double retrieve_seconds = 0.0;
};

RetrievalStage run_retrieval_stage(const RunConfig& config, DiskCache* embedding_cache) {
  StageClock clock;
  RetrievalStage stage;

  run_stage("parse", [&] {
    stage.source = parse_ontology(read_file(config.source_path, "source ontology"), Role::source);
    stage.target = parse_ontology(read_file(config.target_path, "target ontology"), Role::target);
    stage.reference = parse_reference_alignment(read_file(config.reference_path, "reference"),
                                                resolve_reference_format(config));
    return 0;
  });
  stage.parse_seconds = clock.lap();

  std::unique_ptr<EmbeddingProvider> retriever;
  std::unique_ptr<CachedEmbeddingProvider> cached_retriever;
  EmbeddingProvider* provider = nullptr;
  KnowledgeBase kb;
  run_stage("knowledge-base", [&] {
    retriever = make_retriever(config, stage.target);
    provider = retriever.get();
    if (embedding_cache != nullptr) {
      cached_retriever = std::make_unique<CachedEmbeddingProvider>(*retriever, *embedding_cache);
      provider = cached_retriever.get();
    }

    const std::uint64_t target_hash = ontology_content_hash(stage.target);
    std::filesystem::path kb_file;
    if (embedding_cache != nullptr) {
      kb_file = embedding_cache->dir() /
                ("kb-" + to_hex(fnv1a64(provider->name())) + "-" +
                 std::string(to_string(config.retrieval_variant)) + "-" + to_hex(target_hash) +
                 ".json");
      if (auto cached = load_knowledge_base(kb_file, provider->name(), config.retrieval_variant,
                                            target_hash)) {
        kb = std::move(*cached);
      }
    }
    if (kb.entries.empty()) {
      kb = build_knowledge_base(stage.target, config.retrieval_variant, *provider,
                                config.batch_size);
      if (!kb_file.empty()) save_knowledge_base(kb, kb_file);
    }
    return 0;
  });
  stage.kb_seconds = clock.lap();

  run_stage("retrieve", [&] {
    for (const auto& entry : stage.source.concepts()) {
      ConceptRepresentation rep =
          build_representation(stage.source, entry.id, config.retrieval_variant);
      std::vector<CandidatePair> ranked = retrieve_candidates(kb, rep, *provider, config.k);
      for (const auto& pair : ranked) stage.candidates_flat.push_back(pair);
      stage.candidates_by_source.emplace(entry.id, std::move(ranked));
    }
    stage.recall = recall_at_k(stage.candidates_by_source, stage.reference, config.k);
    return 0;
  });
  stage.retrieve_seconds = clock.lap();
  return stage;
}

std::vector<Exemplar> load_exemplars(const RunConfig& config, const Ontology& source,
                                     const Ontology& target,
                                     const std::set<PairKey>& evaluation_pairs) {
  if (config.n_shots == 0) return {};
  if (config.exemplars_path.empty()) {
    throw ConfigError("n_shots > 0 requires an \"exemplars\" file of labeled pairs");
  }
  json doc;
  try {
    doc = json::parse(read_file(config.exemplars_path, "exemplars"));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed exemplars document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw ConfigError("exemplars document must be an object with a \"pairs\" array");
  }

  std::vector<LabeledPair> labeled;
  for (const auto& rec : doc["pairs"]) {
    LabeledPair pair;
    pair.source = build_representation(source, rec.at("source").get<std::string>(),
                                       config.llm_variant);
    pair.target = build_representation(target, rec.at("target").get<std::string>(),
                                       config.llm_variant);
    const std::string label = rec.at("label").get<std::string>();
    if (label != "yes" && label != "no") {
      throw ConfigError("exemplar labels must be \"yes\" or \"no\"");
    }
    pair.match = label == "yes";
    labeled.push_back(std::move(pair));
  }
  return build_fewshot_exemplars(labeled, config.n_shots, config.seed, evaluation_pairs);
}

struct ClassifyStage {
  std::vector<MatchDecision> decisions;  // aligned with candidates_flat
  std::uint64_t undecidable = 0;
  double seconds = 0.0;
};

ClassifyStage run_classify_stage(const RunConfig& config, const RetrievalStage& retrieval,
                                 LlmProvider& provider) {
  StageClock clock;
  ClassifyStage stage;

  std::unordered_map<std::string, ConceptRepresentation> source_reps, target_reps;
  for (const auto& entry : retrieval.source.concepts()) {
    source_reps.emplace(entry.id,
                        build_representation(retrieval.source, entry.id, config.llm_variant));
  }
  for (const auto& entry : retrieval.target.concepts()) {
    target_reps.emplace(entry.id,
                        build_representation(retrieval.target, entry.id, config.llm_variant));
  }

  std::set<PairKey> evaluation_pairs;
  for (const auto& pair : retrieval.candidates_flat) {
    evaluation_pairs.insert({pair.source_id, pair.target_id});
  }
  const std::vector<Exemplar> exemplars =
      load_exemplars(config, retrieval.source, retrieval.target, evaluation_pairs);

  std::vector<PromptInstance> prompts;
  prompts.reserve(retrieval.candidates_flat.size());
  for (const auto& pair : retrieval.candidates_flat) {
    prompts.push_back(render_prompt(source_reps.at(pair.source_id),
                                    target_reps.at(pair.target_id), exemplars));
  }

  stage.decisions.resize(prompts.size());
  const std::size_t workers = std::min<std::size_t>(config.workers, std::max<std::size_t>(prompts.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      stage.decisions[i] = classify_pair(provider, prompts[i], retrieval.candidates_flat[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= prompts.size()) return;
        try {
          stage.decisions[i] = classify_pair(provider, prompts[i], retrieval.candidates_flat[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (const auto& d : stage.decisions) {
    if (d.undecidable) ++stage.undecidable;
  }
  stage.seconds = clock.lap();
  return stage;
}

json mapping_to_json(const Mapping& m) {
  json j;
  j["source"] = m.source_id;
  j["target"] = m.target_id;
  j["s_ir"] = m.s_ir;
  j["s_llm"] = m.s_llm.has_value() ? json(*m.s_llm) : json(nullptr);
  j["origin"] = m.origin == MappingOrigin::llm ? "llm" : "exact";
  return j;
}

json alignment_to_json(const Alignment& alignment) {
  json mappings = json::array();
  for (const auto& m : alignment.mappings) mappings.push_back(mapping_to_json(m));
  json j;
  j["source_ontology"] = alignment.source_ontology;
  j["target_ontology"] = alignment.target_ontology;
  j["mappings"] = std::move(mappings);
  return j;
}

json metrics_to_json(const Metrics& metrics, double recall_k, std::size_t k) {
  json j;
  j["precision"] = metrics.precision;
  j["recall"] = metrics.recall;
  j["f1"] = metrics.f1;
  j["true_positives"] = metrics.true_positives;
  j["predicted_count"] = metrics.predicted_count;
  j["reference_count"] = metrics.reference_count;
  j["recall_at_k"] = recall_k;
  j["k"] = k;
  return j;
}

json meta_to_json(const RunMeta& meta) {
  json j;
  j["retriever"] = meta.retriever;
  j["llm"] = meta.llm;
  j["retrieval_variant"] = meta.retrieval_variant;
  j["llm_variant"] = meta.llm_variant;
  j["k"] = meta.k;
  j["s_llm_threshold"] = meta.s_llm_threshold;
  j["s_ir_threshold"] = meta.s_ir_threshold;
  j["n_shots"] = meta.n_shots;
  j["seed"] = meta.seed;
  j["hybrid"] = meta.hybrid;
  return j;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string format_seconds(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", seconds);
  return buf;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  validate_config(config);
  StageClock total_clock;

  std::unique_ptr<DiskCache> embedding_cache, llm_cache;
  if (!config.cache_dir.empty()) {
    embedding_cache = std::make_unique<DiskCache>(config.cache_dir);
    llm_cache = std::make_unique<DiskCache>(config.cache_dir);
  }

  const RetrievalStage retrieval = run_retrieval_stage(config, embedding_cache.get());

  const ClassifyStage classified = run_stage("classify", [&] {
    std::unique_ptr<LlmProvider> llm = make_llm(config);
    std::unique_ptr<CachedLlmProvider> cached_llm;
    LlmProvider* llm_provider = llm.get();
    if (llm_cache != nullptr) {
      cached_llm = std::make_unique<CachedLlmProvider>(*llm, *llm_cache);
      llm_provider = cached_llm.get();
    }
    return run_classify_stage(config, retrieval, *llm_provider);
  });

  StageClock clock;
  const std::string fingerprint = config_fingerprint(config);
  Alignment alignment = run_stage("postprocess", [&] {
    const std::vector<MatchDecision> kept =
        confidence_filter(classified.decisions, config.s_llm_threshold);
    const std::vector<Mapping> exact = high_precision_matches(
        retrieval.candidates_flat, classified.decisions, config.s_ir_threshold);
    return assemble_alignment(kept, exact,
                              ontology_display_name(retrieval.source, config.source_path),
                              ontology_display_name(retrieval.target, config.target_path),
                              fingerprint);
  });
  const double postprocess_seconds = clock.lap();

  const Metrics metrics =
      run_stage("evaluate", [&] { return evaluate_alignment(alignment, retrieval.reference); });
  const double evaluate_seconds = clock.lap();

  RunReport report;
  report.metrics = metrics;
  report.recall_at_k = retrieval.recall;
  report.sources = retrieval.source.size();
  report.targets = retrieval.target.size();
  report.llm_calls = classified.decisions.size();
  report.cache_hits = llm_cache ? llm_cache->hits() : 0;
  report.provider_calls = llm_cache ? llm_cache->misses() : classified.decisions.size();
  report.undecidable = classified.undecidable;
  report.timings.parse = retrieval.parse_seconds;
  report.timings.knowledge_base = retrieval.kb_seconds;
  report.timings.retrieve = retrieval.retrieve_seconds;
  report.timings.classify = classified.seconds;
  report.timings.postprocess = postprocess_seconds;
  report.timings.evaluate = evaluate_seconds;
  report.timings.total = total_clock.since_start();
  report.config_fingerprint = fingerprint;
  report.meta.retriever = config.retriever.type == "tfidf" ? "tfidf" : "remote:" + config.retriever.model;
  report.meta.llm = config.llm.type == "mock" ? "mock" : "remote:" + config.llm.model;
  report.meta.retrieval_variant = std::string(to_string(config.retrieval_variant));
  report.meta.llm_variant = std::string(to_string(config.llm_variant));
  report.meta.k = config.k;
  report.meta.s_llm_threshold = config.s_llm_threshold;
  report.meta.s_ir_threshold = config.s_ir_threshold;
  report.meta.n_shots = config.n_shots;
  report.meta.seed = config.seed;

  if (report.llm_calls > config.k * report.sources) {
    throw Error("internal: llm_calls exceeded the k * sources bound");
  }
  return {std::move(alignment), std::move(report)};
}

std::string emit_report(const RunReport& report, const Alignment& alignment, ReportFormat format) {
  if (format == ReportFormat::machine) {
    json doc;
    doc["alignment"] = alignment_to_json(alignment);
    doc["metrics"] = metrics_to_json(report.metrics, report.recall_at_k, report.meta.k);
    doc["run"] = meta_to_json(report.meta);
    doc["fingerprint"] = report.config_fingerprint;
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "task: " << alignment.source_ontology << " -> " << alignment.target_ontology << "\n";
  out << "retriever: " << report.meta.retriever << " (variant " << report.meta.retrieval_variant
      << ")   llm: " << report.meta.llm << " (variant " << report.meta.llm_variant
      << ")   k: " << report.meta.k << "   shots: " << report.meta.n_shots << "\n";
  out << "sources: " << report.sources << "   targets: " << report.targets
      << "   mappings: " << alignment.mappings.size() << "\n";
  out << "precision: " << format_percent(report.metrics.precision) << "\n";
  out << "recall:    " << format_percent(report.metrics.recall) << "\n";
  out << "F1:        " << format_percent(report.metrics.f1) << "\n";
  out << "recall@" << report.meta.k << ":  " << format_percent(report.recall_at_k) << "\n";
  out << "llm calls: " << report.llm_calls << "   provider calls: " << report.provider_calls
      << "   cache hits: " << report.cache_hits << "   undecidable: " << report.undecidable << "\n";
  out << "timings (s): parse " << format_seconds(report.timings.parse) << "  kb "
      << format_seconds(report.timings.knowledge_base) << "  retrieve "
      << format_seconds(report.timings.retrieve) << "  classify "
      << format_seconds(report.timings.classify) << "  postprocess "
      << format_seconds(report.timings.postprocess) << "  evaluate "
      << format_seconds(report.timings.evaluate) << "  total "
      << format_seconds(report.timings.total) << "\n";
  out << "fingerprint: " << report.config_fingerprint << "\n";
  return out.str();
}

RetrievalReport run_retrieval(const RunConfig& config) {
  validate_config(config);
  StageClock total_clock;

  std::unique_ptr<DiskCache> embedding_cache;
  if (!config.cache_dir.empty()) {
    embedding_cache = std::make_unique<DiskCache>(config.cache_dir);
  }
  const RetrievalStage stage = run_retrieval_stage(config, embedding_cache.get());

  RetrievalReport report;
  report.recall_at_k = stage.recall;
  report.k = config.k;
  report.sources = stage.source.size();
  report.targets = stage.target.size();
  report.timings.parse = stage.parse_seconds;
  report.timings.knowledge_base = stage.kb_seconds;
  report.timings.retrieve = stage.retrieve_seconds;
  report.timings.total = total_clock.since_start();
  report.config_fingerprint = config_fingerprint(config);
  report.retriever =
      config.retriever.type == "tfidf" ? "tfidf" : "remote:" + config.retriever.model;
  report.retrieval_variant = std::string(to_string(config.retrieval_variant));
  return report;
}

std::string emit_retrieval_report(const RetrievalReport& report, ReportFormat format) {
  if (format == ReportFormat::machine) {
    json doc;
    doc["recall_at_k"] = report.recall_at_k;
    doc["k"] = report.k;
    doc["sources"] = report.sources;
    doc["targets"] = report.targets;
    doc["retriever"] = report.retriever;
    doc["retrieval_variant"] = report.retrieval_variant;
    doc["fingerprint"] = report.config_fingerprint;
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "retriever: " << report.retriever << " (variant " << report.retrieval_variant << ")\n";
  out << "sources: " << report.sources << "   targets: " << report.targets << "\n";
  out << "recall@" << report.k << ": " << format_percent(report.recall_at_k) << "\n";
  out << "timings (s): parse " << format_seconds(report.timings.parse) << "  kb "
      << format_seconds(report.timings.knowledge_base) << "  retrieve "
      << format_seconds(report.timings.retrieve) << "  total "
      << format_seconds(report.timings.total) << "\n";
  out << "fingerprint: " << report.config_fingerprint << "\n";
  return out.str();
}

Alignment parse_alignment_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed alignment document: ") + e.what());
  }
  const json* root = &doc;
  if (doc.is_object() && doc.contains("alignment")) root = &doc["alignment"];
  if (!root->is_object() || !root->contains("mappings") || !(*root)["mappings"].is_array()) {
    throw ParseError("alignment document must carry a \"mappings\" array");
  }

  Alignment alignment;
  alignment.source_ontology = root->value("source_ontology", std::string{});
  alignment.target_ontology = root->value("target_ontology", std::string{});
  if (doc.is_object() && doc.contains("fingerprint")) {
    alignment.config_fingerprint = doc.value("fingerprint", std::string{});
  }
  for (const auto& rec : (*root)["mappings"]) {
    Mapping m;
    m.source_id = rec.at("source").get<std::string>();
    m.target_id = rec.at("target").get<std::string>();
    m.s_ir = rec.value("s_ir", 0.0);
    if (rec.contains("s_llm") && !rec["s_llm"].is_null()) m.s_llm = rec["s_llm"].get<double>();
    m.origin = rec.value("origin", std::string("llm")) == "exact" ? MappingOrigin::exact
                                                                  : MappingOrigin::llm;
    alignment.mappings.push_back(std::move(m));
  }
  return alignment;
}

Metrics parse_report_metrics(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed report document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("metrics")) {
    throw ParseError("report document carries no \"metrics\" block");
  }
  const json& m = doc["metrics"];
  Metrics metrics;
  metrics.precision = m.at("precision").get<double>();
  metrics.recall = m.at("recall").get<double>();
  metrics.f1 = m.at("f1").get<double>();
  metrics.true_positives = m.at("true_positives").get<std::size_t>();
  metrics.predicted_count = m.at("predicted_count").get<std::size_t>();
  metrics.reference_count = m.at("reference_count").get<std::size_t>();
  return metrics;
}

std::vector<RunConfig> expand_sweep(const RunConfig& base, const SweepAxes& axes) {
  const std::vector<Variant> rvs =
      axes.retrieval_variants.empty() ? std::vector<Variant>{base.retrieval_variant}
                                      : axes.retrieval_variants;
  const std::vector<Variant> lvs =
      axes.llm_variants.empty() ? std::vector<Variant>{base.llm_variant} : axes.llm_variants;
  const std::vector<std::size_t> ks = axes.ks.empty() ? std::vector<std::size_t>{base.k} : axes.ks;
  const std::vector<ProviderSpec> retrievers =
      axes.retrievers.empty() ? std::vector<ProviderSpec>{base.retriever} : axes.retrievers;

  std::vector<RunConfig> cells;
  for (const auto& retriever : retrievers) {
    for (const auto rv : rvs) {
      for (const auto lv : lvs) {
        for (const auto k : ks) {
          RunConfig cell = base;
          cell.retriever = retriever;
          cell.retrieval_variant = rv;
          cell.llm_variant = lv;
          cell.k = k;
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

}  // namespace ontomatch
