#include "ontomatch/cache.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"
#include "ontomatch/hash.hpp"

namespace ontomatch {

using nlohmann::json;

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw ConfigError("cache directory " + dir_.string() + " is not writable: " + ec.message());
  }
}

std::optional<std::string> DiskCache::read_entry(const std::filesystem::path& file,
                                                 const std::string& request_bytes) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    json doc;
    in >> doc;
    if (doc.at("request").get<std::string>() != request_bytes) return std::nullopt;
    return doc.at("response").get<std::string>();
  } catch (const json::exception&) {
    std::cerr << "warning: corrupted cache entry " << file.string() << ", recomputing\n";
    return std::nullopt;
  }
}

void DiskCache::write_entry(const std::filesystem::path& file, const std::string& request_bytes,
                            const std::string& response) {
  json doc;
  doc["request"] = request_bytes;
  doc["response"] = response;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "warning: cannot write cache entry " << file.string() << ", continuing\n";
    return;
  }
  out << doc.dump();
}

std::string DiskCache::cached_call(const std::string& provider, const std::string& request_bytes,
                                   const std::function<std::string()>& compute) {
  std::string sanitized;
  for (char c : provider) {
    sanitized += (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_') ? c : '_';
  }
  const std::filesystem::path file =
      dir_ / (sanitized + "-" + to_hex(fnv1a64(request_bytes)) + ".json");

  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto stored = read_entry(file, request_bytes)) {
      hits_.fetch_add(1);
      return *stored;
    }
  }

  // Compute outside the lock; concurrent misses on the same key both compute
  // and the second write is a harmless overwrite of identical content.
  std::string response = compute();
  misses_.fetch_add(1);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    write_entry(file, request_bytes, response);
  }
  return response;
}

namespace {

json vector_to_json(const EmbeddingVector& v) {
  if (const auto* d = std::get_if<DenseVector>(&v)) return json{{"dense", *d}};
  const auto& s = std::get<SparseVector>(v);
  json entries = json::array();
  for (const auto& e : s) entries.push_back(json::array({e.index, e.value}));
  return json{{"sparse", std::move(entries)}};
}

EmbeddingVector vector_from_json(const json& j) {
  if (j.contains("dense")) return j["dense"].get<DenseVector>();
  SparseVector s;
  for (const auto& e : j.at("sparse")) {
    s.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
  }
  return s;
}

}  // namespace

std::vector<EmbeddingVector> CachedEmbeddingProvider::embed(const std::vector<std::string>& texts) {
  const std::string request = json{{"op", "embed"}, {"texts", texts}}.dump();
  const std::string response = cache_.cached_call(inner_.name(), request, [this, &texts]() {
    json out = json::array();
    for (const auto& v : inner_.embed(texts)) out.push_back(vector_to_json(v));
    return out.dump();
  });

  std::vector<EmbeddingVector> vectors;
  try {
    json doc = json::parse(response);
    vectors.reserve(doc.size());
    for (const auto& v : doc) vectors.push_back(vector_from_json(v));
  } catch (const json::exception& e) {
    throw ProviderError(std::string("cached embedding payload is unreadable: ") + e.what());
  }
  return vectors;
}

CompletionResult CachedLlmProvider::complete(const std::string& prompt) {
  const std::string request = json{{"op", "complete"}, {"prompt", prompt}}.dump();
  const std::string response = cache_.cached_call(inner_.name(), request, [this, &prompt]() {
    const CompletionResult r = inner_.complete(prompt);
    json doc;
    doc["mode"] = r.mode == CompletionMode::probability ? "probability" : "text";
    doc["tokens"] = r.token_probabilities;
    doc["text"] = r.text;
    return doc.dump();
  });

  CompletionResult result;
  try {
    json doc = json::parse(response);
    result.mode = doc.at("mode").get<std::string>() == "probability" ? CompletionMode::probability
                                                                     : CompletionMode::text;
    for (const auto& [tok, prob] : doc.at("tokens").items()) {
      result.token_probabilities[tok] = prob.get<double>();
    }
    result.text = doc.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("cached completion payload is unreadable: ") + e.what());
  }
  return result;
}

}  // namespace ontomatch
