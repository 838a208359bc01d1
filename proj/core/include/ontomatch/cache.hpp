#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "ontomatch/embedding.hpp"
#include "ontomatch/llm.hpp"

namespace ontomatch {

/// Content-addressed response store, one file per (provider, request) key.
/// Hits skip the compute entirely; corrupted entries are recomputed with a
/// warning; write failures never abort the run. Reads and writes are
/// serialized internally, so concurrent workers can share one instance.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir);

  /// Returns the stored response for (provider, request_bytes) or invokes
  /// compute, persists its result and returns it. The full request is stored
  /// alongside the response and compared on read, so hash collisions and any
  /// byte-level change in the request invalidate the entry.
  std::string cached_call(const std::string& provider, const std::string& request_bytes,
                          const std::function<std::string()>& compute);

  std::uint64_t hits() const noexcept { return hits_.load(); }
  std::uint64_t misses() const noexcept { return misses_.load(); }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::optional<std::string> read_entry(const std::filesystem::path& file,
                                        const std::string& request_bytes);
  void write_entry(const std::filesystem::path& file, const std::string& request_bytes,
                   const std::string& response);

  std::filesystem::path dir_;
  std::mutex mutex_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

/// Wraps an embedding provider with a DiskCache; one cache entry per batch.
class CachedEmbeddingProvider final : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(EmbeddingProvider& inner, DiskCache& cache)
      : inner_(inner), cache_(cache) {}

  std::string name() const override { return inner_.name(); }
  std::optional<std::size_t> dimensionality() const override { return inner_.dimensionality(); }
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  EmbeddingProvider& inner_;
  DiskCache& cache_;
};

/// Wraps an LLM provider with a DiskCache; one cache entry per prompt.
class CachedLlmProvider final : public LlmProvider {
 public:
  CachedLlmProvider(LlmProvider& inner, DiskCache& cache) : inner_(inner), cache_(cache) {}

  std::string name() const override { return inner_.name(); }
  CompletionResult complete(const std::string& prompt) override;

 private:
  LlmProvider& inner_;
  DiskCache& cache_;
};

}  // namespace ontomatch
