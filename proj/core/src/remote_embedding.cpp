#include "ontomatch/remote_embedding.hpp"

#include <algorithm>
#include <atomic>

#include "http_json_client.hpp"

namespace ontomatch {

using nlohmann::json;

struct RemoteEmbeddingProvider::Impl {
  ProviderSpec spec;
  detail::JsonHttpClient client;
  mutable std::atomic<std::size_t> discovered_dim{0};

  explicit Impl(ProviderSpec s)
      : spec(std::move(s)),
        client(detail::HttpCallOptions{spec.endpoint, spec.api_key_env, spec.max_retries,
                                       spec.timeout_ms, spec.min_interval_ms}) {}
};

RemoteEmbeddingProvider::RemoteEmbeddingProvider(ProviderSpec spec)
    : impl_(std::make_unique<Impl>(std::move(spec))) {}

RemoteEmbeddingProvider::~RemoteEmbeddingProvider() = default;

std::string RemoteEmbeddingProvider::name() const {
  return "remote:" + (impl_->spec.model.empty() ? "embedding" : impl_->spec.model);
}

std::optional<std::size_t> RemoteEmbeddingProvider::dimensionality() const {
  if (impl_->spec.dimensionality.has_value()) return impl_->spec.dimensionality;
  const std::size_t d = impl_->discovered_dim.load();
  if (d > 0) return d;
  return std::nullopt;
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed(const std::vector<std::string>& texts) {
  json body;
  body["model"] = impl_->spec.model;
  body["input"] = texts;

  const json response = impl_->client.post(body);
  if (!response.contains("data") || !response["data"].is_array()) {
    throw ProviderError("embedding endpoint response is missing the \"data\" array");
  }
  const auto& data = response["data"];
  if (data.size() != texts.size()) {
    throw ProviderError("embedding endpoint returned " + std::to_string(data.size()) +
                        " vectors for " + std::to_string(texts.size()) + " texts");
  }

  std::vector<EmbeddingVector> out(texts.size());
  std::size_t fallback_index = 0;
  for (const auto& item : data) {
    std::size_t index = fallback_index++;
    if (item.contains("index") && item["index"].is_number_unsigned()) {
      index = item["index"].get<std::size_t>();
    }
    if (index >= out.size()) throw ProviderError("embedding endpoint returned an out-of-range index");
    DenseVector vec;
    try {
      vec = item.at("embedding").get<DenseVector>();
    } catch (const json::exception& e) {
      throw ProviderError(std::string("embedding endpoint item is unreadable: ") + e.what());
    }
    out[index] = std::move(vec);
  }

  const std::size_t first_dim = std::get<DenseVector>(out.front()).size();
  for (const auto& v : out) {
    if (std::get<DenseVector>(v).size() != first_dim) {
      throw ProviderError("embedding endpoint returned mixed dimensionalities in one batch");
    }
  }
  if (impl_->spec.dimensionality.has_value() && first_dim != *impl_->spec.dimensionality) {
    throw ProviderError("embedding endpoint returned width " + std::to_string(first_dim) +
                        ", configured width is " + std::to_string(*impl_->spec.dimensionality));
  }
  impl_->discovered_dim.store(first_dim);
  return out;
}

}  // namespace ontomatch
