#include "ontomatch/remote_llm.hpp"

#include <cmath>

#include "http_json_client.hpp"

namespace ontomatch {

using nlohmann::json;

struct RemoteLlmProvider::Impl {
  ProviderSpec spec;
  detail::JsonHttpClient client;

  explicit Impl(ProviderSpec s)
      : spec(std::move(s)),
        client(detail::HttpCallOptions{spec.endpoint, spec.api_key_env, spec.max_retries,
                                       spec.timeout_ms, spec.min_interval_ms}) {}
};

RemoteLlmProvider::RemoteLlmProvider(ProviderSpec spec)
    : impl_(std::make_unique<Impl>(std::move(spec))) {}

RemoteLlmProvider::~RemoteLlmProvider() = default;

std::string RemoteLlmProvider::name() const {
  return "remote:" + (impl_->spec.model.empty() ? "llm" : impl_->spec.model);
}

CompletionResult RemoteLlmProvider::complete(const std::string& prompt) {
  json body;
  body["model"] = impl_->spec.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = 0.0;
  body["max_tokens"] = 8;
  if (impl_->spec.logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = 20;
  }

  const json response = impl_->client.post(body);
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    throw ProviderError("chat endpoint response carries no choices");
  }
  const json& choice = response["choices"][0];

  CompletionResult result;

  // Probability mode: top alternatives for the first generated token.
  if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
    const json& lp = choice["logprobs"];
    if (lp.contains("content") && lp["content"].is_array() && !lp["content"].empty()) {
      const json& first = lp["content"][0];
      result.mode = CompletionMode::probability;
      if (first.contains("token") && first.contains("logprob")) {
        result.token_probabilities[first["token"].get<std::string>()] +=
            std::exp(first["logprob"].get<double>());
      }
      if (first.contains("top_logprobs") && first["top_logprobs"].is_array()) {
        for (const auto& alt : first["top_logprobs"]) {
          const std::string token = alt.at("token").get<std::string>();
          const double prob = std::exp(alt.at("logprob").get<double>());
          // the chosen token usually repeats inside top_logprobs; keep one copy
          auto [it, inserted] = result.token_probabilities.emplace(token, prob);
          if (!inserted && prob > it->second) it->second = prob;
        }
      }
      if (!result.token_probabilities.empty()) return result;
    }
  }

  // Text mode fallback.
  result.mode = CompletionMode::text;
  try {
    result.text = choice.at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProviderError("chat endpoint response carries neither logprobs nor message content");
  }
  return result;
}

}  // namespace ontomatch
