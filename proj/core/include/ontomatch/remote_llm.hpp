#pragma once

#include <memory>
#include <string>

#include "ontomatch/config.hpp"
#include "ontomatch/llm.hpp"

namespace ontomatch {

/// Chat-completion provider: single user message, temperature 0, a handful of
/// output tokens, logprobs requested when the endpoint supports them. With
/// logprobs in the response the completion is reported in probability mode
/// (first generated token's top alternatives); otherwise the generated text
/// is returned for text-parse classification.
class RemoteLlmProvider final : public LlmProvider {
 public:
  explicit RemoteLlmProvider(ProviderSpec spec);
  ~RemoteLlmProvider() override;

  std::string name() const override;
  CompletionResult complete(const std::string& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ontomatch
