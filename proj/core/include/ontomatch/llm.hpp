#pragma once

#include <map>
#include <string>
#include <utility>

#include "ontomatch/knowledge_base.hpp"
#include "ontomatch/prompt.hpp"

namespace ontomatch {

/// How a provider reports its verdict: a next-token probability map at the
/// answer position, or generated text only.
enum class CompletionMode { probability, text };

struct CompletionResult {
  CompletionMode mode = CompletionMode::text;
  std::map<std::string, double> token_probabilities;  // probability mode
  std::string text;                                   // text mode
};

/// Port for language models. Each call classifies one rendered prompt.
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string name() const = 0;
  virtual CompletionResult complete(const std::string& prompt) = 0;
};

enum class MatchClass { yes, no };

/// LLM verdict for one candidate pair.
struct MatchDecision {
  std::string source_id;
  std::string target_id;
  MatchClass predicted_class = MatchClass::no;
  double s_llm = 0.0;  // P(yes) / (P(yes) + P(no)) in probability mode; 0 or 1 in text mode
  double s_ir = 0.0;   // carried from retrieval
  CompletionMode mode = CompletionMode::probability;
  bool undecidable = false;  // no label-word mass / no label word in the output
};

/// Aggregates the label-word mass: yes/true/right vs no/false/wrong, matched
/// case-insensitively with surrounding whitespace ignored. Returns the class
/// and s_llm = P_yes / (P_yes + P_no); class is yes iff s_llm >= 0.5.
/// Throws UndecidableError when no token carries label mass and ContractError
/// on an empty or negative-valued map.
std::pair<MatchClass, double> derive_confidence(
    const std::map<std::string, double>& token_probabilities);

/// Runs the provider on the prompt and converts the completion into a
/// MatchDecision, copying s_ir from the candidate. Undecidable completions
/// (zero label mass, or text with no label word) fall back to class no with
/// s_llm 0 and are flagged.
MatchDecision classify_pair(LlmProvider& provider, const PromptInstance& prompt,
                            const CandidatePair& candidate);

/// Fixture-backed provider for tests and offline runs. The fixture maps
/// (source core text, target core text) to a label-token probability map;
/// unlisted pairs answer {"no": 1.0}. The pair texts are read back from the
/// final block of the rendered prompt.
class MockLlmProvider final : public LlmProvider {
 public:
  /// fixture_json: { "pairs": [ { "source": text, "target": text,
  ///                              "tokens": { token: probability } } ] }
  explicit MockLlmProvider(std::string_view fixture_json);
  static MockLlmProvider from_file(const std::string& path);

  std::string name() const override { return "mock"; }
  CompletionResult complete(const std::string& prompt) override;

 private:
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> table_;
};

}  // namespace ontomatch
