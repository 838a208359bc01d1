#include "ontomatch/llm.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ontomatch/errors.hpp"

namespace ontomatch {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kYesWords = {"yes", "true", "right"};
constexpr std::array<std::string_view, 3> kNoWords = {"no", "false", "wrong"};

// Lowercase and strip surrounding whitespace, including the common BPE
// leading-space markers (U+0120, U+2581) so raw tokenizer vocab entries match.
std::string normalize_token(std::string_view token) {
  std::string s(token);
  auto strip_prefix = [&s](std::string_view p) {
    if (s.size() >= p.size() && std::string_view(s).substr(0, p.size()) == p) {
      s.erase(0, p.size());
      return true;
    }
    return false;
  };
  for (;;) {
    if (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
      s.erase(s.begin());
      continue;
    }
    if (strip_prefix("\xc4\xa0") || strip_prefix("\xe2\x96\x81")) continue;
    break;
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool in_word_set(const std::string& token, const std::array<std::string_view, 3>& words) {
  for (auto w : words) {
    if (token == w) return true;
  }
  return false;
}

}  // namespace

std::pair<MatchClass, double> derive_confidence(
    const std::map<std::string, double>& token_probabilities) {
  if (token_probabilities.empty()) {
    throw ContractError("derive_confidence: probability map is empty");
  }
  double p_yes = 0.0, p_no = 0.0;
  for (const auto& [token, prob] : token_probabilities) {
    if (!(prob >= 0.0) || !std::isfinite(prob)) {
      throw ContractError("derive_confidence: probabilities must be finite and non-negative");
    }
    const std::string norm = normalize_token(token);
    if (in_word_set(norm, kYesWords)) p_yes += prob;
    else if (in_word_set(norm, kNoWords)) p_no += prob;
  }
  if (p_yes + p_no == 0.0) {
    throw UndecidableError("derive_confidence: no probability mass on label words");
  }
  const double s_llm = p_yes / (p_yes + p_no);
  return {s_llm >= 0.5 ? MatchClass::yes : MatchClass::no, s_llm};
}

namespace {

// First label word in the generated text decides the class; words are maximal
// alphanumeric runs, matched case-insensitively.
std::pair<MatchClass, double> parse_text_verdict(const std::string& text, bool& undecidable) {
  std::string word;
  auto check = [&word, &undecidable]() -> std::optional<std::pair<MatchClass, double>> {
    if (word.empty()) return std::nullopt;
    if (in_word_set(word, kYesWords)) return std::make_pair(MatchClass::yes, 1.0);
    if (in_word_set(word, kNoWords)) return std::make_pair(MatchClass::no, 0.0);
    word.clear();
    return std::nullopt;
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (auto verdict = check()) {
      undecidable = false;
      return *verdict;
    }
  }
  if (auto verdict = check()) {
    undecidable = false;
    return *verdict;
  }
  undecidable = true;
  return {MatchClass::no, 0.0};
}

}  // namespace

MatchDecision classify_pair(LlmProvider& provider, const PromptInstance& prompt,
                            const CandidatePair& candidate) {
  const CompletionResult result = provider.complete(prompt.text);

  MatchDecision decision;
  decision.source_id = prompt.source_id;
  decision.target_id = prompt.target_id;
  decision.s_ir = candidate.s_ir;
  decision.mode = result.mode;

  if (result.mode == CompletionMode::probability) {
    try {
      auto [cls, s_llm] = derive_confidence(result.token_probabilities);
      decision.predicted_class = cls;
      decision.s_llm = s_llm;
    } catch (const UndecidableError&) {
      decision.predicted_class = MatchClass::no;
      decision.s_llm = 0.0;
      decision.undecidable = true;
    }
  } else {
    auto [cls, s_llm] = parse_text_verdict(result.text, decision.undecidable);
    decision.predicted_class = cls;
    decision.s_llm = s_llm;
  }
  return decision;
}

MockLlmProvider::MockLlmProvider(std::string_view fixture_json) {
  json doc;
  try {
    doc = json::parse(fixture_json);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed mock fixture: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw ParseError("mock fixture must be an object with a \"pairs\" array");
  }
  for (const auto& entry : doc["pairs"]) {
    std::map<std::string, double> tokens;
    for (const auto& [tok, prob] : entry.at("tokens").items()) {
      tokens[tok] = prob.get<double>();
    }
    table_[{entry.at("source").get<std::string>(), entry.at("target").get<std::string>()}] =
        std::move(tokens);
  }
}

MockLlmProvider MockLlmProvider::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open mock fixture file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return MockLlmProvider(buf.str());
}

CompletionResult MockLlmProvider::complete(const std::string& prompt) {
  // The query block is the last one; exemplar blocks precede it.
  auto line_after = [&prompt](std::string_view marker) -> std::string {
    std::size_t at = prompt.rfind(marker);
    if (at == std::string::npos) return {};
    std::size_t begin = at + marker.size();
    std::size_t end = prompt.find('\n', begin);
    if (end == std::string::npos) end = prompt.size();
    return prompt.substr(begin, end - begin);
  };
  const std::string source = line_after("### First concept:\n");
  const std::string target = line_after("### Second concept:\n");

  CompletionResult result;
  result.mode = CompletionMode::probability;
  auto it = table_.find({source, target});
  if (it != table_.end()) {
    result.token_probabilities = it->second;
  } else {
    result.token_probabilities = {{"no", 1.0}};
  }
  return result;
}

}  // namespace ontomatch
