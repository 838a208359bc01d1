#include "ontomatch/prompt.hpp"

#include <random>

#include "ontomatch/errors.hpp"

namespace ontomatch {

namespace {

void append_context_line(std::string& out, const ConceptRepresentation& rep) {
  if (rep.variant == Variant::C) return;
  out += rep.variant == Variant::CP ? "Parents: " : "Children: ";
  for (std::size_t i = 0; i < rep.context_texts.size(); ++i) {
    if (i > 0) out += ", ";
    out += rep.context_texts[i];
  }
  out += '\n';
}

void append_block(std::string& out, const ConceptRepresentation& source,
                  const ConceptRepresentation& target) {
  out += "Classify if two concepts refer to the same real-world entity or not "
         "(answer only yes or no).\n";
  out += "### First concept:\n";
  out += source.core_text;
  out += '\n';
  append_context_line(out, source);
  out += "### Second concept:\n";
  out += target.core_text;
  out += '\n';
  append_context_line(out, target);
  out += "### Answer:";
}

// Seeded Fisher-Yates over indices. Hand-rolled so the draw is identical
// across standard library implementations.
std::vector<std::size_t> shuffled_indices(std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  for (std::size_t i = count; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

PromptInstance render_prompt(const ConceptRepresentation& source_rep,
                             const ConceptRepresentation& target_rep,
                             const std::vector<Exemplar>& exemplars) {
  if (source_rep.variant != target_rep.variant) {
    throw ContractError("render_prompt: source and target representations use different variants");
  }

  PromptInstance prompt;
  prompt.source_id = source_rep.concept_id;
  prompt.target_id = target_rep.concept_id;
  prompt.variant = source_rep.variant;
  prompt.exemplar_count = exemplars.size();

  for (const auto& ex : exemplars) {
    if (ex.source.variant != source_rep.variant || ex.target.variant != source_rep.variant) {
      throw ContractError("render_prompt: exemplar variant does not match the query variant");
    }
    append_block(prompt.text, ex.source, ex.target);
    prompt.text += ex.match ? " yes\n\n" : " no\n\n";
  }
  append_block(prompt.text, source_rep, target_rep);
  return prompt;
}

std::vector<Exemplar> build_fewshot_exemplars(const std::vector<LabeledPair>& train_pairs,
                                              std::size_t n, std::uint64_t seed,
                                              const std::set<PairKey>& exclude) {
  if (n == 0) return {};

  std::vector<const LabeledPair*> positives, negatives;
  for (const auto& pair : train_pairs) {
    if (exclude.count({pair.source.concept_id, pair.target.concept_id}) > 0) continue;
    (pair.match ? positives : negatives).push_back(&pair);
  }

  if (positives.size() + negatives.size() < n) {
    throw ConfigError("build_fewshot_exemplars: need " + std::to_string(n) +
                      " exemplars but only " + std::to_string(positives.size() + negatives.size()) +
                      " labeled pairs are available");
  }
  if (n >= 2 && (positives.empty() || negatives.empty())) {
    throw ConfigError("build_fewshot_exemplars: both classes are required for n >= 2");
  }

  // Split the budget as evenly as availability allows, extra slot to "yes".
  std::size_t want_yes = std::min((n + 1) / 2, positives.size());
  std::size_t want_no = std::min(n - want_yes, negatives.size());
  want_yes = std::min(n - want_no, positives.size());

  std::mt19937_64 rng(seed);
  auto yes_order = shuffled_indices(positives.size(), rng);
  auto no_order = shuffled_indices(negatives.size(), rng);

  std::vector<Exemplar> selected;
  selected.reserve(n);
  std::size_t yi = 0, ni = 0;
  while (selected.size() < n) {
    if (yi < want_yes) {
      const auto* p = positives[yes_order[yi++]];
      selected.push_back({p->source, p->target, true});
    }
    if (selected.size() < n && ni < want_no) {
      const auto* p = negatives[no_order[ni++]];
      selected.push_back({p->source, p->target, false});
    }
    if (yi >= want_yes && ni >= want_no) break;
  }
  if (selected.size() != n) {
    throw ConfigError("build_fewshot_exemplars: class balance cannot be satisfied");
  }
  return selected;
}

}  // namespace ontomatch
