#include "ontomatch/evaluation.hpp"

#include "ontomatch/errors.hpp"

namespace ontomatch {

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

Metrics evaluate_alignment(const Alignment& predicted, const ReferenceAlignment& reference) {
  if (reference.pairs.empty()) {
    throw MetricError("evaluate_alignment: reference alignment is empty");
  }

  Metrics m;
  m.predicted_count = predicted.mappings.size();
  m.reference_count = reference.pairs.size();
  for (const auto& mapping : predicted.mappings) {
    if (reference.contains(mapping.source_id, mapping.target_id)) {
      ++m.true_positives;
    }
  }
  m.precision = m.predicted_count == 0
                    ? 0.0
                    : static_cast<double>(m.true_positives) / static_cast<double>(m.predicted_count);
  m.recall = static_cast<double>(m.true_positives) / static_cast<double>(m.reference_count);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

}  // namespace ontomatch
