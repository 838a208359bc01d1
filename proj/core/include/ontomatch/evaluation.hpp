#pragma once

#include <cstddef>

#include "ontomatch/postprocess.hpp"
#include "ontomatch/reference.hpp"

namespace ontomatch {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted_count = 0;
  std::size_t reference_count = 0;
};

/// 2PR / (P + R), 0 when both are 0.
double f1_score(double precision, double recall);

/// Strict (source_id, target_id) identity scoring. Precision of an empty
/// prediction set is 0 by convention. Throws MetricError on an empty
/// reference.
Metrics evaluate_alignment(const Alignment& predicted, const ReferenceAlignment& reference);

}  // namespace ontomatch
