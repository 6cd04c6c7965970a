#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchbald/types.hpp"

namespace batchbald {

// One evaluation point of an active-learning loop. Row 0 is the initial
// evaluation before any acquisition (train_size 0, no indices).
struct TraceRow {
  Index round = 0;
  Index train_size = 0;
  Scalar test_accuracy = 0.0;
  std::vector<Index> acquired;          // indices acquired this round
  Scalar label_entropy_nats = 0.0;      // entropy of all labels acquired so far
  std::vector<Index> class_counts;      // cumulative per-class label counts
};

struct ALTrace {
  std::string strategy;
  std::uint64_t seed = 0;
  Index classes = 0;
  std::vector<TraceRow> rows;
};

}  // namespace batchbald
