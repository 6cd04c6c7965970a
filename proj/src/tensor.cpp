#include "batchbald/tensor.hpp"

#include <cmath>

#include "batchbald/errors.hpp"

namespace batchbald {

ValidationReport validate_tensor(const PosteriorTensor& t) {
  ValidationReport report;

  InvariantCheck dims{"dimensions", true, -1, -1, ""};
  if (t.n_pool < 1 || t.k < 1 || t.c < 2) {
    dims.pass = false;
    dims.detail = "need n_pool >= 1, k >= 1, c >= 2; got " + std::to_string(t.n_pool) +
                  "x" + std::to_string(t.k) + "x" + std::to_string(t.c);
  } else if (t.probs.size() != static_cast<std::size_t>(t.n_pool * t.k * t.c)) {
    dims.pass = false;
    dims.detail = "payload holds " + std::to_string(t.probs.size()) + " values, dims need " +
                  std::to_string(t.n_pool * t.k * t.c);
  }
  report.checks.push_back(dims);
  if (!dims.pass) {
    // Row checks would index out of bounds; report them as skipped-but-failed.
    report.checks.push_back({"range", false, -1, -1, "not checked: bad dimensions"});
    report.checks.push_back({"row_sum", false, -1, -1, "not checked: bad dimensions"});
    return report;
  }

  InvariantCheck range{"range", true, -1, -1, ""};
  InvariantCheck rowsum{"row_sum", true, -1, -1, ""};
  for (Index i = 0; i < t.n_pool; ++i) {
    for (Index j = 0; j < t.k; ++j) {
      Scalar sum = 0.0;
      for (Index y = 0; y < t.c; ++y) {
        Scalar p = t.at(i, j, y);
        sum += p;
        if (range.pass && !(p >= 0.0 && p <= 1.0)) {
          range.pass = false;
          range.i = i;
          range.j = j;
          range.detail = "entry " + std::to_string(p) + " outside [0,1] at (" +
                         std::to_string(i) + "," + std::to_string(j) + "," +
                         std::to_string(y) + ")";
        }
      }
      if (rowsum.pass && !(std::abs(sum - 1.0) <= kNormTol)) {
        rowsum.pass = false;
        rowsum.i = i;
        rowsum.j = j;
        rowsum.detail = "row (" + std::to_string(i) + "," + std::to_string(j) +
                        ") sums to " + std::to_string(sum);
      }
    }
    if (!range.pass && !rowsum.pass) break;
  }
  report.checks.push_back(range);
  report.checks.push_back(rowsum);
  return report;
}

void require_valid(const PosteriorTensor& t) {
  ValidationReport report = validate_tensor(t);
  if (!report.ok()) throw ValidationFailure(report.first_failure());
}

}  // namespace batchbald
