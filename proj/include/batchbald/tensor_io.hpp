#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchbald/tensor.hpp"
#include "batchbald/trace.hpp"
#include "batchbald/types.hpp"

namespace batchbald {

// PTF1 file: bytes 0-3 magic "PTF1"; bytes 4-15 three uint32 LE
// (n_pool, k, c); then n_pool*k*c float64 LE row-major (i, j, y).
// No padding, no trailer.

PosteriorTensor tensor_from_bytes(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> tensor_to_bytes(const PosteriorTensor& t);

PosteriorTensor read_tensor(const std::string& path);
void write_tensor(const PosteriorTensor& t, const std::string& path);

// Acquisition run record. Serialized as a single JSON object with keys
// strategy, b, k, m, seed, exact_limit, acquired, scores, step_ms.
struct ResultsDocument {
  std::string strategy;
  Index b = 0;
  Index k = 0;
  Index m = 0;
  std::uint64_t seed = 0;
  Index exact_limit = 0;
  std::vector<Index> acquired;
  std::vector<Scalar> scores;
  std::vector<double> step_ms;
};

std::string results_to_json(const ResultsDocument& doc);
void write_results(const ResultsDocument& doc, const std::string& path);

// Header + one line per trace row, columns:
// round, train_size, test_accuracy, acquired_indices (semicolon-joined),
// label_entropy_nats, strategy, seed. Reals at fixed 6 decimals.
std::string trace_to_csv(const ALTrace& trace);
void emit_trace_csv(const ALTrace& trace, const std::string& path);

// Multi-run variant: one header, then every trace's rows in order.
std::string traces_to_csv(const std::vector<ALTrace>& traces);

// All file writes in the artifact go through this: write to a sibling
// temp file, then rename into place.
void atomic_write(const std::string& path, const std::string& contents);
void atomic_write(const std::string& path, const std::vector<unsigned char>& bytes);

}  // namespace batchbald
