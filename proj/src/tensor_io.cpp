#include "batchbald/tensor_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "batchbald/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "PTF1 I/O assumes a little-endian host");
static_assert(sizeof(double) == 8, "PTF1 I/O assumes 64-bit IEEE doubles");

namespace batchbald {

namespace {

constexpr char kMagic[4] = {'P', 'T', 'F', '1'};
constexpr std::size_t kHeaderBytes = 16;

std::uint32_t read_u32(const unsigned char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  unsigned char buf[4];
  std::memcpy(buf, &v, 4);
  out.insert(out.end(), buf, buf + 4);
}

std::string fmt_fixed(Scalar v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  return buf;
}

}  // namespace

PosteriorTensor tensor_from_bytes(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic, expected PTF1", 0);
  if (bytes.size() < kHeaderBytes)
    throw FormatError("truncated header, need 16 bytes", bytes.size());

  const std::uint64_t n_pool = read_u32(bytes.data() + 4);
  const std::uint64_t k = read_u32(bytes.data() + 8);
  const std::uint64_t c = read_u32(bytes.data() + 12);

  // 2^61 values would already overflow the byte count below.
  if (n_pool != 0 && k != 0 && c != 0 &&
      (n_pool > (1ULL << 61) / k || n_pool * k > (1ULL << 61) / c))
    throw FormatError("dimension overflow: " + std::to_string(n_pool) + "x" +
                          std::to_string(k) + "x" + std::to_string(c),
                      4);
  const std::uint64_t values = n_pool * k * c;
  const std::uint64_t payload_bytes = values * 8;

  if (bytes.size() < kHeaderBytes + payload_bytes)
    throw FormatError("truncated payload: header claims " + std::to_string(values) +
                          " values, file holds " +
                          std::to_string((bytes.size() - kHeaderBytes) / 8),
                      bytes.size());
  if (bytes.size() > kHeaderBytes + payload_bytes)
    throw FormatError("trailing bytes after payload", kHeaderBytes + payload_bytes);

  PosteriorTensor t;
  t.n_pool = static_cast<Index>(n_pool);
  t.k = static_cast<Index>(k);
  t.c = static_cast<Index>(c);
  t.probs.resize(values);
  if (values > 0) std::memcpy(t.probs.data(), bytes.data() + kHeaderBytes, payload_bytes);
  return t;
}

std::vector<unsigned char> tensor_to_bytes(const PosteriorTensor& t) {
  std::vector<unsigned char> out;
  out.reserve(kHeaderBytes + t.probs.size() * 8);
  out.insert(out.end(), kMagic, kMagic + 4);
  append_u32(out, static_cast<std::uint32_t>(t.n_pool));
  append_u32(out, static_cast<std::uint32_t>(t.k));
  append_u32(out, static_cast<std::uint32_t>(t.c));
  const auto* p = reinterpret_cast<const unsigned char*>(t.probs.data());
  out.insert(out.end(), p, p + t.probs.size() * 8);
  return out;
}

PosteriorTensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path, 0);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return tensor_from_bytes(bytes);
}

void write_tensor(const PosteriorTensor& t, const std::string& path) {
  atomic_write(path, tensor_to_bytes(t));
}

std::string results_to_json(const ResultsDocument& doc) {
  nlohmann::ordered_json j;
  j["strategy"] = doc.strategy;
  j["b"] = doc.b;
  j["k"] = doc.k;
  j["m"] = doc.m;
  j["seed"] = doc.seed;
  j["exact_limit"] = doc.exact_limit;
  j["acquired"] = doc.acquired;
  j["scores"] = doc.scores;
  j["step_ms"] = doc.step_ms;
  return j.dump(2) + "\n";
}

void write_results(const ResultsDocument& doc, const std::string& path) {
  atomic_write(path, results_to_json(doc));
}

namespace {

void append_trace_rows(std::string& out, const ALTrace& trace) {
  for (const TraceRow& row : trace.rows) {
    out += std::to_string(row.round);
    out += ',';
    out += std::to_string(row.train_size);
    out += ',';
    out += fmt_fixed(row.test_accuracy, 6);
    out += ',';
    for (std::size_t a = 0; a < row.acquired.size(); ++a) {
      if (a) out += ';';
      out += std::to_string(row.acquired[a]);
    }
    out += ',';
    out += fmt_fixed(row.label_entropy_nats, 6);
    out += ',';
    out += trace.strategy;
    out += ',';
    out += std::to_string(trace.seed);
    out += '\n';
  }
}

}  // namespace

std::string trace_to_csv(const ALTrace& trace) {
  if (trace.rows.empty()) throw DomainError("empty trace");
  std::string out =
      "round,train_size,test_accuracy,acquired_indices,label_entropy_nats,strategy,seed\n";
  append_trace_rows(out, trace);
  return out;
}

std::string traces_to_csv(const std::vector<ALTrace>& traces) {
  std::string out =
      "round,train_size,test_accuracy,acquired_indices,label_entropy_nats,strategy,seed\n";
  for (const ALTrace& trace : traces) append_trace_rows(out, trace);
  return out;
}

void emit_trace_csv(const ALTrace& trace, const std::string& path) {
  atomic_write(path, trace_to_csv(trace));
}

void atomic_write(const std::string& path, const std::vector<unsigned char>& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void atomic_write(const std::string& path, const std::string& contents) {
  atomic_write(path, std::vector<unsigned char>(contents.begin(), contents.end()));
}

}  // namespace batchbald
