#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stlab/curve.hpp"
#include "stlab/errors.hpp"
#include "stlab/parallel.hpp"
#include "stlab/primes.hpp"
#include "stlab/trace.hpp"

namespace stlab {

// Normalized Frobenius angle of one record: a = 2 sqrt(p) cos(pi x), with
// x = 1/2 at primes of bad reduction. The acos argument is clamped to guard
// |a| = floor(2 sqrt p) rounding at the interval ends.
inline double angle_of(const TraceRecord& rec) {
  if (!rec.good) return 0.5;
  double t = static_cast<double>(rec.a) / (2.0 * std::sqrt(static_cast<double>(rec.p)));
  if (t > 1.0) t = 1.0;
  if (t < -1.0) t = -1.0;
  return std::acos(t) / 3.14159265358979323846;
}

struct AngleSequence {
  std::string curve_label;
  std::vector<TraceRecord> records;
  std::vector<double> angles;

  std::size_t length() const { return records.size(); }
};

namespace detail {

// CRC-64/ECMA-182, table driven.
inline std::uint64_t crc64(const unsigned char* data, std::size_t n, std::uint64_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint64_t, 256> t{};
    for (std::uint64_t i = 0; i < 256; ++i) {
      std::uint64_t c = i << 56;
      for (int b = 0; b < 8; ++b) c = (c & 0x8000000000000000ULL) ? (c << 1) ^ 0x42F0E1EBA9EA3693ULL : c << 1;
      t[i] = c;
    }
    return t;
  }();
  for (std::size_t i = 0; i < n; ++i) crc = (crc << 8) ^ table[((crc >> 56) ^ data[i]) & 0xff];
  return crc;
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

constexpr char kCacheMagic[6] = {'S', 'T', 'L', 'A', 'B', '1'};
constexpr std::size_t kRecordBytes = 17;  // u64 p, i64 a, u8 flag

inline std::string encode_records(const std::vector<TraceRecord>& records) {
  std::string payload;
  payload.reserve(records.size() * kRecordBytes);
  for (const auto& r : records) {
    put_u64(payload, r.p);
    put_u64(payload, static_cast<std::uint64_t>(r.a));
    payload.push_back(r.good ? 1 : 0);
  }
  return payload;
}

}  // namespace detail

inline std::filesystem::path cache_file_path(const std::filesystem::path& dir, const std::string& label) {
  return dir / (label + ".trc");
}

inline void save_trace_cache(const std::filesystem::path& dir, const std::string& label,
                             const std::vector<TraceRecord>& records) {
  std::filesystem::create_directories(dir);
  std::string payload = detail::encode_records(records);
  std::string header;
  header.append(detail::kCacheMagic, sizeof(detail::kCacheMagic));
  if (label.size() > 255) throw std::invalid_argument("save_trace_cache: label too long");
  header.push_back(static_cast<char>(label.size()));
  header += label;
  detail::put_u64(header, records.size());
  detail::put_u64(header, detail::crc64(reinterpret_cast<const unsigned char*>(payload.data()), payload.size()));

  auto path = cache_file_path(dir, label);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_trace_cache: cannot open " + tmp.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("save_trace_cache: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);  // atomic replacement
}

// Loads a cache file; returns nullopt when the file does not exist.  Any
// structural or checksum problem raises cache_error.
inline std::optional<std::vector<TraceRecord>> load_trace_cache(const std::filesystem::path& dir,
                                                                const std::string& label) {
  auto path = cache_file_path(dir, label);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* u = reinterpret_cast<const unsigned char*>(blob.data());
  std::size_t n = blob.size();
  if (n < sizeof(detail::kCacheMagic) + 1) throw cache_error("trace cache " + path.string() + ": truncated header");
  if (std::memcmp(u, detail::kCacheMagic, sizeof(detail::kCacheMagic)) != 0)
    throw cache_error("trace cache " + path.string() + ": bad magic");
  std::size_t off = sizeof(detail::kCacheMagic);
  std::size_t label_len = u[off++];
  if (n < off + label_len + 16) throw cache_error("trace cache " + path.string() + ": truncated header");
  std::string file_label(blob.data() + off, label_len);
  off += label_len;
  if (file_label != label)
    throw cache_error("trace cache " + path.string() + ": label mismatch (" + file_label + ")");
  std::uint64_t count = detail::get_u64(u + off);
  off += 8;
  std::uint64_t crc_stored = detail::get_u64(u + off);
  off += 8;
  if (n != off + count * detail::kRecordBytes)
    throw cache_error("trace cache " + path.string() + ": payload size mismatch");
  std::uint64_t crc_actual = detail::crc64(u + off, n - off);
  if (crc_actual != crc_stored) throw cache_error("trace cache " + path.string() + ": checksum mismatch");

  std::vector<TraceRecord> records(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const unsigned char* r = u + off + i * detail::kRecordBytes;
    records[i].k = i + 1;
    records[i].p = detail::get_u64(r);
    records[i].a = static_cast<std::int64_t>(detail::get_u64(r + 8));
    records[i].good = r[16] != 0;
  }
  return records;
}

struct BuildOptions {
  TraceOptions trace;
  std::optional<std::filesystem::path> cache_dir;  // no caching when unset
  unsigned threads = 0;                            // 0 = hardware concurrency
  std::size_t max_primes = 20000000;
};

// Computes (or loads and extends) the first `length` trace records of the
// curve and derives their angles. Deterministic; cache files are written
// atomically.
inline AngleSequence build_sequence(const RationalCurve& curve, std::size_t length, const BuildOptions& opts = {}) {
  if (length < 1) throw std::invalid_argument("build_sequence: length must be >= 1");
  AngleSequence seq;
  seq.curve_label = curve.label;

  std::size_t have = 0;
  if (opts.cache_dir) {
    if (auto cached = load_trace_cache(*opts.cache_dir, curve.label)) {
      seq.records = std::move(*cached);
      have = seq.records.size();
    }
  }

  if (have < length) {
    PrimeTable primes = first_primes(length, opts.max_primes);
    seq.records.resize(length);
    parallel_chunks(length - have, 2048, opts.threads, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        std::size_t k = have + i + 1;  // 1-based index
        seq.records[k - 1] = trace(curve, k, primes.nth(k), opts.trace);
      }
    });
    if (opts.cache_dir) save_trace_cache(*opts.cache_dir, curve.label, seq.records);
  } else if (have > length) {
    seq.records.resize(length);
  }

  seq.angles.resize(length);
  for (std::size_t i = 0; i < length; ++i) seq.angles[i] = angle_of(seq.records[i]);
  return seq;
}

// CSV export: columns k,p,a,flag,x with x printed to 17 significant digits.
inline void write_angles_csv(const AngleSequence& seq, std::ostream& out) {
  out << "k,p,a,flag,x\n";
  char buf[64];
  for (std::size_t i = 0; i < seq.length(); ++i) {
    const auto& r = seq.records[i];
    std::snprintf(buf, sizeof(buf), "%.17g", seq.angles[i]);
    out << r.k << ',' << r.p << ',' << r.a << ',' << (r.good ? "good" : "bad") << ',' << buf << '\n';
  }
}

}  // namespace stlab
