#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncdm/element.hpp"

namespace ncdm {

enum class BackendKind { kDeflate, kBwtBlock, kExternal };

/// A deterministic real-world compressor. Only output lengths are used.
///
/// Instances are immutable and safe to share between threads; the
/// library backends are reentrant and the external backend spawns one
/// process per call.
class Backend {
 public:
  /// bzip2 with the given block size in units of 100k (1..9); 9 is the
  /// bzip2 command-line default.
  static Backend bzip2(int block_size = 9);
  /// zlib-wrapped deflate at the given level (0..9, -1 = zlib default).
  static Backend deflate(int level = -1);
  /// Runs `/bin/sh -c command`, feeding plaintext on stdin and counting
  /// the bytes written to stdout.
  static Backend external(std::string command);

  /// Parses "bzip2", "bzip2:N", "deflate", "deflate:N", "cmd:<command line>".
  static Backend parse(std::string_view spec);

  BackendKind kind() const noexcept { return kind_; }
  int level() const noexcept { return level_; }
  const std::string& command() const noexcept { return command_; }

  /// Canonical spec string, round-trips through parse().
  std::string name() const;

  std::size_t compressed_size(std::string_view data) const;

 private:
  Backend(BackendKind kind, int level, std::string command)
      : kind_(kind), level_(level), command_(std::move(command)) {}

  BackendKind kind_;
  int level_;
  std::string command_;
};

/// G(x): byte length of the backend's output for `data`.
inline std::size_t compress_len(const Backend& backend, std::string_view data) {
  return backend.compressed_size(data);
}

enum class Framing {
  kText,            ///< elements joined by a separator byte
  kLengthPrefixed,  ///< LEB128 length followed by the payload, per element
};

inline constexpr char kDefaultSeparator = '\n';

/// Serializes the multiset in canonical order. Throws DegenerateInput in
/// text mode when an element contains the separator byte.
std::string serialize_multiset(const Multiset& x, Framing framing,
                               char separator = kDefaultSeparator);

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256 over a backend tag and the payload, so sizes measured with
/// different backends never share a cache key.
Digest content_digest(std::string_view backend_tag, std::string_view bytes);
std::string to_hex(const Digest& d);
std::optional<Digest> digest_from_hex(std::string_view hex);

/// Thread-safe memo of compressed sizes keyed by content digest.
///
/// Concurrent requests for the same key run the computation once; the
/// other callers wait for that result.
class SizeCache {
 public:
  std::size_t get_or_compute(const Digest& key,
                             const std::function<std::size_t()>& compute);
  std::optional<std::size_t> lookup(const Digest& key) const;
  void insert(const Digest& key, std::size_t size);
  std::size_t size() const;

  /// Snapshot format: one `hex-digest<TAB>size` record per line, sorted
  /// by digest.
  void load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mutex_;
  std::map<Digest, std::shared_future<std::size_t>> entries_;
};

struct EngineOptions {
  Framing framing = Framing::kText;
  char separator = kDefaultSeparator;
  /// Worker threads for parallel maps; 0 = hardware concurrency.
  unsigned jobs = 0;
  /// Slack above 1 tolerated in reported NCD values.
  double epsilon = 0.1;
  /// When false, every G(X) request compresses afresh.
  bool memoize = true;
};

/// Binds a backend, a framing mode and a size cache: the G(·) oracle used
/// by every distance computation.
class Engine {
 public:
  explicit Engine(Backend backend, EngineOptions options = {},
                  std::shared_ptr<SizeCache> cache = nullptr);

  const Backend& backend() const noexcept { return backend_; }
  const EngineOptions& options() const noexcept { return options_; }
  unsigned jobs() const noexcept { return options_.jobs; }
  SizeCache& cache() const noexcept { return *cache_; }
  std::shared_ptr<SizeCache> shared_cache() const noexcept { return cache_; }

  /// G(X) = compress_len(serialize_multiset(X)). X must be non-empty.
  std::size_t g(const Multiset& x) const;
  /// G({x}).
  std::size_t g(const Element& x) const;

  /// Number of compressor invocations actually executed so far.
  std::size_t compression_jobs() const noexcept { return jobs_issued_->load(); }
  void reset_job_counter() noexcept { jobs_issued_->store(0); }

 private:
  std::size_t measure(const std::string& bytes) const;

  Backend backend_;
  EngineOptions options_;
  std::shared_ptr<SizeCache> cache_;
  std::unique_ptr<std::atomic<std::size_t>> jobs_issued_;
};

// Normal-compressor diagnostics ---------------------------------------------

struct NormalityOptions {
  /// tol(n) = slack_base + (log_slack ? ceil(log2(1 + n)) : 0) bytes.
  double slack_base = 64.0;
  bool log_slack = true;
  /// Pairs and triples sampled per property.
  std::size_t max_samples = 64;
  std::uint64_t seed = 1;
  unsigned jobs = 0;
};

double normality_tolerance(std::size_t input_size, const NormalityOptions& opts);

struct NormalityViolation {
  std::vector<std::string> ids;
  double slack = 0;      ///< measured excess in bytes
  double tolerance = 0;  ///< tolerance it was compared to
};

struct NormalityReport {
  std::vector<NormalityViolation> idempotency;
  std::vector<NormalityViolation> monotonicity;
  std::vector<NormalityViolation> symmetry;
  std::vector<NormalityViolation> distributivity;
  std::size_t idempotency_checked = 0;
  std::size_t monotonicity_checked = 0;
  std::size_t symmetry_checked = 0;
  std::size_t distributivity_checked = 0;
  NormalityOptions options;
};

/// Checks idempotency, monotonicity, symmetry and distributivity of the
/// backend on raw concatenations of corpus elements.
NormalityReport normality_report(const Backend& backend,
                                 std::span<const Element> corpus,
                                 const NormalityOptions& opts = {});

}  // namespace ncdm
