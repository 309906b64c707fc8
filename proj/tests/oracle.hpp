#pragma once

// Brute-force reference implementations. They deliberately avoid the
// library's Multiset, serializer, cache and NCD code: sorting, joining and
// compressing are done directly on std::string.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncdm/compressor.hpp"
#include "ncdm/ingest.hpp"

namespace ncdm::oracle {

class PowersetNcd {
 public:
  explicit PowersetNcd(Backend backend) : backend_(std::move(backend)) {}

  /// Text-framed G of a bag given as raw strings.
  double g(std::vector<std::string> bag) {
    std::sort(bag.begin(), bag.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::string joined;
    for (std::size_t i = 0; i < bag.size(); ++i) {
      if (i) joined.push_back('\n');
      joined += bag[i];
    }
    auto it = memo_.find(joined);
    if (it != memo_.end()) return it->second;
    double v = static_cast<double>(backend_.compressed_size(joined));
    memo_.emplace(std::move(joined), v);
    return v;
  }

  double ncd1(const std::vector<std::string>& bag) {
    double whole = g(bag);
    double min_single = 1e300, max_loo = 0;
    for (std::size_t i = 0; i < bag.size(); ++i) {
      min_single = std::min(min_single, g({bag[i]}));
      std::vector<std::string> rest;
      for (std::size_t j = 0; j < bag.size(); ++j) {
        if (j != i) rest.push_back(bag[j]);
      }
      max_loo = std::max(max_loo, g(rest));
    }
    return (whole - min_single) / max_loo;
  }

  /// Maximum NCD1 over every index subset of size >= 2.
  double exact(const std::vector<std::string>& bag) {
    double best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bag.size()); ++mask) {
      if (std::popcount(mask) < 2) continue;
      std::vector<std::string> sub;
      for (std::size_t i = 0; i < bag.size(); ++i) {
        if (mask >> i & 1) sub.push_back(bag[i]);
      }
      best = std::max(best, ncd1(sub));
    }
    return best;
  }

 private:
  Backend backend_;
  std::map<std::string, double> memo_;
};

/// Otsu by brute force: for every candidate t, rescan the pixels, form the
/// dark (<= t) and light classes and compare between-class variances as
/// exact fractions. Equal maxima on consecutive thresholds resolve to the
/// midpoint of the first such run. Returns -1 when no t splits the image.
inline int otsu_brute_force(const ingest::GrayImage& img) {
  __extension__ typedef __int128 i128;
  struct Score {
    bool valid = false;
    i128 num = 0, den = 1;  // variance * N^2 = num / den
  };
  std::vector<Score> score(256);
  for (int t = 0; t < 256; ++t) {
    i128 n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (auto p : img.pixels) {
      if (p <= t) {
        ++n0;
        s0 += p;
      } else {
        ++n1;
        s1 += p;
      }
    }
    if (n0 == 0 || n1 == 0) continue;
    // w0 w1 (m0 - m1)^2 with w = n/N and m = s/n.
    i128 d = s0 * n1 - s1 * n0;
    score[t] = {true, d * d, n0 * n1};
  }
  auto greater = [](const Score& a, const Score& b) { return a.num * b.den > b.num * a.den; };
  auto equal = [](const Score& a, const Score& b) { return a.num * b.den == b.num * a.den; };
  int best = -1;
  for (int t = 0; t < 256; ++t) {
    if (score[t].valid && (best < 0 || greater(score[t], score[best]))) best = t;
  }
  if (best < 0) return -1;
  int end = best;
  while (end + 1 < 256 && score[end + 1].valid && equal(score[end + 1], score[best])) ++end;
  return (best + end) / 2;
}

}  // namespace ncdm::oracle
