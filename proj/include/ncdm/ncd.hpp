#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncdm/compressor.hpp"
#include "ncdm/element.hpp"

namespace ncdm {

enum class Formula { kPairwise, kNcd1, kExact, kHeuristic };

std::string_view to_string(Formula f);

/// One multiset on the greedy removal chain Y_0 ⊃ Y_1 ⊃ … and its NCD₁.
struct ChainLink {
  std::optional<std::string> removed_id;  ///< empty for Y_0 = X
  std::size_t cardinality = 0;
  double ncd1 = 0;
};

struct NcdValue {
  double value = 0;
  Formula formula = Formula::kNcd1;
  /// Sub-multiset attaining the maximum (exact and heuristic forms).
  std::optional<Multiset> witness;
  /// Removal chain (heuristic form only).
  std::vector<ChainLink> chain;
  /// Compressor invocations executed while computing this value.
  std::size_t compression_jobs = 0;
};

/// The G terms NCD₁ is built from.
struct GProfile {
  std::size_t g_whole = 0;
  std::vector<std::size_t> g_singletons;      ///< G({x}) per position
  std::vector<std::size_t> g_leave_one_out;   ///< G(X∖{x}) per position
};

std::size_t g_multiset(const Engine& engine, const Multiset& x);

/// Requires |X| >= 2. Leave-one-out sizes are computed in parallel.
GProfile g_profile(const Engine& engine, const Multiset& x);

/// E_G,max(X) = G(X) - min_x G(x), in bytes. Requires |X| >= 2.
double e_g_max(const Engine& engine, const Multiset& x);

/// (G(X) - min_x G(x)) / max_x G(X∖{x}). Throws DegenerateInput on a zero
/// denominator.
NcdValue ncd1(const Engine& engine, const Multiset& x);
double ncd1_from_profile(const GProfile& profile);

inline constexpr std::size_t kDefaultMaxCardinality = 12;

/// Maximum of NCD₁ over every sub-multiset of cardinality >= 2.
/// Exponential in |X|; refuses inputs larger than `max_card`.
NcdValue ncd_exact(const Engine& engine, const Multiset& x,
                   std::size_t max_card = kDefaultMaxCardinality);

/// Greedy lower approximation of the multiset NCD: repeatedly drop the
/// element whose removal leaves the largest G, and report the maximum
/// NCD₁ along the resulting chain. O(n²) compressions.
NcdValue ncd_heuristic(const Engine& engine, const Multiset& x);

NcdValue ncd_pairwise(const Engine& engine, const Element& x, const Element& y);

/// Square symmetric matrix of pairwise NCDs with a zero diagonal.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major, labels.size()² entries

  std::size_t dimension() const noexcept { return labels.size(); }
  double at(std::size_t i, std::size_t j) const {
    return values[i * labels.size() + j];
  }
};

DistanceMatrix distance_matrix(const Engine& engine,
                               std::span<const Element> corpus);

/// Header row of ids, then one row of values per element, 9 significant
/// digits.
void write_csv(const DistanceMatrix& m, std::ostream& out);

}  // namespace ncdm
