#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncdm/classify.hpp"
#include "ncdm/compressor.hpp"
#include "ncdm/element.hpp"

namespace ncdm {

/// NCD₁(A ∪ B) − NCD₁(A) − NCD₁(B). Both sides need >= 2 elements.
double margin(const Engine& engine, const Multiset& a, const Multiset& b);

/// Minimum subset size, either absolute or a fraction of the class size.
struct MinSize {
  double value = 2;
  bool fraction = false;

  static MinSize count(std::size_t n) { return {static_cast<double>(n), false}; }
  static MinSize percent(double p) { return {p / 100.0, true}; }
  /// Parses "3" or "30%".
  static MinSize parse(const std::string& text);

  /// Resolved count for a class of `class_size`, never below 2.
  std::size_t resolve(std::size_t class_size) const;
};

struct PartitionConfig {
  std::size_t restarts = 5;
  std::size_t max_iters = 100;
  MinSize min_size;
  std::uint64_t seed = 1;
};

/// One K-Lists run from a single random seeding.
struct RestartResult {
  Multiset a;
  Multiset b;
  double margin = 0;
  std::size_t iterations = 0;
  bool converged = false;  ///< stopped because no element wanted to move
  /// Side of each canonical position of X (true = A) after seeding and
  /// after every move.
  std::vector<std::vector<bool>> assignments;
};

struct SplitResult {
  Multiset a;
  Multiset b;
  double margin = 0;
  std::size_t best_restart = 0;
  std::vector<RestartResult> restarts;
};

/// Bipartitions X to maximize the margin. Each restart seeds two random
/// elements, assigns the rest by pairwise NCD to the seeds, then moves one
/// element per iteration: among elements whose delta-NCD₁ prefers the
/// other side, the one whose move gives the largest margin, provided the
/// margin does not decrease. Requires |X| >= max(4, 2·min_size).
SplitResult klists_split(const Engine& engine, const Multiset& x,
                         const PartitionConfig& cfg);

struct PartitionNode {
  Multiset members;
  /// Best split margin found for this node (empty if too small to try).
  std::optional<double> margin;
  bool accepted = false;
  std::vector<PartitionNode> children;  ///< empty or exactly two

  std::vector<const PartitionNode*> leaves() const;
};

struct PartitionTree {
  double stop_margin = 0;
  std::map<std::string, PartitionNode> classes;
};

/// Minimum margin over all unordered pairs of classes.
double min_interclass_margin(const Engine& engine, const ClassMap& classes);

/// Splits each class recursively while the best split beats `stop_margin`
/// and both halves meet the minimum size (resolved against the original
/// class size). When `stop_margin` is empty the minimum inter-class margin
/// is used.
PartitionTree recursive_partition(const Engine& engine, const ClassMap& classes,
                                  const PartitionConfig& cfg,
                                  std::optional<double> stop_margin = std::nullopt);

/// For each class, delta-NCD₁ of x against every leaf, ascending, at most k.
std::map<std::string, std::vector<double>> min_class_distances(
    const Engine& engine, const Element& x, const PartitionTree& tree,
    std::size_t k = 2);

}  // namespace ncdm
