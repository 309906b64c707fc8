#include "ncdm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ncdm/error.hpp"
#include "ncdm/ncd.hpp"
#include "ncdm/parallel.hpp"

namespace ncdm {
namespace {

double ncd1_of(const Engine& engine, const Multiset& x) {
  return ncd1_from_profile(g_profile(engine, x));
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

std::uint64_t label_hash(const std::string& s) {
  // FNV-1a; only needs to be stable across runs.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::pair<Multiset, Multiset> sides(const Multiset& x, const std::vector<bool>& in_a) {
  std::vector<Element> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) (in_a[i] ? a : b).push_back(x[i]);
  return {Multiset(std::move(a)), Multiset(std::move(b))};
}

RestartResult run_restart(const Engine& engine, const Multiset& x, double ncd1_x,
                          std::size_t max_iters, std::uint64_t seed) {
  const std::size_t n = x.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t seed_a = pick(rng);
  std::size_t seed_b = pick(rng);
  while (seed_b == seed_a) seed_b = pick(rng);

  // Seeding: nearer seed by pairwise NCD; ties go to a seeded coin flip.
  std::vector<double> to_a(n, 0.0), to_b(n, 0.0);
  parallel_for(n, engine.jobs(), [&](std::size_t i) {
    if (i == seed_a || i == seed_b) return;
    to_a[i] = ncd_pairwise(engine, x[i], x[seed_a]).value;
    to_b[i] = ncd_pairwise(engine, x[i], x[seed_b]).value;
  });
  std::vector<bool> in_a(n, false);
  std::size_t count_a = 0;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    const bool flip = coin(rng);  // drawn for every i so streams stay aligned
    if (i == seed_a || i == seed_b) {
      in_a[i] = i == seed_a;
    } else {
      in_a[i] = to_a[i] < to_b[i] || (to_a[i] == to_b[i] && flip);
    }
    count_a += in_a[i];
  }
  // Both sides need two members for NCD₁ to be defined; top up the short
  // side with the elements nearest to its seed.
  auto top_up = [&](bool side, const std::vector<double>& dist) {
    std::size_t count = side ? count_a : n - count_a;
    while (count < 2) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (in_a[i] == side || i == seed_a || i == seed_b) continue;
        if (best == n || dist[i] < dist[best]) best = i;
      }
      in_a[best] = side;
      if (side) {
        ++count_a;
      } else {
        --count_a;
      }
      ++count;
    }
  };
  top_up(true, to_a);
  top_up(false, to_b);

  RestartResult r;
  r.assignments.push_back(in_a);
  auto [a, b] = sides(x, in_a);
  double current = ncd1_x - ncd1_of(engine, a) - ncd1_of(engine, b);

  while (r.iterations < max_iters) {
    const double ncd1_a = ncd1_of(engine, a);
    const double ncd1_b = ncd1_of(engine, b);
    // For x in A: stay = NCD₁(A) − NCD₁(A∖x), leave = NCD₁(B∪x) − NCD₁(B);
    // the post-move margin reuses NCD₁(A∖x) and NCD₁(B∪x).
    std::vector<double> after(n, -std::numeric_limits<double>::infinity());
    std::vector<bool> wants(n, false);
    std::vector<std::size_t> pos_in_side(n);
    {
      std::size_t ia = 0, ib = 0;
      for (std::size_t i = 0; i < n; ++i) pos_in_side[i] = in_a[i] ? ia++ : ib++;
    }
    parallel_for(n, engine.jobs(), [&](std::size_t i) {
      const Multiset& from = in_a[i] ? a : b;
      const Multiset& to = in_a[i] ? b : a;
      if (from.size() <= 2) return;
      const double ncd1_from = in_a[i] ? ncd1_a : ncd1_b;
      const double ncd1_to = in_a[i] ? ncd1_b : ncd1_a;
      double from_without = ncd1_of(engine, from.without(pos_in_side[i]));
      double to_with = ncd1_of(engine, to.with(x[i]));
      double stay = ncd1_from - from_without;
      double leave = to_with - ncd1_to;
      wants[i] = leave < stay;
      after[i] = ncd1_x - from_without - to_with;
    });
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (wants[i] && (best == n || after[i] > after[best])) best = i;
    }
    if (best == n || after[best] < current) {
      r.converged = true;
      break;
    }
    in_a[best] = !in_a[best];
    std::tie(a, b) = sides(x, in_a);
    current = after[best];
    ++r.iterations;
    r.assignments.push_back(in_a);
  }
  r.a = std::move(a);
  r.b = std::move(b);
  r.margin = current;
  return r;
}

PartitionNode build_node(const Engine& engine, Multiset members,
                         const PartitionConfig& cfg, std::size_t min_size,
                         double stop_margin, std::uint64_t stream) {
  PartitionNode node;
  node.members = std::move(members);
  const std::size_t n = node.members.size();
  if (n < std::max<std::size_t>(4, 2 * min_size)) {
    node.accepted = true;
    return node;
  }
  PartitionConfig local = cfg;
  local.seed = derive_seed(cfg.seed, stream);
  SplitResult split = klists_split(engine, node.members, local);
  node.margin = split.margin;
  if (split.margin > stop_margin && split.a.size() >= min_size &&
      split.b.size() >= min_size) {
    node.children.push_back(
        build_node(engine, split.a, cfg, min_size, stop_margin, 2 * stream + 1));
    node.children.push_back(
        build_node(engine, split.b, cfg, min_size, stop_margin, 2 * stream + 2));
  } else {
    node.accepted = true;
  }
  return node;
}

}  // namespace

double margin(const Engine& engine, const Multiset& a, const Multiset& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InvalidArgument("margin needs two elements on each side");
  }
  return ncd1_of(engine, merge(a, b)) - ncd1_of(engine, a) - ncd1_of(engine, b);
}

MinSize MinSize::parse(const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text.back() == '%') {
      double p = std::stod(text.substr(0, text.size() - 1), &used);
      if (used != text.size() - 1 || !(p > 0 && p <= 100)) throw InvalidArgument("");
      return percent(p);
    }
    long long v = std::stoll(text, &used);
    if (used != text.size() || v < 2) throw InvalidArgument("");
    return count(static_cast<std::size_t>(v));
  } catch (const std::exception&) {
    throw InvalidArgument("bad minimum size '" + text +
                          "' (expected an integer >= 2 or a percentage)");
  }
}

std::size_t MinSize::resolve(std::size_t class_size) const {
  double v = fraction ? std::ceil(value * static_cast<double>(class_size) - 1e-9)
                      : value;
  return std::max<std::size_t>(2, static_cast<std::size_t>(v));
}

SplitResult klists_split(const Engine& engine, const Multiset& x,
                         const PartitionConfig& cfg) {
  if (cfg.restarts < 1 || cfg.max_iters < 1) {
    throw InvalidArgument("restarts and max_iters must be >= 1");
  }
  const std::size_t min_size = cfg.min_size.resolve(x.size());
  if (x.size() < std::max<std::size_t>(4, 2 * min_size)) {
    throw InvalidArgument("klists_split: multiset of " + std::to_string(x.size()) +
                          " elements is too small for minimum size " +
                          std::to_string(min_size));
  }
  const double ncd1_x = ncd1_of(engine, x);
  SplitResult out;
  out.restarts.resize(cfg.restarts);
  parallel_for(cfg.restarts, engine.jobs(), [&](std::size_t r) {
    out.restarts[r] = run_restart(engine, x, ncd1_x, cfg.max_iters,
                                  derive_seed(cfg.seed, r));
  });
  for (std::size_t r = 1; r < out.restarts.size(); ++r) {
    if (out.restarts[r].margin > out.restarts[out.best_restart].margin) {
      out.best_restart = r;
    }
  }
  const auto& best = out.restarts[out.best_restart];
  out.a = best.a;
  out.b = best.b;
  out.margin = best.margin;
  return out;
}

std::vector<const PartitionNode*> PartitionNode::leaves() const {
  if (children.empty()) return {this};
  std::vector<const PartitionNode*> out;
  for (const auto& c : children) {
    auto sub = c.leaves();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

double min_interclass_margin(const Engine& engine, const ClassMap& classes) {
  if (classes.size() < 2) {
    throw InvalidArgument("inter-class margin needs at least two classes");
  }
  std::vector<std::pair<const Multiset*, const Multiset*>> pairs;
  for (auto i = classes.begin(); i != classes.end(); ++i) {
    for (auto j = std::next(i); j != classes.end(); ++j) {
      pairs.emplace_back(&i->second, &j->second);
    }
  }
  std::vector<double> m(pairs.size());
  parallel_for(pairs.size(), engine.jobs(), [&](std::size_t k) {
    m[k] = margin(engine, *pairs[k].first, *pairs[k].second);
  });
  return *std::min_element(m.begin(), m.end());
}

PartitionTree recursive_partition(const Engine& engine, const ClassMap& classes,
                                  const PartitionConfig& cfg,
                                  std::optional<double> stop_margin) {
  PartitionTree tree;
  tree.stop_margin = stop_margin ? *stop_margin : min_interclass_margin(engine, classes);
  for (const auto& [label, members] : classes) {
    if (members.size() < 2) {
      throw InvalidArgument("class '" + label + "' needs at least 2 members");
    }
    const std::size_t min_size = cfg.min_size.resolve(members.size());
    tree.classes.emplace(label, build_node(engine, members, cfg, min_size,
                                           tree.stop_margin, label_hash(label)));
  }
  return tree;
}

std::map<std::string, std::vector<double>> min_class_distances(
    const Engine& engine, const Element& x, const PartitionTree& tree,
    std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  std::map<std::string, std::vector<double>> out;
  for (const auto& [label, root] : tree.classes) {
    auto leaves = root.leaves();
    std::vector<double> d(leaves.size());
    parallel_for(leaves.size(), engine.jobs(),
                 [&](std::size_t i) { d[i] = delta_ncd1(engine, x, leaves[i]->members); });
    std::sort(d.begin(), d.end());
    if (d.size() > k) d.resize(k);
    out.emplace(label, std::move(d));
  }
  return out;
}

}  // namespace ncdm
