#include "ncdm/ncd.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

#include "ncdm/error.hpp"
#include "ncdm/parallel.hpp"

namespace ncdm {

std::string_view to_string(Formula f) {
  switch (f) {
    case Formula::kPairwise:
      return "pairwise";
    case Formula::kNcd1:
      return "ncd1";
    case Formula::kExact:
      return "exact";
    case Formula::kHeuristic:
      return "heuristic";
  }
  return "unknown";
}

std::size_t g_multiset(const Engine& engine, const Multiset& x) {
  return engine.g(x);
}

GProfile g_profile(const Engine& engine, const Multiset& x) {
  const std::size_t n = x.size();
  if (n < 2) {
    throw InvalidArgument("NCD terms need at least two elements, got " +
                          std::to_string(n));
  }
  GProfile p;
  p.g_singletons.resize(n);
  p.g_leave_one_out.resize(n);
  // Index n is the whole multiset; the rest are per-position terms.
  parallel_for(2 * n + 1, engine.jobs(), [&](std::size_t k) {
    if (k == 2 * n) {
      p.g_whole = engine.g(x);
    } else if (k < n) {
      p.g_leave_one_out[k] = engine.g(x.without(k));
    } else {
      p.g_singletons[k - n] = engine.g(x[k - n]);
    }
  });
  return p;
}

double e_g_max(const Engine& engine, const Multiset& x) {
  if (x.size() < 2) throw InvalidArgument("E_G,max needs at least two elements");
  std::size_t whole = engine.g(x);
  std::vector<std::size_t> singles(x.size());
  parallel_for(x.size(), engine.jobs(),
               [&](std::size_t i) { singles[i] = engine.g(x[i]); });
  return static_cast<double>(whole) -
         static_cast<double>(*std::min_element(singles.begin(), singles.end()));
}

double ncd1_from_profile(const GProfile& p) {
  auto min_single = *std::min_element(p.g_singletons.begin(), p.g_singletons.end());
  auto max_loo = *std::max_element(p.g_leave_one_out.begin(), p.g_leave_one_out.end());
  if (max_loo == 0) {
    throw DegenerateInput("NCD1 denominator max G(X\\{x}) is zero");
  }
  return (static_cast<double>(p.g_whole) - static_cast<double>(min_single)) /
         static_cast<double>(max_loo);
}

NcdValue ncd1(const Engine& engine, const Multiset& x) {
  auto before = engine.compression_jobs();
  NcdValue v;
  v.formula = Formula::kNcd1;
  v.value = ncd1_from_profile(g_profile(engine, x));
  v.compression_jobs = engine.compression_jobs() - before;
  return v;
}

NcdValue ncd_exact(const Engine& engine, const Multiset& x, std::size_t max_card) {
  const std::size_t n = x.size();
  if (n < 2) throw InvalidArgument("ncd_exact needs at least two elements");
  if (n > max_card || n > 30) {
    throw InvalidArgument("ncd_exact: cardinality " + std::to_string(n) +
                          " exceeds the cap of " + std::to_string(max_card));
  }
  auto before = engine.compression_jobs();
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> values(count, -1.0);
  parallel_for(count, engine.jobs(), [&](std::size_t mask) {
    if (std::popcount(mask) < 2) return;
    values[mask] = ncd1_from_profile(g_profile(engine, x.subset(mask)));
  });
  std::uint64_t best = 0;
  for (std::uint64_t m = 0; m < count; ++m) {
    if (values[m] > values[best]) best = m;
  }
  NcdValue v;
  v.formula = Formula::kExact;
  v.value = values[best];
  v.witness = x.subset(best);
  v.compression_jobs = engine.compression_jobs() - before;
  return v;
}

NcdValue ncd_heuristic(const Engine& engine, const Multiset& x) {
  if (x.size() < 2) throw InvalidArgument("ncd_heuristic needs at least two elements");
  auto before = engine.compression_jobs();
  NcdValue v;
  v.formula = Formula::kHeuristic;
  Multiset current = x;
  std::optional<std::string> removed;
  double best = 0;
  while (true) {
    GProfile p = g_profile(engine, current);
    double value = ncd1_from_profile(p);
    if (v.chain.empty() || value > best) {
      best = value;
      v.witness = current;
    }
    v.chain.push_back({removed, current.size(), value});
    if (current.size() == 2) break;
    // Earliest canonical position wins ties.
    auto it = std::max_element(p.g_leave_one_out.begin(), p.g_leave_one_out.end());
    auto drop = static_cast<std::size_t>(it - p.g_leave_one_out.begin());
    removed = current[drop].id();
    current = current.without(drop);
  }
  v.value = best;
  v.compression_jobs = engine.compression_jobs() - before;
  return v;
}

NcdValue ncd_pairwise(const Engine& engine, const Element& x, const Element& y) {
  auto before = engine.compression_jobs();
  Multiset pair({x, y});
  double gx = static_cast<double>(engine.g(pair[0]));
  double gy = static_cast<double>(engine.g(pair[1]));
  double gxy = static_cast<double>(engine.g(pair));
  double denom = std::max(gx, gy);
  if (denom == 0) throw DegenerateInput("pairwise NCD denominator is zero");
  NcdValue v;
  v.formula = Formula::kPairwise;
  v.value = (gxy - std::min(gx, gy)) / denom;
  v.compression_jobs = engine.compression_jobs() - before;
  return v;
}

DistanceMatrix distance_matrix(const Engine& engine,
                               std::span<const Element> corpus) {
  const std::size_t n = corpus.size();
  if (n < 2) throw InvalidArgument("distance_matrix needs at least two elements");
  DistanceMatrix m;
  m.labels.reserve(n);
  for (const auto& e : corpus) m.labels.push_back(e.id());
  m.values.assign(n * n, 0.0);

  std::vector<std::size_t> singles(n);
  parallel_for(n, engine.jobs(), [&](std::size_t i) { singles[i] = engine.g(corpus[i]); });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), engine.jobs(), [&](std::size_t k) {
    auto [i, j] = pairs[k];
    double gi = static_cast<double>(singles[i]);
    double gj = static_cast<double>(singles[j]);
    double gij = static_cast<double>(engine.g(Multiset({corpus[i], corpus[j]})));
    double denom = std::max(gi, gj);
    if (denom == 0) throw DegenerateInput("pairwise NCD denominator is zero");
    double value = (gij - std::min(gi, gj)) / denom;
    m.values[i * n + j] = value;
    m.values[j * n + i] = value;
  });
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void write_csv(const DistanceMatrix& m, std::ostream& out) {
  const std::size_t n = m.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out << ',';
    out << csv_field(m.labels[i]);
  }
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof buf, "%.9g", m.at(i, j));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace ncdm
