#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "ncdm/compressor.hpp"
#include "ncdm/error.hpp"
#include "ncdm/parallel.hpp"

namespace ncdm {

double normality_tolerance(std::size_t input_size, const NormalityOptions& opts) {
  double tol = opts.slack_base;
  if (opts.log_slack) tol += std::ceil(std::log2(1.0 + static_cast<double>(input_size)));
  return tol;
}

namespace {

using Tuple = std::vector<std::size_t>;

// All k-tuples of distinct indices when few enough, else a seeded sample.
std::vector<Tuple> sample_tuples(std::size_t n, std::size_t k, std::size_t cap,
                                 std::mt19937_64& rng) {
  std::vector<Tuple> out;
  if (n < k) {
    // Too few elements for distinct indices: reuse with repetition.
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < std::min<std::size_t>(cap, n * n); ++s) {
      Tuple t(k);
      for (auto& v : t) v = pick(rng);
      out.push_back(std::move(t));
    }
    return out;
  }
  double total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= static_cast<double>(n - i);
  if (total <= static_cast<double>(cap)) {
    Tuple t(k);
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
      if (depth == k) {
        out.push_back(t);
        return;
      }
      for (std::size_t i = 0; i < n; ++i) {
        bool used = false;
        for (std::size_t j = 0; j < depth; ++j) used |= t[j] == i;
        if (used) continue;
        t[depth] = i;
        rec(depth + 1);
      }
    };
    rec(0);
    return out;
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (out.size() < cap) {
    Tuple t;
    while (t.size() < k) {
      auto v = pick(rng);
      if (std::find(t.begin(), t.end(), v) == t.end()) t.push_back(v);
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct Check {
  std::vector<std::string> ids;
  double slack;
  double tolerance;
};

void collect(std::vector<Check>& checks, std::vector<NormalityViolation>& sink) {
  for (auto& c : checks) {
    if (c.slack > c.tolerance) {
      sink.push_back({std::move(c.ids), c.slack, c.tolerance});
    }
  }
}

}  // namespace

NormalityReport normality_report(const Backend& backend,
                                 std::span<const Element> corpus,
                                 const NormalityOptions& opts) {
  if (corpus.empty()) throw InvalidArgument("normality_report: empty corpus");
  NormalityReport report;
  report.options = opts;
  std::mt19937_64 rng(opts.seed);
  const std::size_t n = corpus.size();
  auto G = [&](std::string_view s) {
    return static_cast<double>(backend.compressed_size(s));
  };
  auto cat = [](std::string_view a, std::string_view b) {
    std::string s;
    s.reserve(a.size() + b.size());
    s.append(a);
    s.append(b);
    return s;
  };

  // Idempotency: G(xx) vs G(x), every element (capped).
  {
    std::size_t m = std::min(n, opts.max_samples);
    std::vector<Check> checks(m);
    parallel_for(m, opts.jobs, [&](std::size_t i) {
      auto x = corpus[i].bytes();
      double slack = std::abs(G(cat(x, x)) - G(x));
      checks[i] = {{corpus[i].id()}, slack, normality_tolerance(2 * x.size(), opts)};
    });
    report.idempotency_checked = m;
    collect(checks, report.idempotency);
  }

  // Monotonicity and symmetry on ordered pairs.
  {
    auto pairs = sample_tuples(n, 2, opts.max_samples, rng);
    std::vector<Check> mono(pairs.size()), sym(pairs.size());
    parallel_for(pairs.size(), opts.jobs, [&](std::size_t i) {
      const auto& x = corpus[pairs[i][0]];
      const auto& y = corpus[pairs[i][1]];
      double gxy = G(cat(x.bytes(), y.bytes()));
      double gyx = G(cat(y.bytes(), x.bytes()));
      double gx = G(x.bytes());
      double gy = G(y.bytes());
      std::size_t len = x.size() + y.size();
      double tol = normality_tolerance(len, opts);
      mono[i] = {{x.id(), y.id()}, std::max(gx, gy) - gxy, tol};
      sym[i] = {{x.id(), y.id()}, std::abs(gxy - gyx), tol};
    });
    report.monotonicity_checked = pairs.size();
    report.symmetry_checked = pairs.size();
    collect(mono, report.monotonicity);
    collect(sym, report.symmetry);
  }

  // Distributivity: G(xy) + G(z) <= G(xz) + G(yz).
  {
    auto triples = sample_tuples(n, 3, opts.max_samples, rng);
    std::vector<Check> dist(triples.size());
    parallel_for(triples.size(), opts.jobs, [&](std::size_t i) {
      const auto& x = corpus[triples[i][0]];
      const auto& y = corpus[triples[i][1]];
      const auto& z = corpus[triples[i][2]];
      double lhs = G(cat(x.bytes(), y.bytes())) + G(z.bytes());
      double rhs = G(cat(x.bytes(), z.bytes())) + G(cat(y.bytes(), z.bytes()));
      std::size_t len = x.size() + y.size() + z.size();
      dist[i] = {{x.id(), y.id(), z.id()}, lhs - rhs, normality_tolerance(len, opts)};
    });
    report.distributivity_checked = triples.size();
    collect(dist, report.distributivity);
  }
  return report;
}

}  // namespace ncdm
