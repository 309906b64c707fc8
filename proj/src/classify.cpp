#include "ncdm/classify.hpp"

#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>

#include "ncdm/error.hpp"
#include "ncdm/ncd.hpp"
#include "ncdm/parallel.hpp"

namespace ncdm {

std::string_view to_string(Method m) {
  return m == Method::kDeltaNcd1 ? "delta-ncd1" : "min-distance";
}

Method parse_method(std::string_view name) {
  if (name == "delta" || name == "delta-ncd1") return Method::kDeltaNcd1;
  if (name == "min-distance" || name == "pairwise" || name == "mindist") {
    return Method::kMinDistance;
  }
  throw InvalidArgument("unknown classification method '" + std::string(name) + "'");
}

double delta_ncd1(const Engine& engine, const Element& x, const Multiset& a) {
  if (a.size() < 2) throw InvalidArgument("delta_ncd1: class needs >= 2 elements");
  double with_x = ncd1_from_profile(g_profile(engine, a.with(x)));
  double without = ncd1_from_profile(g_profile(engine, a));
  return with_x - without;
}

double mean_pairwise_distance(const Engine& engine, const Element& x,
                              const Multiset& a) {
  if (a.empty()) throw InvalidArgument("mean_pairwise_distance: empty class");
  std::vector<double> d(a.size());
  parallel_for(a.size(), engine.jobs(),
               [&](std::size_t i) { d[i] = ncd_pairwise(engine, x, a[i]).value; });
  double sum = 0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

Prediction predict(const Engine& engine, const Element& x,
                   const ClassMap& classes, Method method) {
  if (classes.empty()) throw InvalidArgument("no classes to classify against");
  std::vector<const std::pair<const std::string, Multiset>*> entries;
  for (const auto& kv : classes) entries.push_back(&kv);
  std::vector<double> scores(entries.size());
  parallel_for(entries.size(), engine.jobs(), [&](std::size_t i) {
    const auto& members = entries[i]->second;
    scores[i] = method == Method::kDeltaNcd1
                    ? delta_ncd1(engine, x, members)
                    : mean_pairwise_distance(engine, x, members);
  });
  Prediction p;
  std::size_t best = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    p.scores.emplace(entries[i]->first, scores[i]);
    // map order is lexicographic, so strict < keeps the smallest label on ties
    if (scores[i] < scores[best]) best = i;
  }
  p.label = entries[best]->first;
  return p;
}

std::string classify_by_delta(const Engine& engine, const Element& x,
                              const ClassMap& classes) {
  return predict(engine, x, classes, Method::kDeltaNcd1).label;
}

std::string min_distance_classify(const Engine& engine, const Element& x,
                                  const ClassMap& classes) {
  return predict(engine, x, classes, Method::kMinDistance).label;
}

Interval wilson_ci(double p_hat, std::size_t n, double level) {
  if (!(level > 0 && level < 1)) {
    throw InvalidArgument("confidence level must lie in (0, 1)");
  }
  if (n == 0) throw InvalidArgument("wilson_ci needs n >= 1");
  if (!(p_hat >= 0 && p_hat <= 1)) throw InvalidArgument("p_hat must lie in [0, 1]");
  const double z = boost::math::quantile(boost::math::normal(), (1 + level) / 2);
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double center = (p_hat + z2 / (2 * nn)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1 - p_hat) / nn + z2 / (4 * nn * nn)) / denom;
  // Clamp and keep p_hat inside against rounding at the boundaries.
  return {std::clamp(std::min(center - half, p_hat), 0.0, 1.0),
          std::clamp(std::max(center + half, p_hat), 0.0, 1.0)};
}

namespace {

void finish(ClassificationReport& r) {
  r.n = 0;
  r.correct = 0;
  for (const auto& item : r.items) {
    if (!item.truth) continue;
    ++r.n;
    if (*item.truth == item.predicted) ++r.correct;
  }
  r.accuracy = r.n ? static_cast<double>(r.correct) / static_cast<double>(r.n) : 0.0;
  if (r.n) r.ci = wilson_ci(r.accuracy, r.n, r.level);
}

}  // namespace

ClassificationReport loocv(const Engine& engine, const LabeledCorpus& corpus,
                           Method method) {
  if (corpus.classes.size() < 2) {
    throw InvalidArgument("loocv needs at least two classes");
  }
  struct Fold {
    const std::string* label;
    std::size_t index;
  };
  std::vector<Fold> folds;
  for (const auto& [label, members] : corpus.classes) {
    if (members.size() < 3) {
      throw InvalidArgument("class '" + label + "' has " +
                            std::to_string(members.size()) +
                            " members; leave-one-out needs at least 3");
    }
    for (std::size_t i = 0; i < members.size(); ++i) folds.push_back({&label, i});
  }

  ClassificationReport report;
  report.method = method;
  report.items.resize(folds.size());
  parallel_for(folds.size(), engine.jobs(), [&](std::size_t f) {
    const auto& [label, index] = folds[f];
    const Multiset& own = corpus.classes.at(*label);
    ClassMap depleted = corpus.classes;
    depleted.at(*label) = own.without(index);
    const Element& x = own[index];
    Prediction p = predict(engine, x, depleted, method);
    report.items[f] = {x.id(), *label, std::move(p.label), std::move(p.scores)};
  });
  finish(report);
  return report;
}

ClassificationReport classify_tests(const Engine& engine,
                                    const LabeledCorpus& corpus, Method method) {
  if (corpus.classes.empty()) throw InvalidArgument("no training classes");
  for (const auto& [label, members] : corpus.classes) {
    if (members.size() < 2) {
      throw InvalidArgument("class '" + label + "' needs at least 2 members");
    }
  }
  ClassificationReport report;
  report.method = method;
  report.items.resize(corpus.tests.size());
  parallel_for(corpus.tests.size(), engine.jobs(), [&](std::size_t i) {
    const auto& item = corpus.tests[i];
    Prediction p = predict(engine, item.element, corpus.classes, method);
    report.items[i] = {item.element.id(), item.label, std::move(p.label),
                       std::move(p.scores)};
  });
  finish(report);
  return report;
}

}  // namespace ncdm
