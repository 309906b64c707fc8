#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncdm/compressor.hpp"
#include "ncdm/element.hpp"

namespace ncdm {

using ClassMap = std::map<std::string, Multiset>;

struct TestItem {
  Element element;
  std::optional<std::string> label;
};

/// Training classes keyed by label, plus optional held-out items.
struct LabeledCorpus {
  ClassMap classes;
  std::vector<TestItem> tests;
};

enum class Method { kDeltaNcd1, kMinDistance };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// NCD₁(A ∪ {x}) − NCD₁(A). Negative when x is redundant given A.
double delta_ncd1(const Engine& engine, const Element& x, const Multiset& a);

/// Mean pairwise NCD from x to the members of A.
double mean_pairwise_distance(const Engine& engine, const Element& x,
                              const Multiset& a);

struct Prediction {
  std::string label;
  std::map<std::string, double> scores;
};

/// Scores x against every class and picks the smallest score; ties go to
/// the lexicographically smallest label.
Prediction predict(const Engine& engine, const Element& x,
                   const ClassMap& classes, Method method);

std::string classify_by_delta(const Engine& engine, const Element& x,
                              const ClassMap& classes);
std::string min_distance_classify(const Engine& engine, const Element& x,
                                  const ClassMap& classes);

struct Interval {
  double lo = 0;
  double hi = 0;
};

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
Interval wilson_ci(double p_hat, std::size_t n, double level = 0.95);

struct ItemResult {
  std::string id;
  std::optional<std::string> truth;
  std::string predicted;
  std::map<std::string, double> scores;
};

struct ClassificationReport {
  Method method = Method::kDeltaNcd1;
  std::vector<ItemResult> items;
  std::size_t n = 0;        ///< items with a known label
  std::size_t correct = 0;
  double accuracy = 0;
  double level = 0.95;
  Interval ci;
};

/// Leave-one-out cross-validation: every training element is held out in
/// turn and scored against the classes with that occurrence removed.
/// Every class needs at least three members.
ClassificationReport loocv(const Engine& engine, const LabeledCorpus& corpus,
                           Method method);

/// Classifies corpus.tests against the full training classes. Accuracy and
/// interval cover the items that carry a label.
ClassificationReport classify_tests(const Engine& engine,
                                    const LabeledCorpus& corpus, Method method);

}  // namespace ncdm
