#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ncdm/classify.hpp"
#include "ncdm/error.hpp"
#include "ncdm/ncd.hpp"
#include "support.hpp"

using namespace ncdm;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Engine binary_engine() {
  EngineOptions o;
  o.framing = Framing::kLengthPrefixed;
  return Engine(Backend::bzip2(), o);
}

ClassMap two_generators(std::size_t per_class, std::size_t length = 1024) {
  ClassMap classes;
  classes["g0"] = Multiset(testing::generator_elements(0, per_class, length, 1, "a"));
  classes["g1"] = Multiset(testing::generator_elements(1, per_class, length, 1, "b"));
  return classes;
}

}  // namespace

TEST_CASE("wilson interval reproduces published brackets") {
  struct Row { double p; std::size_t n; double lo, hi; };
  const Row rows[] = {{0.99, 72, 0.93, 1.00}, {1.00, 72, 0.95, 1.00}, {0.87, 86, 0.78, 0.93},
                      {0.83, 78, 0.73, 0.90}, {0.57, 656, 0.53, 0.61}};
  for (const auto& r : rows) {
    CAPTURE(r.p);
    CAPTURE(r.n);
    auto ci = wilson_ci(r.p, r.n);
    CHECK(round2(ci.lo) == doctest::Approx(r.lo));
    CHECK(round2(ci.hi) == doctest::Approx(r.hi));
  }
}

TEST_CASE("wilson interval closed form") {
  // z for 95% hard-coded here so the library's quantile is checked too.
  const double z = 1.959963984540054;
  for (double p : {0.0, 0.1, 0.5, 0.73}) {
    for (std::size_t n : {1u, 7u, 100u}) {
      double denom = 1 + z * z / n;
      double centre = (p + z * z / (2.0 * n)) / denom;
      double half = z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n)) / denom;
      auto ci = wilson_ci(p, n);
      CHECK(ci.lo == doctest::Approx(std::max(0.0, centre - half)).epsilon(1e-12));
      CHECK(ci.hi == doctest::Approx(std::min(1.0, centre + half)).epsilon(1e-12));
    }
  }
}

TEST_CASE("wilson interval properties") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int i = 0; i < 500; ++i) {
    double p = unit(rng);
    std::size_t n = 1 + rng() % 2000;
    double level = 0.5 + 0.49 * unit(rng);
    auto ci = wilson_ci(p, n, level);
    CHECK(0.0 <= ci.lo);
    CHECK(ci.lo <= p);
    CHECK(p <= ci.hi);
    CHECK(ci.hi <= 1.0);
  }
  for (double p : {0.05, 0.5, 0.9}) {
    double prev = 2;
    for (std::size_t n = 1; n < 400; ++n) {
      auto ci = wilson_ci(p, n);
      double width = ci.hi - ci.lo;
      CHECK(width < prev);
      prev = width;
    }
  }
  CHECK(wilson_ci(0.5, 50, 0.99).hi - wilson_ci(0.5, 50, 0.99).lo >
        wilson_ci(0.5, 50, 0.9).hi - wilson_ci(0.5, 50, 0.9).lo);
  CHECK_THROWS_AS(wilson_ci(0.5, 10, 1.0), InvalidArgument);
  CHECK_THROWS_AS(wilson_ci(0.5, 10, 0.0), InvalidArgument);
  CHECK_THROWS_AS(wilson_ci(0.5, 0), InvalidArgument);
  CHECK_THROWS_AS(wilson_ci(1.5, 10), InvalidArgument);
}

TEST_CASE("delta NCD1 of redundant versus unrelated element") {
  Engine engine = binary_engine();
  Element a("a", testing::random_bytes(4096, 42));
  Element b("b", testing::random_bytes(4096, 43));
  Multiset aaa({Element("a1", std::string(a.bytes())), Element("a2", std::string(a.bytes())),
                Element("a3", std::string(a.bytes()))});
  double same = delta_ncd1(engine, a, aaa);
  double other = delta_ncd1(engine, b, aaa);
  CHECK(same <= 0.1);  // the default NCD slack
  CHECK(other > same);
  CHECK_THROWS_AS(delta_ncd1(engine, a, Multiset({a})), InvalidArgument);
}

TEST_CASE("delta NCD1 ignores supply order") {
  Engine engine(Backend::bzip2());
  std::vector<Element> members;
  for (std::uint64_t i = 0; i < 6; ++i) {
    members.emplace_back("m" + std::to_string(i), testing::text_fragment(i % 2, 50, i));
  }
  Element x("x", testing::text_fragment(0, 60, 77));
  double ref = delta_ncd1(engine, x, Multiset(members));
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(members.begin(), members.end(), rng);
    CHECK(delta_ncd1(engine, x, Multiset(members)) == ref);
  }
}

TEST_CASE("two-generator classification") {
  Engine engine = binary_engine();
  ClassMap classes = two_generators(20);
  for (std::uint64_t s = 0; s < 5; ++s) {
    Element x0("q0", testing::generator_sample(0, 1024, 9000 + s));
    Element x1("q1", testing::generator_sample(1, 1024, 9100 + s));
    CHECK(classify_by_delta(engine, x0, classes) == "g0");
    CHECK(classify_by_delta(engine, x1, classes) == "g1");
    CHECK(min_distance_classify(engine, x0, classes) == "g0");
    CHECK(min_distance_classify(engine, x1, classes) == "g1");
  }
  // A verbatim copy of a training element goes to that element's class.
  Element copy("copy", std::string(classes["g1"][3].bytes()));
  CHECK(classify_by_delta(engine, copy, classes) == "g1");
  CHECK(min_distance_classify(engine, copy, classes) == "g1");
}

TEST_CASE("ties go to the smallest label") {
  Engine engine = binary_engine();
  Multiset same(testing::generator_elements(2, 4, 512, 3, "s"));
  ClassMap classes{{"zeta", same}, {"alpha", same}, {"mid", same}};
  Element x("x", testing::generator_sample(0, 512, 5));
  auto p = predict(engine, x, classes, Method::kDeltaNcd1);
  CHECK(p.label == "alpha");
  CHECK(p.scores.size() == 3);
  CHECK(p.scores["alpha"] == p.scores["zeta"]);
  CHECK(min_distance_classify(engine, x, classes) == "alpha");
  CHECK_THROWS_AS(classify_by_delta(engine, x, ClassMap{}), InvalidArgument);
}

TEST_CASE("mean pairwise distance") {
  Engine engine = binary_engine();
  Multiset a(testing::generator_elements(0, 3, 400, 8, "a"));
  Element x("x", testing::generator_sample(1, 400, 1));
  double sum = 0;
  for (const auto& e : a) sum += ncd_pairwise(engine, x, e).value;
  CHECK(mean_pairwise_distance(engine, x, a) == doctest::Approx(sum / 3).epsilon(1e-12));
}

TEST_CASE("method names") {
  CHECK(parse_method("delta-ncd1") == Method::kDeltaNcd1);
  CHECK(parse_method("delta") == Method::kDeltaNcd1);
  CHECK(parse_method("min-distance") == Method::kMinDistance);
  CHECK(parse_method("pairwise") == Method::kMinDistance);
  CHECK(to_string(Method::kDeltaNcd1) == "delta-ncd1");
  CHECK(to_string(Method::kMinDistance) == "min-distance");
  CHECK_THROWS_AS(parse_method("knn"), InvalidArgument);
}

TEST_CASE("leave-one-out on a perfectly separable corpus") {
  Engine engine = binary_engine();
  LabeledCorpus corpus;
  for (std::size_t c = 0; c < 3; ++c) {
    std::string seed = testing::random_bytes(2048, 500 + c);
    std::vector<Element> members;
    for (std::size_t i = 0; i < 4; ++i) {
      members.emplace_back("c" + std::to_string(c) + "_" + std::to_string(i), seed);
    }
    corpus.classes["class" + std::to_string(c)] = Multiset(members);
  }
  for (Method m : {Method::kDeltaNcd1, Method::kMinDistance}) {
    auto r = loocv(engine, corpus, m);
    CHECK(r.n == 12);
    CHECK(r.correct == 12);
    CHECK(r.accuracy == 1.0);
    CHECK(r.ci.hi == 1.0);
    CHECK(r.ci.lo <= 1.0);
    CHECK(r.items.size() == 12);
    for (const auto& item : r.items) CHECK(item.predicted == *item.truth);
  }
}

TEST_CASE("leave-one-out removes exactly the held-out occurrence") {
  // Class "dup" holds x twice and two unrelated members; class "x" shares
  // nothing. Holding out one copy of x leaves the other one in "dup".
  Engine engine = binary_engine();
  std::string xb = testing::random_bytes(2048, 1);
  LabeledCorpus corpus;
  corpus.classes["dup"] = Multiset({Element("x1", xb), Element("x2", xb),
                                    Element("u1", testing::random_bytes(2048, 2)),
                                    Element("u2", testing::random_bytes(2048, 3))});
  corpus.classes["far"] = Multiset(testing::generator_elements(0, 3, 2048, 4, "f"));
  auto r = loocv(engine, corpus, Method::kDeltaNcd1);
  for (const auto& item : r.items) {
    if (item.id == "x1" || item.id == "x2") CHECK(item.predicted == "dup");
  }
}

TEST_CASE("leave-one-out preconditions and determinism") {
  Engine engine = binary_engine();
  LabeledCorpus small;
  small.classes = two_generators(3, 256);
  small.classes["g1"] = small.classes["g1"].without(0);
  CHECK_THROWS_AS(loocv(engine, small, Method::kDeltaNcd1), InvalidArgument);

  LabeledCorpus corpus;
  corpus.classes = two_generators(6, 512);
  EngineOptions o1, o4;
  o1.framing = o4.framing = Framing::kLengthPrefixed;
  o1.jobs = 1;
  o4.jobs = 4;
  auto a = loocv(Engine(Backend::bzip2(), o1), corpus, Method::kDeltaNcd1);
  auto b = loocv(Engine(Backend::bzip2(), o4), corpus, Method::kDeltaNcd1);
  REQUIRE(a.items.size() == b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    CHECK(a.items[i].id == b.items[i].id);
    CHECK(a.items[i].predicted == b.items[i].predicted);
    CHECK(a.items[i].scores == b.items[i].scores);
  }
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.accuracy == static_cast<double>(a.correct) / a.n);
  CHECK(a.ci.lo <= a.accuracy);
  CHECK(a.accuracy <= a.ci.hi);
}

TEST_CASE("held-out test items") {
  Engine engine = binary_engine();
  LabeledCorpus corpus;
  corpus.classes = two_generators(5, 512);
  corpus.tests.push_back({Element("t0", testing::generator_sample(0, 512, 70)), "g0"});
  corpus.tests.push_back({Element("t1", testing::generator_sample(1, 512, 71)), "g1"});
  corpus.tests.push_back({Element("t2", testing::generator_sample(1, 512, 72)), std::nullopt});
  auto r = classify_tests(engine, corpus, Method::kDeltaNcd1);
  CHECK(r.items.size() == 3);
  CHECK(r.n == 2);
  CHECK(r.correct == 2);
  CHECK(r.items[2].predicted == "g1");
  CHECK_FALSE(r.items[2].truth.has_value());
}
