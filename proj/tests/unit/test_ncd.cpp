#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "ncdm/error.hpp"
#include "ncdm/ncd.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace ncdm;

namespace {

Engine binary_engine(Backend b = Backend::bzip2()) {
  EngineOptions o;
  o.framing = Framing::kLengthPrefixed;
  return Engine(std::move(b), o);
}

std::vector<std::string> raw(const Multiset& x) {
  std::vector<std::string> out;
  for (const auto& e : x) out.emplace_back(e.bytes());
  return out;
}

Multiset mixed_fragments(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Element> elems;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t topic = rng() % 4;
    std::size_t words = 20 + rng() % 60;
    elems.emplace_back("f" + std::to_string(i), testing::text_fragment(topic, words, rng()));
  }
  return Multiset(elems);
}

}  // namespace

TEST_CASE("singleton G is the compressed element") {
  Engine engine(Backend::bzip2());
  Element x("x", testing::random_text(500, 1));
  CHECK(g_multiset(engine, Multiset({x})) == compress_len(Backend::bzip2(), x.bytes()));
  CHECK_THROWS_AS(g_multiset(engine, Multiset{}), InvalidArgument);
}

TEST_CASE("G of a duplicated element is close to G of the element") {
  Element x("x", testing::random_text(4096, 2));
  Engine deflate(Backend::deflate());
  double gx = static_cast<double>(deflate.g(x));
  double gxx = static_cast<double>(deflate.g(Multiset({x, x})));
  CHECK(std::abs(gxx - gx) <= normality_tolerance(2 * x.size(), NormalityOptions{}));
  // BWT output still pays a fraction of the copy (about a fifth to a third).
  Engine bz(Backend::bzip2());
  gx = static_cast<double>(bz.g(x));
  gxx = static_cast<double>(bz.g(Multiset({x, x})));
  CHECK(gxx - gx < 0.5 * gx);
}

TEST_CASE("E_G,max") {
  Engine engine = binary_engine(Backend::deflate());
  Element x("x", testing::random_bytes(4096, 10));
  Element y("y", testing::random_bytes(4096, 11));
  SUBCASE("duplicate pair is cheap relative to an unrelated one") {
    double dup = e_g_max(engine, Multiset({x, x}));
    double unrelated = e_g_max(engine, Multiset({x, y}));
    CHECK(dup >= -normality_tolerance(8192, NormalityOptions{}));
    CHECK(dup < 0.25 * unrelated);
  }
  SUBCASE("unrelated incompressible pair costs about one more element") {
    double gy = static_cast<double>(engine.g(y));
    CHECK(e_g_max(engine, Multiset({x, y})) == doctest::Approx(gy).epsilon(0.05));
  }
  CHECK_THROWS_AS(e_g_max(engine, Multiset({x})), InvalidArgument);
}

TEST_CASE("two-element NCD1 is the pairwise formula") {
  Engine engine(Backend::bzip2());
  for (std::uint64_t s = 0; s < 10; ++s) {
    Element x("x", testing::text_fragment(s % 4, 40, s));
    Element y("y", testing::text_fragment((s + 1) % 4, 70, s + 100));
    double gx = static_cast<double>(engine.g(x));
    double gy = static_cast<double>(engine.g(y));
    double gxy = static_cast<double>(engine.g(Multiset({x, y})));
    double expected = (gxy - std::min(gx, gy)) / std::max(gx, gy);
    CHECK(ncd1(engine, Multiset({x, y})).value == expected);
    CHECK(ncd_pairwise(engine, x, y).value == expected);
    CHECK(ncd_pairwise(engine, y, x).value == expected);
    CHECK(ncd_exact(engine, Multiset({x, y})).value == expected);
    auto h = ncd_heuristic(engine, Multiset({x, y}));
    CHECK(h.value == expected);
    CHECK(h.chain.size() == 1);
  }
}

TEST_CASE("identical elements score near zero") {
  Engine engine = binary_engine(Backend::deflate());
  // Each extra copy still costs a few bytes, so NCD1 of n copies creeps up
  // with n; low-entropy text stays under 0.1 for small n only.
  auto copies_of = [](const Element& x, std::size_t n) {
    std::vector<Element> copies;
    for (std::size_t i = 0; i < n; ++i) copies.emplace_back("c" + std::to_string(i), std::string(x.bytes()));
    return Multiset(copies);
  };
  Element text("t", testing::text_fragment(1, 300, 5));
  Element noise("r", testing::random_bytes(4096, 5));
  for (std::size_t n : {2u, 3u}) {
    CHECK(ncd1(engine, copies_of(text, n)).value <= 0.1);
    CHECK(ncd_heuristic(engine, copies_of(text, n)).value <= 0.1);
  }
  for (std::size_t n : {2u, 3u, 5u, 8u}) {
    CHECK(ncd1(engine, copies_of(noise, n)).value <= 0.1);
    CHECK(ncd_heuristic(engine, copies_of(noise, n)).value <= 0.1);
  }
  CHECK(ncd1(engine, copies_of(text, 8)).value > ncd1(engine, copies_of(text, 2)).value);
  CHECK(ncd_pairwise(engine, text, text).value <= 0.1);
}

TEST_CASE("bzip2 ranks a copy closer than an unrelated string") {
  Engine engine(Backend::bzip2());
  Element x("x", testing::text_fragment(1, 300, 5));
  Element y("y", testing::text_fragment(2, 300, 6));
  double same = ncd_pairwise(engine, x, Element("x2", std::string(x.bytes()))).value;
  CHECK(same < 0.5);
  CHECK(same < ncd_pairwise(engine, x, y).value - 0.3);
}

TEST_CASE("unrelated random strings are at distance about one") {
  Element x("x", testing::random_bytes(4096, 21));
  Element y("y", testing::random_bytes(4096, 22));
  double v = ncd_pairwise(binary_engine(Backend::deflate()), x, y).value;
  CHECK(v > 0.95);
  CHECK(v <= 1.1);
  // bzip2 expands random input less when it is longer.
  v = ncd_pairwise(binary_engine(), x, y).value;
  CHECK(v > 0.85);
  CHECK(v <= 1.1);
}

TEST_CASE("exact NCD matches the independent powerset enumeration") {
  auto backend = Backend::bzip2();
  Engine engine(backend);
  oracle::PowersetNcd oracle(backend);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Multiset x = mixed_fragments(6, seed);
    auto v = ncd_exact(engine, x);
    CHECK(v.value == oracle.exact(raw(x)));
    REQUIRE(v.witness);
    CHECK(v.witness->size() >= 2);
    CHECK(ncd1(engine, *v.witness).value == v.value);
  }
}

TEST_CASE("exact NCD is monotone under sub-multisets") {
  Engine engine(Backend::bzip2());
  Multiset x = mixed_fragments(7, 99);
  double whole = ncd_exact(engine, x).value;
  for (std::uint64_t mask = 0; mask < 128; mask += 5) {
    if (std::popcount(mask) < 2) continue;
    CHECK(ncd_exact(engine, x.subset(mask)).value <= whole);
  }
  CHECK_THROWS_AS(ncd_exact(engine, mixed_fragments(13, 1)), InvalidArgument);
  CHECK_THROWS_AS(ncd_exact(engine, mixed_fragments(7, 1), 6), InvalidArgument);
}

TEST_CASE("heuristic chain") {
  Engine engine(Backend::bzip2());
  Multiset x = mixed_fragments(8, 5);
  auto h = ncd_heuristic(engine, x);
  REQUIRE(h.chain.size() == x.size() - 1);
  CHECK_FALSE(h.chain.front().removed_id.has_value());
  CHECK(h.chain.front().ncd1 == ncd1(engine, x).value);
  CHECK(h.value >= h.chain.front().ncd1);
  double best = 0;
  for (std::size_t i = 0; i < h.chain.size(); ++i) {
    CHECK(h.chain[i].cardinality == x.size() - i);
    best = std::max(best, h.chain[i].ncd1);
  }
  CHECK(h.value == best);
  CHECK(h.chain.back().cardinality == 2);
  CHECK(h.value <= ncd_exact(engine, x).value + 1e-9);

  // Each removal drops the element whose absence leaves the largest G.
  Multiset y = x;
  for (std::size_t i = 1; i < h.chain.size(); ++i) {
    auto p = g_profile(engine, y);
    auto it = std::max_element(p.g_leave_one_out.begin(), p.g_leave_one_out.end());
    auto drop = static_cast<std::size_t>(it - p.g_leave_one_out.begin());
    CHECK(*h.chain[i].removed_id == y[drop].id());
    y = y.without(drop);
  }
}

TEST_CASE("heuristic is a lower bound of the exact NCD") {
  Engine engine(Backend::bzip2());
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    Multiset x = mixed_fragments(3 + seed % 4, seed);
    CHECK(ncd_heuristic(engine, x).value <= ncd_exact(engine, x).value + 1e-9);
  }
}

TEST_CASE("heuristic compression budget") {
  Engine engine(Backend::bzip2());
  for (std::size_t n : {5u, 10u, 16u}) {
    Multiset x = mixed_fragments(n, 77 + n);
    engine.reset_job_counter();
    auto h = ncd_heuristic(engine, Multiset(std::vector<Element>(x.begin(), x.end())));
    CHECK(h.compression_jobs <= n * (n + 1) / 2 + 2 * n);
  }
}

TEST_CASE("zero denominator is reported, not coerced") {
  Engine engine(Backend::external("cat >/dev/null"));  // emits nothing
  Multiset x({Element("a", "aaa"), Element("b", "bbb")});
  CHECK_THROWS_AS(ncd1(engine, x), DegenerateInput);
  CHECK_THROWS_AS(ncd_pairwise(engine, x[0], x[1]), DegenerateInput);
}

TEST_CASE("results do not depend on the worker count") {
  Multiset x = mixed_fragments(9, 3);
  EngineOptions serial, parallel;
  serial.jobs = 1;
  parallel.jobs = 4;
  Engine a(Backend::bzip2(), serial), b(Backend::bzip2(), parallel);
  auto ha = ncd_heuristic(a, x), hb = ncd_heuristic(b, x);
  CHECK(ha.value == hb.value);
  CHECK(ha.witness->ids() == hb.witness->ids());
  CHECK(ha.compression_jobs == hb.compression_jobs);
  std::vector<Element> corpus(x.begin(), x.end());
  std::ostringstream ca, cb;
  write_csv(distance_matrix(a, corpus), ca);
  write_csv(distance_matrix(b, corpus), cb);
  CHECK(ca.str() == cb.str());
}

TEST_CASE("distance matrix") {
  Engine engine(Backend::bzip2());
  SUBCASE("identical pair") {
    engine = Engine(Backend::deflate());
    Element x("x", testing::text_fragment(0, 100, 1));
    Element y("y", std::string(x.bytes()));
    std::vector<Element> twins{x, y};
    auto m = distance_matrix(engine, twins);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) CHECK(m.at(i, j) <= 0.1);
    }
  }
  SUBCASE("symmetric, zero diagonal, counted compressions") {
    auto x = mixed_fragments(7, 8);
    std::vector<Element> corpus(x.begin(), x.end());
    engine.reset_job_counter();
    auto m = distance_matrix(engine, corpus);
    CHECK(engine.compression_jobs() == 7 + 7 * 6 / 2);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(m.at(i, i) == 0.0);
      for (std::size_t j = 0; j < 7; ++j) {
        CHECK(m.at(i, j) == m.at(j, i));
        if (i != j) CHECK(m.at(i, j) == ncd_pairwise(engine, corpus[i], corpus[j]).value);
      }
    }
    std::ostringstream csv;
    write_csv(m, csv);
    std::string text = csv.str();
    std::string header;
    for (const auto& e : corpus) header += (header.empty() ? "" : ",") + e.id();
    CHECK(text.substr(0, text.find('\n')) == header);
  }
}

TEST_CASE("csv uses nine significant digits") {
  DistanceMatrix m{{"a", "b,c"}, {0.0, 1.0 / 3.0, 1.0 / 3.0, 0.0}};
  std::ostringstream csv;
  write_csv(m, csv);
  CHECK(csv.str() == "a,\"b,c\"\n0,0.333333333\n0.333333333,0\n");
}
