#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "ncdm/compressor.hpp"
#include "ncdm/element.hpp"
#include "ncdm/error.hpp"
#include "support.hpp"

using namespace ncdm;

TEST_CASE("multiset keeps length-then-lexicographic order") {
  Multiset x({Element("1", "b"), Element("2", "aa"), Element("3", "a")});
  REQUIRE(x.size() == 3);
  CHECK(x[0].bytes() == "a");
  CHECK(x[1].bytes() == "b");
  CHECK(x[2].bytes() == "aa");

  x.add(Element("4", "c"));
  CHECK(x[2].bytes() == "c");
  CHECK(x[3].bytes() == "aa");
}

TEST_CASE("text serialization follows canonical order") {
  CHECK(serialize_multiset(Multiset({Element("x", "b"), Element("y", "a")}), Framing::kText) ==
        "a\nb");
  CHECK(serialize_multiset(Multiset({Element("x", "aa"), Element("y", "b")}), Framing::kText) ==
        "b\naa");
  CHECK(serialize_multiset(Multiset({Element("x", "a"), Element("y", "a")}), Framing::kText) ==
        "a\na");
  CHECK(serialize_multiset(Multiset({Element("x", "abc")}), Framing::kText) == "abc");
}

TEST_CASE("text serialization rejects the separator byte") {
  Multiset x({Element("bad", "a\nb"), Element("ok", "c")});
  CHECK_THROWS_AS(serialize_multiset(x, Framing::kText), DegenerateInput);
  CHECK_NOTHROW(serialize_multiset(x, Framing::kLengthPrefixed));
}

TEST_CASE("length-prefixed framing is recoverable for arbitrary bytes") {
  std::vector<Element> elems;
  for (int i = 0; i < 6; ++i) {
    elems.emplace_back(std::to_string(i), testing::random_bytes(static_cast<std::size_t>(i * 70), i));
  }
  Multiset x(elems);
  std::string s = serialize_multiset(x, Framing::kLengthPrefixed);
  // Decode LEB128 frames back.
  std::size_t pos = 0, k = 0;
  while (pos < s.size()) {
    std::uint64_t len = 0;
    int shift = 0;
    while (true) {
      auto b = static_cast<unsigned char>(s[pos++]);
      len |= std::uint64_t(b & 0x7f) << shift;
      shift += 7;
      if (!(b & 0x80)) break;
    }
    REQUIRE(k < x.size());
    CHECK(s.substr(pos, len) == x[k].bytes());
    pos += len;
    ++k;
  }
  CHECK(k == x.size());
}

TEST_CASE("serialization is permutation invariant byte for byte") {
  std::vector<Element> elems;
  for (int i = 0; i < 8; ++i) {
    elems.emplace_back("e" + std::to_string(i), testing::random_text(20 + (i % 3) * 5, i % 5));
  }
  const std::string ref = serialize_multiset(Multiset(elems), Framing::kText);
  const std::string ref_lp = serialize_multiset(Multiset(elems), Framing::kLengthPrefixed);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(elems.begin(), elems.end(), rng);
    CHECK(serialize_multiset(Multiset(elems), Framing::kText) == ref);
    CHECK(serialize_multiset(Multiset(elems), Framing::kLengthPrefixed) == ref_lp);
  }
}

TEST_CASE("without, subset and merge respect multiplicities") {
  Multiset x({Element("a1", "a"), Element("a2", "a"), Element("b", "b")});
  CHECK(x.without(0).size() == 2);
  CHECK(x.without(0)[0].bytes() == "a");
  CHECK(x.subset(0b101).size() == 2);
  Multiset m = merge(x, x);
  CHECK(m.size() == 6);
  CHECK(serialize_multiset(m, Framing::kText) == "a\na\na\na\nb\nb");
  CHECK_THROWS(x.without(3));
}
