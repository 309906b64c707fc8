#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <thread>

#include "ncdm/compressor.hpp"
#include "ncdm/error.hpp"
#include "support.hpp"

using namespace ncdm;

TEST_CASE("empty input still costs a container header") {
  // Reference sizes from the stock zlib 1.2.11 / bzip2 1.0.8 codecs.
  CHECK(compress_len(Backend::deflate(), "") == 8);
  CHECK(compress_len(Backend::bzip2(), "") == 14);
}

TEST_CASE("long runs compress to almost nothing") {
  const std::string run(10000, 'a');
  CHECK(compress_len(Backend::deflate(), run) == 34);
  CHECK(compress_len(Backend::deflate(), run) < 200);
  CHECK(compress_len(Backend::bzip2(), run) == 47);
}

TEST_CASE("backends are deterministic") {
  auto data = testing::random_bytes(5000, 3);
  for (const auto& b : {Backend::deflate(), Backend::bzip2(), Backend::bzip2(1)}) {
    CHECK(compress_len(b, data) == compress_len(b, data));
    CHECK(compress_len(b, data) > 0);
  }
}

TEST_CASE("backend spec strings round-trip") {
  for (const char* spec : {"bzip2:9", "bzip2:3", "deflate:-1", "deflate:9", "cmd:gzip -9"}) {
    CHECK(Backend::parse(spec).name() == spec);
  }
  CHECK(Backend::parse("bzip2").name() == "bzip2:9");
  CHECK_THROWS_AS(Backend::parse("lzma"), InvalidArgument);
  CHECK_THROWS_AS(Backend::parse("bzip2:12"), InvalidArgument);
  CHECK_THROWS_AS(Backend::parse("bzip2:x"), InvalidArgument);
}

TEST_CASE("external command backend counts stdout bytes") {
  auto data = testing::random_text(20000, 4);
  CHECK(compress_len(Backend::external("cat"), data) == data.size());
  CHECK(compress_len(Backend::external("cat"), "") == 0);
  CHECK(compress_len(Backend::external("wc -c | tr -d ' \\n'"), data) == 5);
  CHECK(compress_len(Backend::external("gzip -n -9"), data) > 0);
}

TEST_CASE("a missing external compressor is surfaced") {
  CHECK_THROWS_AS(compress_len(Backend::external("definitely-not-a-compressor-xyz"), "abc"),
                  BackendUnavailable);
  CHECK_THROWS_AS(compress_len(Backend::external("exit 3"), "abc"), BackendUnavailable);
}

TEST_CASE("engine G(X) is permutation invariant and cached") {
  Engine engine(Backend::bzip2());
  std::vector<Element> elems;
  for (int i = 0; i < 5; ++i) elems.emplace_back(std::to_string(i), testing::random_text(300, i));
  auto g = engine.g(Multiset(elems));
  std::reverse(elems.begin(), elems.end());
  CHECK(engine.g(Multiset(elems)) == g);
  CHECK(engine.compression_jobs() == 1);
  CHECK(engine.cache().size() == 1);
  CHECK_THROWS_AS(engine.g(Multiset{}), InvalidArgument);
}

TEST_CASE("cache is transparent") {
  EngineOptions memo, fresh;
  fresh.memoize = false;
  Engine a(Backend::bzip2(), memo), b(Backend::bzip2(), fresh);
  for (int i = 0; i < 10; ++i) {
    Multiset x({Element("x", testing::random_text(100 + i, i)), Element("y", testing::random_text(90, 100 + i))});
    CHECK(a.g(x) == b.g(x));
    CHECK(a.g(x) == b.g(x));
  }
  CHECK(a.compression_jobs() == 10);
  CHECK(b.compression_jobs() == 20);
}

TEST_CASE("concurrent lookups compute each key once") {
  Engine engine(Backend::bzip2());
  Multiset x({Element("x", testing::random_text(50000, 1))});
  std::vector<std::size_t> seen(8);
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < seen.size(); ++t) {
      threads.emplace_back([&, t] { seen[t] = engine.g(x); });
    }
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [&](auto v) { return v == seen[0]; }));
  CHECK(engine.compression_jobs() == 1);
}

TEST_CASE("cache keys separate backends") {
  auto shared = std::make_shared<SizeCache>();
  Engine bz(Backend::bzip2(), {}, shared), df(Backend::deflate(), {}, shared);
  Multiset x({Element("x", std::string(1000, 'q'))});
  CHECK(bz.g(x) == compress_len(Backend::bzip2(), std::string(1000, 'q')));
  CHECK(df.g(x) == compress_len(Backend::deflate(), std::string(1000, 'q')));
  CHECK(shared->size() == 2);
}

TEST_CASE("cache snapshot is sorted hex-digest<TAB>size records") {
  auto dir = std::filesystem::temp_directory_path() / "ncdm_cache_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "sizes.tsv";
  Engine engine(Backend::deflate());
  for (int i = 0; i < 20; ++i) engine.g(Element(std::to_string(i), testing::random_text(64, i)));
  engine.cache().save(path);

  std::ifstream in(path);
  std::string line, prev;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    REQUIRE(tab == 64);
    CHECK(digest_from_hex(line.substr(0, tab)).has_value());
    CHECK(line.substr(0, tab) > prev);
    prev = line.substr(0, tab);
    ++records;
  }
  CHECK(records == 20);

  auto shared = std::make_shared<SizeCache>();
  SizeCache& loaded = *shared;
  loaded.load(path);
  CHECK(loaded.size() == 20);
  Engine warm(Backend::deflate(), {}, shared);
  for (int i = 0; i < 20; ++i) warm.g(Element(std::to_string(i), testing::random_text(64, i)));
  CHECK(warm.compression_jobs() == 0);

  std::ofstream(dir / "bad.tsv") << "nothex\t12\n";
  CHECK_THROWS_AS(loaded.load(dir / "bad.tsv"), LoadError);
}

TEST_CASE("normality: identical elements are monotone") {
  std::vector<Element> same;
  for (int i = 0; i < 6; ++i) same.emplace_back(std::to_string(i), std::string(2000, 'z'));
  auto r = normality_report(Backend::bzip2(), same);
  CHECK(r.monotonicity.empty());
  CHECK(r.monotonicity_checked > 0);
  CHECK(r.idempotency.empty());
}

TEST_CASE("normality: violations exceed their tolerance") {
  std::vector<Element> corpus;
  for (int i = 0; i < 6; ++i) corpus.emplace_back(std::to_string(i), testing::random_bytes(4096, 50 + i));
  NormalityOptions opts;
  auto r = normality_report(Backend::bzip2(), corpus, opts);
  for (const auto* list : {&r.idempotency, &r.monotonicity, &r.symmetry, &r.distributivity}) {
    for (const auto& v : *list) CHECK(v.slack > v.tolerance);
  }
  CHECK(r.symmetry_checked == 30);
  CHECK(r.distributivity_checked == 64);
  MESSAGE("bzip2 on random 4 KiB: idempotency=" << r.idempotency.size()
          << " monotonicity=" << r.monotonicity.size() << " symmetry=" << r.symmetry.size()
          << " distributivity=" << r.distributivity.size());
}

TEST_CASE("normality: zero tolerance exposes stream-compressor asymmetry") {
  std::vector<Element> corpus;
  for (int i = 0; i < 6; ++i) {
    corpus.emplace_back(std::to_string(i), testing::text_fragment(i % 4, 150 + 40 * i, i));
  }
  NormalityOptions zero;
  zero.slack_base = 0;
  zero.log_slack = false;
  auto r = normality_report(Backend::deflate(), corpus, zero);
  CHECK_FALSE(r.symmetry.empty());
  CHECK(normality_tolerance(0, zero) == 0);
  CHECK(normality_tolerance(1023, NormalityOptions{}) == 74);
  CHECK_THROWS_AS(normality_report(Backend::deflate(), {}, zero), InvalidArgument);
}
