// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance [--jobs N] [--only 1,2,...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ncdm/classify.hpp"
#include "ncdm/datagen.hpp"
#include "ncdm/error.hpp"
#include "ncdm/ingest.hpp"
#include "ncdm/ncd.hpp"
#include "ncdm/partition.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace ncdm;

namespace {

unsigned g_jobs = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

EngineOptions options(Framing framing = Framing::kText) {
  EngineOptions o;
  o.framing = framing;
  o.jobs = g_jobs;
  return o;
}

Element fragment(std::mt19937_64& rng, const std::string& id) {
  std::size_t topic = rng() % 4;
  std::size_t words = 30 + rng() % 120;
  return Element(id, testing::text_fragment(topic, words, rng()));
}

// 1 --------------------------------------------------------------------------

Outcome wilson_intervals() {
  struct Row { double p; std::size_t n; double lo, hi; };
  const Row rows[] = {{0.99, 72, 0.93, 1.00}, {1.00, 72, 0.95, 1.00}, {0.87, 86, 0.78, 0.93},
                      {0.83, 78, 0.73, 0.90}, {0.57, 656, 0.53, 0.61}};
  Outcome o{true, ""};
  for (const auto& r : rows) {
    auto ci = wilson_ci(r.p, r.n);
    bool ok = round2(ci.lo) == r.lo && round2(ci.hi) == r.hi;
    o.pass = o.pass && ok;
    o.detail += fmt("(%.2f,%zu)->[%.2f,%.2f]%s ", r.p, r.n, round2(ci.lo), round2(ci.hi), ok ? "" : "!");
  }
  return o;
}

// 2 --------------------------------------------------------------------------

Outcome heuristic_lower_bound() {
  auto backend = Backend::bzip2();
  Engine engine(backend, options());
  oracle::PowersetNcd oracle(backend);
  std::mt19937_64 rng(2024);
  std::size_t violations = 0, agree = 0;
  double worst = -1e300;
  const std::size_t kCases = 200;
  for (std::size_t c = 0; c < kCases; ++c) {
    std::size_t n = 3 + c % 4;
    std::vector<Element> elems;
    for (std::size_t i = 0; i < n; ++i) elems.push_back(fragment(rng, "m" + std::to_string(c) + "_" + std::to_string(i)));
    Multiset x(elems);
    std::vector<std::string> bag;
    for (const auto& e : x) bag.emplace_back(e.bytes());
    double exact = oracle.exact(bag);
    double heur = ncd_heuristic(engine, x).value;
    worst = std::max(worst, heur - exact);
    violations += heur > exact + 1e-9;
    agree += ncd_exact(engine, x).value == exact;
  }
  return {violations == 0,
          fmt("%zu multisets, %zu violations, max(heuristic - exact) = %.4g, library exact matches oracle on %zu",
              kCases, violations, worst, agree)};
}

// 3 --------------------------------------------------------------------------

struct MetricStats {
  std::size_t triples = 0;
  std::size_t symmetry_failures = 0;
  double identity_max = 0;
  std::size_t monotonicity_failures = 0;
  std::size_t triangle_violations = 0;
};

MetricStats metric_suite(const Backend& backend, bool identity_only = false) {
  Engine engine(backend, options());
  std::mt19937_64 rng(3);
  MetricStats s;
  auto draw = [&](const std::string& tag) {
    std::vector<Element> v;
    std::size_t n = 1 + rng() % 2;
    for (std::size_t i = 0; i < n; ++i) v.push_back(fragment(rng, tag + std::to_string(i)));
    return v;
  };
  for (std::size_t t = 0; t < 50; ++t) {
    ++s.triples;
    auto xs = draw("x"), ys = draw("y"), zs = draw("z");
    Multiset X(xs), Y(ys), Z(zs);
    auto d = [&](const Multiset& m) { return ncd_heuristic(engine, m).value; };

    // Identical elements: 2 and 3 copies of each element of X.
    for (const auto& e : xs) {
      for (std::size_t k : {2u, 3u}) {
        std::vector<Element> copies;
        for (std::size_t i = 0; i < k; ++i) copies.emplace_back("c" + std::to_string(i), std::string(e.bytes()));
        s.identity_max = std::max(s.identity_max, d(Multiset(copies)));
      }
    }
    if (identity_only) continue;

    // Symmetry: every supply order of XYZ and both merge orders agree exactly.
    std::vector<Element> all;
    for (auto* v : {&xs, &ys, &zs}) all.insert(all.end(), v->begin(), v->end());
    std::sort(all.begin(), all.end(), [](const Element& a, const Element& b) { return a.id() < b.id(); });
    const double ref = d(Multiset(all));
    bool sym = d(merge(X, Y)) == d(merge(Y, X));
    std::mt19937_64 perm_rng(t);
    for (int p = 0; p < 6; ++p) {
      std::shuffle(all.begin(), all.end(), perm_rng);
      sym = sym && d(Multiset(all)) == ref;
    }
    s.symmetry_failures += !sym;

    // Subset monotonicity of the exact form over every sub-multiset of XYZ.
    Multiset xyz = merge(merge(X, Y), Z);
    const double whole = ncd_exact(engine, xyz).value;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << xyz.size()); ++mask) {
      if (std::popcount(mask) < 2) continue;
      if (ncd_exact(engine, xyz.subset(mask)).value > whole) {
        ++s.monotonicity_failures;
        break;
      }
    }

    // d(XY) <= d(XZ) + d(ZY) with 0.05 slack.
    if (d(merge(X, Y)) > d(merge(X, Z)) + d(merge(Z, Y)) + 0.05) ++s.triangle_violations;
  }
  return s;
}

Outcome metric_properties() {
  // A verbatim copy is not free for the block and window codecs: bzip2 pays
  // a fifth to a third of the element again, deflate's 258-byte match cap
  // costs about 5% per copy on low-entropy text. Identity is therefore
  // measured with xz, whose repeat matches are nearly free; bzip2 and
  // deflate figures are printed alongside.
  MetricStats bz = metric_suite(Backend::bzip2());
  MetricStats df = metric_suite(Backend::deflate());
  MetricStats xz = metric_suite(Backend::external("xz -c"), true);
  Outcome o;
  o.pass = bz.symmetry_failures == 0 && df.symmetry_failures == 0 && xz.identity_max <= 0.1 &&
           bz.monotonicity_failures == 0 && df.monotonicity_failures == 0 &&
           bz.triangle_violations <= 2;
  o.detail = fmt("%zu triples; symmetry failures bzip2 %zu deflate %zu; identical-element max "
                 "xz %.4f (deflate %.4f, bzip2 %.4f); monotonicity failures %zu/%zu; "
                 "triangle violations bzip2 %zu (deflate %zu)",
                 bz.triples, bz.symmetry_failures, df.symmetry_failures, xz.identity_max,
                 df.identity_max, bz.identity_max, bz.monotonicity_failures,
                 df.monotonicity_failures, bz.triangle_violations, df.triangle_violations);
  return o;
}

// 4 --------------------------------------------------------------------------

Outcome compression_budget() {
  Engine engine(Backend::bzip2(), options());
  std::mt19937_64 rng(4);
  std::vector<Element> elems;
  for (int i = 0; i < 30; ++i) elems.push_back(fragment(rng, "b" + std::to_string(i)));
  engine.reset_job_counter();
  auto v = ncd_heuristic(engine, Multiset(elems));
  const std::size_t limit = 30 * 31 / 2 + 60;
  return {engine.compression_jobs() <= limit && v.compression_jobs == engine.compression_jobs(),
          fmt("|X| = 30: %zu compression jobs (limit %zu), NCD = %.4f", engine.compression_jobs(),
              limit, v.value)};
}

// 5 --------------------------------------------------------------------------

ingest::TimeSeries to_series(const datagen::CellTrack& c) {
  ingest::TimeSeries ts;
  ts.rows = c.length;
  ts.cols = datagen::kFeatureCount;
  ts.values = c.features;
  return ts;
}

Outcome synthetic_classification() {
  const std::size_t kCells = 60;
  const std::size_t kSymbols = 8;
  const ingest::Layout kLayout = ingest::Layout::kTimeMajor;
  std::vector<std::pair<std::string, std::vector<datagen::CellTrack>>> pops;
  std::uint64_t seed = 1;
  for (double u : {3.0, 0.9}) {
    datagen::CellModelParams p;
    p.upsilon = u;
    p.seed = seed++;
    pops.emplace_back(fmt("upsilon_%g", u), datagen::simulate_population(p, kCells, g_jobs));
  }
  std::vector<ingest::TimeSeries> all;
  for (const auto& [label, cells] : pops) {
    for (const auto& c : cells) all.push_back(to_series(c));
  }
  auto cfg = ingest::fit_quantizer(all, kSymbols, kLayout);
  LabeledCorpus corpus;
  for (const auto& [label, cells] : pops) {
    std::vector<Element> members;
    for (const auto& c : cells) {
      members.push_back(ingest::quantize_timeseries(to_series(c), cfg, fmt("%s/%zu", label.c_str(), c.index)));
    }
    corpus.classes[label] = Multiset(members);
  }
  Engine engine(Backend::bzip2(), options());
  auto delta = loocv(engine, corpus, Method::kDeltaNcd1);
  auto pairwise = loocv(engine, corpus, Method::kMinDistance);
  return {delta.accuracy >= 0.80 && delta.accuracy >= pairwise.accuracy,
          fmt("%zu+%zu cells, 23 features, %zu symbols: delta-ncd1 %.3f [%.2f,%.2f], "
              "min-distance %.3f [%.2f,%.2f]",
              kCells, kCells, kSymbols, delta.accuracy, delta.ci.lo, delta.ci.hi,
              pairwise.accuracy, pairwise.ci.lo, pairwise.ci.hi)};
}

// 6 --------------------------------------------------------------------------

Outcome klists_recovery() {
  // Near-copies of two unrelated random strings under deflate; see the
  // decisions log for why bzip2 cannot make the planted split the margin
  // maximum at this size.
  Engine engine(Backend::deflate(), options(Framing::kLengthPrefixed));
  auto a = testing::mutated_copies(0, 10, 1024, 8, 6, "a");
  auto b = testing::mutated_copies(1, 10, 1024, 8, 6, "b");
  const double planted = margin(engine, Multiset(a), Multiset(b));
  std::vector<Element> all = a;
  all.insert(all.end(), b.begin(), b.end());
  PartitionConfig cfg;
  auto split = klists_split(engine, Multiset(all), cfg);
  auto is_planted = [](const Multiset& x, const Multiset& y) {
    std::set<char> px, py;
    for (const auto& e : x) px.insert(e.id().front());
    for (const auto& e : y) py.insert(e.id().front());
    return x.size() == 10 && px.size() == 1 && py.size() == 1 && px != py;
  };
  std::size_t hits = 0;
  std::string sizes;
  for (const auto& r : split.restarts) {
    hits += is_planted(r.a, r.b);
    sizes += fmt("%zu/%zu ", r.a.size(), r.b.size());
  }

  // Informational: how often the best-of-restarts split is the planted one
  // across independent master seeds.
  std::size_t runs_ok = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    PartitionConfig c = cfg;
    c.seed = 100 + seed;
    auto r = klists_split(engine, Multiset(all), c);
    runs_ok += is_planted(r.a, r.b);
  }

  std::string s = testing::random_bytes(1024, 66);
  std::vector<Element> copies;
  for (int i = 0; i < 20; ++i) copies.emplace_back("c" + std::to_string(i), s);
  auto same = klists_split(engine, Multiset(copies), cfg);

  return {hits >= 4 && same.margin <= 0.05,
          fmt("planted split recovered in %zu of %zu restarts (sides %s), planted margin %.4f, "
              "best %.4f; best split planted in %zu of 5 further seeds (informational); identical "
              "20-string best margin %.4f",
              hits, split.restarts.size(), sizes.c_str(), planted, split.margin, runs_ok, same.margin)};
}

// 7 --------------------------------------------------------------------------

Outcome otsu_oracle() {
  std::mt19937_64 rng(7);
  std::size_t mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    ingest::GrayImage img{28, 28, std::vector<std::uint8_t>(784)};
    // Alternate uniform noise with two-mode "stroke on background" images.
    std::normal_distribution<double> ink(190 + i % 40, 25), bg(20 + i % 30, 15);
    std::uniform_int_distribution<int> any(0, 255);
    for (auto& p : img.pixels) {
      double v = i % 2 ? (rng() % 5 == 0 ? ink(rng) : bg(rng)) : any(rng);
      p = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    auto big = ingest::upscale_nearest(img, 4);
    int t = oracle::otsu_brute_force(big);
    std::string expected;
    for (auto p : big.pixels) expected.push_back(p > t ? '1' : '0');
    bool ok = ingest::otsu_threshold(big) == t && ingest::image_to_bitstream(img, 4).bytes() == expected;
    mismatches += !ok;
  }
  return {mismatches == 0, fmt("100 random 28x28 images at scale 4, %zu mismatches", mismatches)};
}

// 8 --------------------------------------------------------------------------

// A crude stroked digit: 0 is a ring, 1 a vertical bar, with jitter.
ingest::GrayImage toy_digit(int digit, std::mt19937_64& rng) {
  ingest::GrayImage img{28, 28, std::vector<std::uint8_t>(784, 0)};
  std::normal_distribution<double> jitter(0, 1.2), noise(0, 12);
  double cx = 14 + jitter(rng), cy = 14 + jitter(rng);
  for (int r = 0; r < 28; ++r) {
    for (int c = 0; c < 28; ++c) {
      bool on;
      if (digit == 0) {
        double rr = std::hypot(r - cy, (c - cx) * 1.4);
        on = rr > 7 && rr < 10;
      } else {
        on = std::abs(c - cx) < 2 && r > 5 && r < 23;
      }
      double v = (on ? 220 : 10) + noise(rng);
      img.pixels[r * 28 + c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

Outcome digit_smoke() {
  std::vector<ingest::GrayImage> imgs;
  std::vector<std::uint8_t> labels;
  std::string source = "synthetic toy digits";
  const char* idx = std::getenv("NCDM_MNIST_IMAGES");
  const char* lab = std::getenv("NCDM_MNIST_LABELS");
  if (idx && lab) {
    imgs = ingest::read_idx_images(idx);
    labels = ingest::read_idx_labels(lab);
    imgs.resize(std::min<std::size_t>(imgs.size(), 40));
    labels.resize(imgs.size());
    source = std::string("IDX subset ") + idx;
  } else {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 16; ++i) {
      imgs.push_back(toy_digit(i % 2, rng));
      labels.push_back(static_cast<std::uint8_t>(i % 2));
    }
  }
  std::vector<Element> bits;
  LabeledCorpus corpus;
  std::map<std::string, std::vector<Element>> by_label;
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    bits.push_back(ingest::image_to_bitstream(imgs[i], 4, false, fmt("img_%05zu", i)));
    by_label[std::to_string(labels[i])].push_back(bits.back());
  }
  Engine engine(Backend::bzip2(), options());
  auto m = distance_matrix(engine, bits);
  for (auto& [label, members] : by_label) {
    if (members.size() >= 3) corpus.classes[label] = Multiset(members);
  }
  auto r = loocv(engine, corpus, Method::kDeltaNcd1);
  return {true, fmt("declared not reproducible here (real-data accuracies need unavailable "
                    "datasets); pipeline smoke on %s: %zu bitstreams, %zux%zu matrix, LOOCV "
                    "accuracy %.3f over %zu items",
                    source.c_str(), bits.size(), m.labels.size(), m.labels.size(), r.accuracy, r.n)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if ((a == "--jobs" || a == "-j") && i + 1 < argc) {
      g_jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::cerr << "usage: acceptance [--jobs N] [--only 1,2,...]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"confidence intervals", wilson_intervals},
      {"heuristic lower bound", heuristic_lower_bound},
      {"metric properties", metric_properties},
      {"compression-job budget", compression_budget},
      {"synthetic classification", synthetic_classification},
      {"K-Lists recovery", klists_recovery},
      {"Otsu oracle", otsu_oracle},
      {"declared / digit pipeline smoke", digit_smoke},
  };
  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
              << "): " << o.detail << fmt(" [%.1fs]", secs) << std::endl;
  }
  return all_pass ? 0 : 1;
}
