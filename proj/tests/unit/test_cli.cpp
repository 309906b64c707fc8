#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "ncdm/ingest.hpp"
#include "support.hpp"

using namespace ncdm;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ncdm");
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void class_dirs(const testing::TempDir& dir, std::size_t per_class, std::size_t length) {
  for (std::size_t g = 0; g < 2; ++g) {
    auto elems = testing::generator_elements(g, per_class, length, 5, "e");
    for (const auto& e : elems) dir.write("classes/g" + std::to_string(g) + "/" + e.id(), e.bytes());
  }
}

}  // namespace

TEST_CASE("pair") {
  testing::TempDir dir;
  dir.write("a.txt", testing::text_fragment(0, 200, 1) + "\n");
  dir.write("b.txt", testing::random_bytes(3000, 2));
  auto r = run({"pair", (dir / "a.txt").string(), (dir / "a.txt").string(), "--backend", "deflate"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["result"]["value"].get<double>() <= 0.1);
  CHECK(j["config"]["backend"] == "deflate:-1");
  auto bz = run({"pair", (dir / "a.txt").string(), (dir / "a.txt").string()});
  REQUIRE(bz.code == 0);
  CHECK(json::parse(bz.out)["config"]["backend"] == "bzip2:9");
  CHECK(j["config"]["framing"] == "length-prefixed");
  CHECK(r.err.find("pairwise NCD") != std::string::npos);

  auto d = run({"pair", (dir / "a.txt").string(), (dir / "b.txt").string(), "--backend", "deflate"});
  REQUIRE(d.code == 0);
  CHECK(json::parse(d.out)["config"]["backend"] == "deflate:-1");
  CHECK(json::parse(d.out)["result"]["value"].get<double>() > 0.5);
}

TEST_CASE("two-file multiset equals the pair") {
  testing::TempDir dir;
  dir.write("m/x", testing::text_fragment(1, 150, 3));
  dir.write("m/y", testing::text_fragment(2, 120, 4));
  auto pair = run({"pair", (dir / "m/x").string(), (dir / "m/y").string()});
  auto ms = run({"multiset", "--heuristic", (dir / "m").string()});
  REQUIRE(pair.code == 0);
  REQUIRE(ms.code == 0);
  CHECK(json::parse(pair.out)["result"]["value"] == json::parse(ms.out)["result"]["value"]);
  auto ex = run({"multiset", "--exact", (dir / "m").string()});
  CHECK(json::parse(ex.out)["result"]["value"] == json::parse(ms.out)["result"]["value"]);
  auto n1 = run({"multiset", "--ncd1", (dir / "m").string()});
  CHECK(json::parse(n1.out)["result"]["formula"] == "ncd1");
}

TEST_CASE("exit codes and no partial output") {
  testing::TempDir dir;
  dir.write("a", "aaa");
  auto missing = run({"pair", (dir / "a").string(), (dir / "nope").string()});
  CHECK(missing.code == 2);
  CHECK(missing.out.empty());
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"pair", (dir / "a").string()}).code == 2);
  CHECK(run({"pair", "--framing", "zip", (dir / "a").string(), (dir / "a").string()}).code == 2);

  auto no_cmd = run({"pair", (dir / "a").string(), (dir / "a").string(), "--backend",
                     "cmd:/definitely/not/here"});
  CHECK(no_cmd.code == 1);
  CHECK(no_cmd.out.empty());
  auto bad_backend = run({"pair", (dir / "a").string(), (dir / "a").string(), "--backend", "lzma"});
  CHECK(bad_backend.code == 1);

  // Empty output from the compressor: zero denominators.
  auto degenerate = run({"pair", (dir / "a").string(), (dir / "a").string(), "--backend", "cmd:cat >/dev/null"});
  CHECK(degenerate.code == 1);
  CHECK(degenerate.out.empty());
  CHECK(degenerate.err.find("zero") != std::string::npos);

  auto one = run({"multiset", (dir / "a").string()});
  CHECK(one.code == 1);
  CHECK(one.out.empty());
}

TEST_CASE("matrix") {
  testing::TempDir dir;
  for (int i = 0; i < 4; ++i) dir.write("m/f" + std::to_string(i), testing::text_fragment(i % 2, 80, i));
  auto r = run({"matrix", (dir / "m").string()});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
  auto f = run({"matrix", (dir / "m").string(), "-o", (dir / "out.csv").string(), "-j", "3"});
  REQUIRE(f.code == 0);
  CHECK(json::parse(f.out)["dimension"] == 4);
  CHECK(json::parse(f.out)["compression_jobs"] == 4 + 6);
  CHECK(ingest::read_file(dir / "out.csv") == r.out);
}

TEST_CASE("loocv is reproducible and independent of --jobs") {
  testing::TempDir dir;
  class_dirs(dir, 4, 600);
  auto classes = (dir / "classes").string();
  auto a = run({"loocv", "--classes", classes, "--method", "delta", "--seed", "3"});
  auto b = run({"loocv", "--classes", classes, "--method", "delta", "--seed", "3"});
  auto c = run({"loocv", "--classes", classes, "--method", "delta", "--seed", "3", "--jobs", "4"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  auto j = json::parse(a.out);
  CHECK(j["n"] == 8);
  CHECK(j["method"] == "delta-ncd1");
  CHECK(j["backend"] == "bzip2:9");
  CHECK(j["seed"] == 3);
  CHECK(j["accuracy"] == 1.0);
  CHECK(j["items"].size() == 8);
  CHECK(j["ci"]["lo"].get<double>() <= 1.0);
  auto m = run({"loocv", "--classes", classes, "--method", "min-distance"});
  REQUIRE(m.code == 0);
  CHECK(json::parse(m.out)["method"] == "min-distance");
  CHECK(run({"loocv", "--classes", classes, "--method", "knn"}).code == 1);
}

TEST_CASE("classify held-out files") {
  testing::TempDir dir;
  class_dirs(dir, 4, 600);
  dir.write("q/q0", testing::generator_sample(0, 600, 1234));
  dir.write("q/q1", testing::generator_sample(1, 600, 4321));
  auto r = run({"classify", "--classes", (dir / "classes").string(), (dir / "q").string()});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["items"].size() == 2);
  CHECK(j["items"][0]["predicted"] == "g0");
  CHECK(j["items"][1]["predicted"] == "g1");
  CHECK(run({"classify", "--classes", (dir / "classes").string()}).code == 1);
  CHECK(run({"classify", "--classes", (dir / "none").string(), (dir / "q").string()}).code == 2);
}

TEST_CASE("size cache file") {
  testing::TempDir dir;
  class_dirs(dir, 3, 300);
  auto cache = (dir / "sizes.tsv").string();
  auto args = std::vector<std::string>{"loocv", "--classes", (dir / "classes").string(), "--cache", cache};
  auto cold = run(args);
  auto warm = run(args);
  REQUIRE(cold.code == 0);
  CHECK(cold.out == warm.out);
  CHECK(std::filesystem::file_size(cache) > 0);
}

TEST_CASE("partition") {
  testing::TempDir dir;
  for (std::size_t g = 0; g < 2; ++g) {
    for (const auto& e : testing::generator_elements(g, 3, 400, 9, "m" + std::to_string(g))) dir.write("classes/mixed/" + e.id(), e.bytes());
  }
  for (const auto& e : testing::generator_elements(2, 6, 400, 9, "p")) dir.write("classes/pure/" + e.id(), e.bytes());
  dir.write("q", testing::generator_sample(2, 400, 77));
  auto r = run({"partition", "--classes", (dir / "classes").string(), "--min-size", "30%",
                "--stop-margin", "0", "--query", (dir / "q").string()});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["tree"]["stop_margin"] == 0.0);
  CHECK(j["queries"].size() == 1);
  CHECK(run({"partition", "--classes", (dir / "classes").string(), "--min-size", "1"}).code == 1);
}

TEST_CASE("synthetic generation, quantization and classification") {
  testing::TempDir dir;
  auto out = (dir / "synth").string();
  auto g = run({"gen-synthetic", "--out", out, "--cells", "4", "--min-length", "30", "--max-length", "40"});
  REQUIRE(g.code == 0);
  auto manifest = json::parse(ingest::read_file(dir / "synth/manifest.json"));
  CHECK(manifest["classes"].size() == 2);
  CHECK(manifest == json::parse(g.out));
  auto again = run({"gen-synthetic", "--out", (dir / "synth2").string(), "--cells", "4",
                    "--min-length", "30", "--max-length", "40", "-j", "2"});
  CHECK(ingest::read_file(dir / "synth/tracks/upsilon_3/cell_00000.csv") ==
        ingest::read_file(dir / "synth2/tracks/upsilon_3/cell_00000.csv"));

  auto q = run({"quantize", (dir / "synth/tracks").string(), "--out", (dir / "q").string(),
                "--symbols", "2", "--save-config", (dir / "qz.json").string()});
  REQUIRE(q.code == 0);
  CHECK(json::parse(q.out)["files"].size() == 8);
  auto q2 = run({"quantize", (dir / "synth/tracks").string(), "--out", (dir / "q2").string(),
                 "--config", (dir / "qz.json").string()});
  REQUIRE(q2.code == 0);
  CHECK(ingest::read_file(dir / "q/upsilon_0.9/cell_00001.txt") ==
        ingest::read_file(dir / "q2/upsilon_0.9/cell_00001.txt"));
  auto lo = run({"loocv", "--classes", (dir / "q").string()});
  CHECK(lo.code == 0);
}

TEST_CASE("image2bits") {
  testing::TempDir dir;
  ingest::GrayImage img{2, 2, {0, 255, 255, 0}};
  ingest::write_pgm(img, dir / "x.pgm");
  auto r = run({"image2bits", (dir / "x.pgm").string(), "--out", (dir / "bits").string(), "--scale", "1"});
  REQUIRE(r.code == 0);
  CHECK(ingest::read_file(dir / "bits/x.txt") == "0110");
  CHECK(run({"image2bits", "--out", (dir / "bits").string()}).code == 1);
}

TEST_CASE("compressor check") {
  testing::TempDir dir;
  for (int i = 0; i < 4; ++i) dir.write("c/" + std::to_string(i), testing::text_fragment(i, 100, i));
  auto r = run({"compressor-check", (dir / "c").string(), "--samples", "10"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["config"]["backend"] == "bzip2:9");
  CHECK(r.err.find("violations") != std::string::npos);
}
