#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "ncdm/classify.hpp"
#include "ncdm/compressor.hpp"
#include "ncdm/datagen.hpp"
#include "ncdm/error.hpp"
#include "ncdm/ingest.hpp"
#include "ncdm/ncd.hpp"
#include "ncdm/partition.hpp"
#include "ncdm/report.hpp"

namespace ncdm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string backend;
  std::string framing = "auto";
  unsigned jobs = 0;
  std::string cache_file;
  std::uint64_t seed = 1;
  double epsilon = 0.1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--backend", c.backend,
                  "bzip2[:N] | deflate[:N] | cmd:<command> (default $NCDM_BACKEND or bzip2)");
  app->add_option("--framing", c.framing,
                  "auto | text | length-prefixed (auto: text unless an element contains a newline)")
      ->check(CLI::IsMember({"auto", "text", "length-prefixed"}));
  app->add_option("--jobs,-j", c.jobs, "worker threads (0 = all cores)");
  app->add_option("--cache", c.cache_file, "persistent compressed-size cache");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--epsilon", c.epsilon, "tolerated NCD slack above 1");
}

Backend resolve_backend(const Common& c) {
  if (!c.backend.empty()) return Backend::parse(c.backend);
  if (const char* env = std::getenv("NCDM_BACKEND"); env && *env) return Backend::parse(env);
  return Backend::bzip2();
}

Framing resolve_framing(const Common& c, std::span<const Element> elements) {
  if (c.framing == "text") return Framing::kText;
  if (c.framing == "length-prefixed") return Framing::kLengthPrefixed;
  for (const auto& e : elements) {
    if (e.bytes().find(kDefaultSeparator) != std::string_view::npos) {
      return Framing::kLengthPrefixed;
    }
  }
  return Framing::kText;
}

std::vector<Element> corpus_elements(const LabeledCorpus& corpus) {
  std::vector<Element> all;
  for (const auto& [label, members] : corpus.classes) {
    all.insert(all.end(), members.begin(), members.end());
  }
  for (const auto& t : corpus.tests) all.push_back(t.element);
  return all;
}

struct Session {
  Engine engine;
  const Common& common;

  Session(const Common& c, std::span<const Element> elements)
      : engine(resolve_backend(c),
               EngineOptions{resolve_framing(c, elements), kDefaultSeparator, c.jobs,
                             c.epsilon, true}),
        common(c) {
    if (!c.cache_file.empty() && fs::exists(c.cache_file)) engine.cache().load(c.cache_file);
  }

  void persist() const {
    if (!common.cache_file.empty()) engine.cache().save(common.cache_file);
  }

  // --jobs is deliberately absent: it must not change the output bytes.
  json config() const {
    return {{"backend", engine.backend().name()},
            {"framing", engine.options().framing == Framing::kText ? "text" : "length-prefixed"},
            {"seed", common.seed},
            {"epsilon", common.epsilon}};
  }
};

std::vector<Element> gather_elements(const std::vector<std::string>& inputs) {
  std::vector<Element> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      for (auto& e : ingest::load_directory(in)) {
        out.emplace_back((fs::path(in) / e.id()).generic_string(), std::string(e.bytes()));
      }
    } else {
      fs::path p = in;
      auto more = ingest::load_elements(std::span(&p, 1));
      out.insert(out.end(), more.begin(), more.end());
    }
  }
  return out;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

struct Output {
  std::string text;     // machine-readable report
  std::string summary;  // human line
};

Output emit(json report, std::string summary) {
  return {report.dump(2) + "\n", std::move(summary)};
}

// Subcommands ----------------------------------------------------------------

struct PairArgs {
  std::string a, b;
};

Output cmd_pair(const Common& c, const PairArgs& args) {
  auto elems = gather_elements({args.a, args.b});
  Session s(c, elems);
  auto v = ncd_pairwise(s.engine, elems[0], elems[1]);
  s.persist();
  return emit({{"command", "pair"}, {"config", s.config()}, {"inputs", {elems[0].id(), elems[1].id()}},
               {"result", to_json(v)}},
              "pairwise NCD = " + fmt(v.value, 6));
}

struct MultisetArgs {
  std::vector<std::string> inputs;
  bool exact = false;
  bool ncd1_only = false;
  std::size_t max_card = kDefaultMaxCardinality;
};

Output cmd_multiset(const Common& c, const MultisetArgs& args) {
  Multiset x(gather_elements(args.inputs));
  Session s(c, x.elements());
  NcdValue v = args.exact ? ncd_exact(s.engine, x, args.max_card)
               : args.ncd1_only ? ncd1(s.engine, x)
                                : ncd_heuristic(s.engine, x);
  s.persist();
  return emit({{"command", "multiset"}, {"config", s.config()}, {"inputs", x.ids()},
               {"result", to_json(v)}},
              std::string(to_string(v.formula)) + " NCD of " + std::to_string(x.size()) +
                  " elements = " + fmt(v.value, 6));
}

struct MatrixArgs {
  std::vector<std::string> inputs;
  std::string output;
};

Output cmd_matrix(const Common& c, const MatrixArgs& args) {
  auto elems = gather_elements(args.inputs);
  Session s(c, elems);
  auto m = distance_matrix(s.engine, elems);
  std::ostringstream csv;
  write_csv(m, csv);
  s.persist();
  std::string summary = std::to_string(m.dimension()) + "x" + std::to_string(m.dimension()) +
                        " distance matrix";
  if (args.output.empty()) return {csv.str(), summary};
  std::ofstream f(args.output, std::ios::trunc);
  if (!f) throw LoadError("cannot write " + args.output);
  f << csv.str();
  return emit({{"command", "matrix"}, {"config", s.config()}, {"output", args.output},
               {"dimension", m.dimension()}, {"compression_jobs", s.engine.compression_jobs()}},
              summary);
}

struct ClassifyArgs {
  std::string classes;
  std::string method = "delta";
  std::vector<std::string> items;
};

json classification_report(const Session& s, const std::string& command,
                           const ClassificationReport& r) {
  json j = to_json(r);
  j["command"] = command;
  j["config"] = s.config();
  j["backend"] = s.engine.backend().name();
  j["seed"] = s.common.seed;
  return j;
}

std::string summary_line(const ClassificationReport& r) {
  return std::string(to_string(r.method)) + ": " + std::to_string(r.correct) + "/" +
         std::to_string(r.n) + " correct, accuracy " + fmt(r.accuracy, 3) + " [" +
         fmt(r.ci.lo, 2) + ", " + fmt(r.ci.hi, 2) + "]";
}

Output cmd_classify(const Common& c, const ClassifyArgs& args) {
  LabeledCorpus corpus = ingest::load_corpus(args.classes);
  for (auto& e : gather_elements(args.items)) corpus.tests.push_back({std::move(e), std::nullopt});
  Session s(c, corpus_elements(corpus));
  if (corpus.tests.empty()) throw InvalidArgument("no test items to classify");
  auto r = classify_tests(s.engine, corpus, parse_method(args.method));
  s.persist();
  std::string summary = r.n ? summary_line(r)
                            : "classified " + std::to_string(r.items.size()) + " items";
  return emit(classification_report(s, "classify", r), summary);
}

Output cmd_loocv(const Common& c, const ClassifyArgs& args) {
  LabeledCorpus corpus = ingest::load_corpus(args.classes);
  Session s(c, corpus_elements(corpus));
  auto r = loocv(s.engine, corpus, parse_method(args.method));
  s.persist();
  return emit(classification_report(s, "loocv", r), summary_line(r));
}

struct PartitionArgs {
  std::string classes;
  std::size_t restarts = 5;
  std::size_t max_iters = 100;
  std::string min_size = "2";
  std::optional<double> stop_margin;
  std::vector<std::string> query;
  std::size_t k = 2;
};

Output cmd_partition(const Common& c, const PartitionArgs& args) {
  LabeledCorpus corpus = ingest::load_corpus(args.classes);
  auto queries = gather_elements(args.query);
  auto all = corpus_elements(corpus);
  all.insert(all.end(), queries.begin(), queries.end());
  Session s(c, all);
  PartitionConfig cfg;
  cfg.restarts = args.restarts;
  cfg.max_iters = args.max_iters;
  cfg.min_size = MinSize::parse(args.min_size);
  cfg.seed = c.seed;
  auto tree = recursive_partition(s.engine, corpus.classes, cfg, args.stop_margin);
  json j = {{"command", "partition"},
            {"config", s.config()},
            {"partition", {{"restarts", cfg.restarts},
                           {"max_iters", cfg.max_iters},
                           {"min_size", args.min_size}}},
            {"tree", to_json(tree)}};
  if (!args.query.empty()) {
    json q = json::array();
    for (const auto& e : queries) {
      q.push_back({{"id", e.id()}, {"distances", min_class_distances(s.engine, e, tree, args.k)}});
    }
    j["queries"] = std::move(q);
  }
  s.persist();
  std::size_t leaves = 0;
  for (const auto& [label, node] : tree.classes) leaves += node.leaves().size();
  return emit(j, std::to_string(tree.classes.size()) + " classes, " + std::to_string(leaves) +
                     " leaves, stop margin " + fmt(tree.stop_margin, 4));
}

struct GenArgs {
  std::string out;
  std::size_t cells = 20;
  std::vector<double> upsilon{3.0, 0.9};
  datagen::CellModelParams params;
};

std::string upsilon_label(double u) {
  std::ostringstream ss;
  ss << "upsilon_" << u;
  return ss.str();
}

Output cmd_gen(const Common& c, GenArgs args) {
  fs::path root = args.out;
  fs::create_directories(root / "tracks");
  json classes = json::object();
  for (std::size_t k = 0; k < args.upsilon.size(); ++k) {
    datagen::CellModelParams p = args.params;
    p.upsilon = args.upsilon[k];
    p.seed = c.seed + k;
    auto cells = datagen::simulate_population(p, args.cells, c.jobs);
    std::string label = upsilon_label(p.upsilon);
    fs::path dir = root / "tracks" / label;
    fs::create_directories(dir);
    std::vector<std::string> files;
    for (const auto& cell : cells) {
      char name[32];
      std::snprintf(name, sizeof name, "cell_%05zu.csv", cell.index);
      std::ofstream f(dir / name, std::ios::trunc);
      if (!f) throw LoadError("cannot write " + (dir / name).string());
      datagen::write_track_csv(cell, f);
      files.push_back((fs::path("tracks") / label / name).generic_string());
    }
    classes[label] = population_manifest(p, cells, files);
  }
  json manifest = {{"command", "gen-synthetic"}, {"seed", c.seed}, {"cells_per_class", args.cells},
                   {"classes", classes}};
  std::ofstream m(root / "manifest.json", std::ios::trunc);
  if (!m) throw LoadError("cannot write manifest");
  m << manifest.dump(2) << '\n';
  return emit(manifest, "wrote " + std::to_string(args.cells * args.upsilon.size()) +
                            " tracks under " + (root / "tracks").string());
}

struct QuantizeArgs {
  std::string input;
  std::string out;
  std::size_t symbols = 8;
  std::string layout = "time-major";
  std::string config_in;
  std::string config_out;
};

Output cmd_quantize(const Common& c, const QuantizeArgs& args) {
  // Input: class directory of CSV files (one subdirectory per label).
  fs::path in = args.input;
  std::vector<std::pair<fs::path, ingest::TimeSeries>> series;
  std::error_code ec;
  if (!fs::is_directory(in, ec)) throw LoadError("not a directory: " + in.string());
  for (const auto& entry : fs::recursive_directory_iterator(in)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      series.emplace_back(entry.path().lexically_relative(in), ingest::TimeSeries{});
    }
  }
  std::sort(series.begin(), series.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (series.empty()) throw LoadError("no .csv files under " + in.string());
  for (auto& [rel, ts] : series) ts = ingest::read_timeseries_csv(in / rel);

  ingest::QuantizerConfig cfg;
  if (!args.config_in.empty()) {
    cfg = ingest::quantizer_from_json(ingest::read_file(args.config_in));
  } else {
    std::vector<ingest::TimeSeries> all;
    for (auto& [rel, ts] : series) all.push_back(ts);
    cfg = ingest::fit_quantizer(all, args.symbols,
                                args.layout == "feature-major" ? ingest::Layout::kFeatureMajor
                                                               : ingest::Layout::kTimeMajor);
  }
  fs::path out = args.out;
  json files = json::array();
  for (auto& [rel, ts] : series) {
    auto e = ingest::quantize_timeseries(ts, cfg, rel.generic_string());
    fs::path target = (out / rel).replace_extension(".txt");
    fs::create_directories(target.parent_path());
    std::ofstream f(target, std::ios::binary | std::ios::trunc);
    if (!f) throw LoadError("cannot write " + target.string());
    f << e.bytes();
    files.push_back(target.lexically_relative(out).generic_string());
  }
  if (!args.config_out.empty()) {
    std::ofstream f(args.config_out, std::ios::trunc);
    f << ingest::quantizer_to_json(cfg) << '\n';
  }
  return emit({{"command", "quantize"},
               {"n_symbols", cfg.n_symbols},
               {"layout", cfg.layout == ingest::Layout::kTimeMajor ? "time-major" : "feature-major"},
               {"files", files},
               {"quantizer", json::parse(ingest::quantizer_to_json(cfg))}},
              "quantized " + std::to_string(series.size()) + " series with " +
                  std::to_string(cfg.n_symbols) + " symbols");
}

struct ImageArgs {
  std::vector<std::string> images;
  std::string idx;
  std::string labels;
  std::size_t limit = 0;
  std::size_t scale = 4;
  bool packed = false;
  std::string out;
};

Output cmd_image2bits(const Common& c, const ImageArgs& args) {
  fs::path out = args.out;
  fs::create_directories(out);
  json files = json::array();
  auto write = [&](const fs::path& rel, const ingest::GrayImage& img) {
    auto e = ingest::image_to_bitstream(img, args.scale, args.packed);
    fs::path target = out / rel;
    fs::create_directories(target.parent_path());
    std::ofstream f(target, std::ios::binary | std::ios::trunc);
    if (!f) throw LoadError("cannot write " + target.string());
    f << e.bytes();
    files.push_back({{"file", rel.generic_string()}, {"threshold", ingest::otsu_threshold(
                                                                       ingest::upscale_nearest(img, args.scale))}});
  };
  if (!args.idx.empty()) {
    auto imgs = ingest::read_idx_images(args.idx);
    std::vector<std::uint8_t> labels;
    if (!args.labels.empty()) {
      labels = ingest::read_idx_labels(args.labels);
      if (labels.size() < imgs.size()) throw LoadError("fewer labels than images");
    }
    std::size_t n = args.limit ? std::min(args.limit, imgs.size()) : imgs.size();
    for (std::size_t i = 0; i < n; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "img_%05zu.txt", i);
      fs::path rel = labels.empty() ? fs::path(name) : fs::path(std::to_string(labels[i])) / name;
      write(rel, imgs[i]);
    }
  }
  for (const auto& p : args.images) {
    write(fs::path(p).filename().replace_extension(".txt"), ingest::read_pgm(p));
  }
  if (files.empty()) throw InvalidArgument("no images given (use --idx or PGM paths)");
  return emit({{"command", "image2bits"}, {"scale", args.scale}, {"packed", args.packed},
               {"files", files}},
              "wrote " + std::to_string(files.size()) + " bitstreams to " + out.string());
}

struct CheckArgs {
  std::vector<std::string> inputs;
  double slack = 64;
  bool no_log = false;
  std::size_t samples = 64;
};

Output cmd_check(const Common& c, const CheckArgs& args) {
  Backend backend = resolve_backend(c);
  auto elems = gather_elements(args.inputs);
  NormalityOptions opts;
  opts.slack_base = args.slack;
  opts.log_slack = !args.no_log;
  opts.max_samples = args.samples;
  opts.seed = c.seed;
  opts.jobs = c.jobs;
  auto r = normality_report(backend, elems, opts);
  json j = to_json(r);
  j["command"] = "compressor-check";
  j["config"] = {{"backend", backend.name()}, {"seed", c.seed}};
  return emit(j, "violations: idempotency " + std::to_string(r.idempotency.size()) +
                     ", monotonicity " + std::to_string(r.monotonicity.size()) + ", symmetry " +
                     std::to_string(r.symmetry.size()) + ", distributivity " +
                     std::to_string(r.distributivity.size()));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normalized compression distance for multisets"};
  app.name(args.empty() ? "ncdm" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  Common common;

  PairArgs pair;
  auto* pair_cmd = app.add_subcommand("pair", "pairwise NCD of two files");
  pair_cmd->add_option("a", pair.a)->required();
  pair_cmd->add_option("b", pair.b)->required();

  MultisetArgs ms;
  auto* ms_cmd = app.add_subcommand("multiset", "NCD of a multiset of files");
  ms_cmd->add_option("inputs", ms.inputs, "files or directories")->required();
  auto* exact_flag = ms_cmd->add_flag("--exact", ms.exact, "exhaustive powerset maximum");
  auto* heur_flag = ms_cmd->add_flag("--heuristic", "greedy removal chain (default)");
  auto* ncd1_flag = ms_cmd->add_flag("--ncd1", ms.ncd1_only, "un-maximized NCD1 only");
  exact_flag->excludes(heur_flag)->excludes(ncd1_flag);
  heur_flag->excludes(ncd1_flag);
  ms_cmd->add_option("--max-card", ms.max_card, "cardinality cap for --exact");

  MatrixArgs mx;
  auto* mx_cmd = app.add_subcommand("matrix", "pairwise NCD distance matrix (CSV)");
  mx_cmd->add_option("inputs", mx.inputs, "files or directories")->required();
  mx_cmd->add_option("--output,-o", mx.output, "write CSV here and a JSON summary to stdout");

  ClassifyArgs cl;
  auto* cl_cmd = app.add_subcommand("classify", "classify items against labeled classes");
  cl_cmd->add_option("--classes", cl.classes, "class directory or manifest")->required();
  cl_cmd->add_option("--method", cl.method, "delta | min-distance");
  cl_cmd->add_option("items", cl.items, "test files or directories");

  ClassifyArgs lo;
  auto* lo_cmd = app.add_subcommand("loocv", "leave-one-out cross-validation");
  lo_cmd->add_option("--classes", lo.classes, "class directory or manifest")->required();
  lo_cmd->add_option("--method", lo.method, "delta | min-distance");

  PartitionArgs pa;
  auto* pa_cmd = app.add_subcommand("partition", "K-Lists recursive class partitioning");
  pa_cmd->add_option("--classes", pa.classes, "class directory or manifest")->required();
  pa_cmd->add_option("--restarts", pa.restarts)->check(CLI::PositiveNumber);
  pa_cmd->add_option("--max-iters", pa.max_iters)->check(CLI::PositiveNumber);
  pa_cmd->add_option("--min-size", pa.min_size, "count >= 2 or percentage, e.g. 30%");
  pa_cmd->add_option("--stop-margin", pa.stop_margin, "override the inter-class margin");
  pa_cmd->add_option("--query", pa.query, "items to score against the leaves");
  pa_cmd->add_option("--k", pa.k, "smallest leaf distances reported per class")
      ->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "simulate proliferating-cell tracks");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();
  gen_cmd->add_option("--cells", gen.cells, "cells per population")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--upsilon", gen.upsilon, "growth exponent, one population per value");
  gen_cmd->add_option("--population-limit", gen.params.population_limit);
  gen_cmd->add_option("--founders", gen.params.founders);
  gen_cmd->add_option("--lifespan-shape", gen.params.lifespan_shape);
  gen_cmd->add_option("--lifespan-scale", gen.params.lifespan_scale);
  gen_cmd->add_option("--r0-shape", gen.params.r0_shape);
  gen_cmd->add_option("--r0-scale", gen.params.r0_scale);
  gen_cmd->add_option("--min-length", gen.params.min_track_length);
  gen_cmd->add_option("--max-length", gen.params.max_track_length);
  gen_cmd->add_option("--run-speed", gen.params.motion.run_speed);
  gen_cmd->add_option("--run-mean", gen.params.motion.run_mean_steps);
  gen_cmd->add_option("--tumble-mean", gen.params.motion.tumble_mean_steps);
  gen_cmd->add_option("--tumble-sd", gen.params.motion.tumble_step_sd);

  QuantizeArgs qz;
  auto* qz_cmd = app.add_subcommand("quantize", "quantize CSV time series into symbol streams");
  qz_cmd->add_option("input", qz.input, "directory of CSV files")->required();
  qz_cmd->add_option("--out", qz.out, "output directory")->required();
  qz_cmd->add_option("--symbols", qz.symbols, "symbols per feature (2..64)");
  qz_cmd->add_option("--layout", qz.layout)->check(CLI::IsMember({"time-major", "feature-major"}));
  qz_cmd->add_option("--config", qz.config_in, "apply a saved quantizer instead of fitting");
  qz_cmd->add_option("--save-config", qz.config_out, "write the fitted quantizer as JSON");

  ImageArgs im;
  auto* im_cmd = app.add_subcommand("image2bits", "Otsu-binarize images into bitstreams");
  im_cmd->add_option("images", im.images, "PGM (P5) files");
  im_cmd->add_option("--idx", im.idx, "IDX3 image file");
  im_cmd->add_option("--labels", im.labels, "IDX1 label file (writes one directory per label)");
  im_cmd->add_option("--limit", im.limit, "first N IDX images only");
  im_cmd->add_option("--scale", im.scale)->check(CLI::PositiveNumber);
  im_cmd->add_flag("--packed", im.packed, "pack bits instead of ASCII 0/1");
  im_cmd->add_option("--out", im.out, "output directory")->required();

  CheckArgs ck;
  auto* ck_cmd = app.add_subcommand("compressor-check", "normal-compressor diagnostics");
  ck_cmd->add_option("inputs", ck.inputs, "files or directories")->required();
  ck_cmd->add_option("--slack", ck.slack, "constant tolerance in bytes");
  ck_cmd->add_flag("--no-log-slack", ck.no_log, "drop the log2 tolerance term");
  ck_cmd->add_option("--samples", ck.samples, "pairs/triples sampled per property");

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    add_common(sub, common);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("ncdm");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    err << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << app.get_name() << ": " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Output result;
    if (pair_cmd->parsed()) {
      result = cmd_pair(common, pair);
    } else if (ms_cmd->parsed()) {
      result = cmd_multiset(common, ms);
    } else if (mx_cmd->parsed()) {
      result = cmd_matrix(common, mx);
    } else if (cl_cmd->parsed()) {
      result = cmd_classify(common, cl);
    } else if (lo_cmd->parsed()) {
      result = cmd_loocv(common, lo);
    } else if (pa_cmd->parsed()) {
      result = cmd_partition(common, pa);
    } else if (gen_cmd->parsed()) {
      result = cmd_gen(common, gen);
    } else if (qz_cmd->parsed()) {
      result = cmd_quantize(common, qz);
    } else if (im_cmd->parsed()) {
      result = cmd_image2bits(common, im);
    } else {
      result = cmd_check(common, ck);
    }
    out << result.text;
    out.flush();
    err << result.summary << "\n";
    return kExitOk;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  }
}

}  // namespace ncdm::cli
