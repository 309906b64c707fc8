#include "ncdm/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <map>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "ncdm/error.hpp"

namespace ncdm::ingest {

namespace fs = std::filesystem;

void TimeSeries::validate() const {
  if (rows < 1 || cols < 1) throw InvalidArgument("time series needs T >= 1 and D >= 1");
  if (values.size() != rows * cols) throw InvalidArgument("time series shape mismatch");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("time series contains a non-finite value");
  }
}

std::string_view symbol_alphabet() {
  static constexpr std::string_view kAlphabet =
      "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz+/";
  static_assert(kAlphabet.size() == 64);
  return kAlphabet;
}

namespace {

void check_symbols(std::size_t n) {
  if (n < 2 || n > 64) throw InvalidArgument("n_symbols must lie in [2, 64]");
}

}  // namespace

QuantizerConfig fit_quantizer(std::span<const TimeSeries> corpus,
                              std::size_t n_symbols, Layout layout) {
  check_symbols(n_symbols);
  if (corpus.empty()) throw InvalidArgument("cannot fit a quantizer on an empty corpus");
  const std::size_t d = corpus.front().cols;
  for (const auto& ts : corpus) {
    ts.validate();
    if (ts.cols != d) throw InvalidArgument("time series disagree on feature count");
  }
  QuantizerConfig cfg;
  cfg.n_symbols = n_symbols;
  cfg.layout = layout;
  cfg.edges.resize(d);
  std::vector<double> column;
  for (std::size_t f = 0; f < d; ++f) {
    column.clear();
    for (const auto& ts : corpus) {
      for (std::size_t t = 0; t < ts.rows; ++t) column.push_back(ts.at(t, f));
    }
    std::sort(column.begin(), column.end());
    const std::size_t total = column.size();
    auto& e = cfg.edges[f];
    for (std::size_t k = 1; k < n_symbols; ++k) {
      e.push_back(column[std::min(total - 1, k * total / n_symbols)]);
    }
  }
  return cfg;
}

std::size_t quantize_value(double v, std::span<const double> edges) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                  edges.begin());
}

Element quantize_timeseries(const TimeSeries& ts, const QuantizerConfig& cfg,
                            std::string id) {
  check_symbols(cfg.n_symbols);
  ts.validate();
  if (cfg.edges.size() != ts.cols) {
    throw InvalidArgument("quantizer has " + std::to_string(cfg.edges.size()) +
                          " features, series has " + std::to_string(ts.cols));
  }
  const auto alphabet = symbol_alphabet();
  auto symbol = [&](std::size_t t, std::size_t f) {
    std::size_t bin = quantize_value(ts.at(t, f), cfg.edges[f]);
    std::size_t offset = cfg.offset_features ? f * cfg.n_symbols : 0;
    return alphabet[(offset + bin) % alphabet.size()];
  };
  std::string out;
  out.reserve(ts.rows * ts.cols);
  if (cfg.layout == Layout::kTimeMajor) {
    for (std::size_t t = 0; t < ts.rows; ++t) {
      for (std::size_t f = 0; f < ts.cols; ++f) out.push_back(symbol(t, f));
    }
  } else {
    for (std::size_t f = 0; f < ts.cols; ++f) {
      for (std::size_t t = 0; t < ts.rows; ++t) out.push_back(symbol(t, f));
    }
  }
  return Element(std::move(id), std::move(out));
}

Element quantize_timeseries(const TimeSeries& ts, std::size_t n_symbols,
                            std::optional<std::vector<std::vector<double>>> edges,
                            std::string id) {
  QuantizerConfig cfg;
  if (edges) {
    check_symbols(n_symbols);
    cfg.n_symbols = n_symbols;
    cfg.edges = std::move(*edges);
    for (const auto& e : cfg.edges) {
      if (e.size() != n_symbols - 1 || !std::is_sorted(e.begin(), e.end())) {
        throw InvalidArgument("bin edges must hold n_symbols - 1 ascending values");
      }
    }
  } else {
    cfg = fit_quantizer(std::span(&ts, 1), n_symbols);
  }
  return quantize_timeseries(ts, cfg, std::move(id));
}

TimeSeries read_timeseries_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read " + path.string());
  TimeSeries ts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (first && !numeric) {
      ts.names = cells;
      ts.cols = cells.size();
      first = false;
      continue;
    }
    first = false;
    if (!numeric) throw LoadError("non-numeric row in " + path.string());
    if (ts.cols == 0) ts.cols = row.size();
    if (row.size() != ts.cols) throw LoadError("ragged row in " + path.string());
    ts.values.insert(ts.values.end(), row.begin(), row.end());
    ++ts.rows;
  }
  if (ts.rows == 0) throw LoadError("no data rows in " + path.string());
  return ts;
}

std::string quantizer_to_json(const QuantizerConfig& cfg) {
  nlohmann::json j;
  j["n_symbols"] = cfg.n_symbols;
  j["layout"] = cfg.layout == Layout::kTimeMajor ? "time-major" : "feature-major";
  j["offset_features"] = cfg.offset_features;
  j["edges"] = cfg.edges;
  return j.dump(2);
}

QuantizerConfig quantizer_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    QuantizerConfig cfg;
    cfg.n_symbols = j.at("n_symbols").get<std::size_t>();
    auto layout = j.value("layout", std::string("time-major"));
    if (layout == "time-major") {
      cfg.layout = Layout::kTimeMajor;
    } else if (layout == "feature-major") {
      cfg.layout = Layout::kFeatureMajor;
    } else {
      throw InvalidArgument("unknown layout '" + layout + "'");
    }
    cfg.offset_features = j.value("offset_features", true);
    cfg.edges = j.at("edges").get<std::vector<std::vector<double>>>();
    check_symbols(cfg.n_symbols);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed quantizer config: ") + e.what());
  }
}

// Images ---------------------------------------------------------------------

GrayImage upscale_nearest(const GrayImage& img, std::size_t scale) {
  if (scale < 1) throw InvalidArgument("scale must be >= 1");
  GrayImage out;
  out.height = img.height * scale;
  out.width = img.width * scale;
  out.pixels.resize(out.height * out.width);
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      out.pixels[r * out.width + c] = img.at(r / scale, c / scale);
    }
  }
  return out;
}

namespace {

// Plateau midpoint of the first run of maximal scores; -1 if no candidate.
template <typename Score, typename Greater, typename Equal>
int argmax_plateau(const std::array<std::optional<Score>, 256>& score,
                   Greater greater, Equal equal) {
  int first = -1;
  for (int t = 0; t < 256; ++t) {
    if (!score[t]) continue;
    if (first < 0 || greater(*score[t], *score[first])) first = t;
  }
  if (first < 0) return -1;
  int last = first;
  while (last + 1 < 256 && score[last + 1] && equal(*score[last + 1], *score[first])) {
    ++last;
  }
  return (first + last) / 2;
}

}  // namespace

int otsu_threshold(const GrayImage& img) {
  if (img.pixels.empty()) throw InvalidArgument("empty image");
  std::array<std::uint64_t, 256> hist{};
  for (auto p : img.pixels) ++hist[p];
  const std::uint64_t total = img.pixels.size();
  std::uint64_t total_sum = 0;
  for (int i = 0; i < 256; ++i) total_sum += static_cast<std::uint64_t>(i) * hist[i];

  // Between-class variance is proportional to (S0·N1 − S1·N0)² / (N0·N1).
  // Up to 2^18 pixels the fractions are compared exactly in 128 bits.
  int t = -1;
  if (total <= (std::uint64_t{1} << 18)) {
    __extension__ typedef unsigned __int128 u128;
    struct Frac {
      u128 num, den;
    };
    std::array<std::optional<Frac>, 256> score;
    std::uint64_t n0 = 0, s0 = 0;
    for (int k = 0; k < 256; ++k) {
      n0 += hist[k];
      s0 += static_cast<std::uint64_t>(k) * hist[k];
      const std::uint64_t n1 = total - n0;
      if (n0 == 0 || n1 == 0) continue;
      const u128 a = static_cast<u128>(s0) * n1;
      const u128 b = static_cast<u128>(total_sum - s0) * n0;
      const u128 diff = a > b ? a - b : b - a;
      score[k] = Frac{diff * diff, static_cast<u128>(n0) * n1};
    }
    t = argmax_plateau(
        score, [](const Frac& x, const Frac& y) { return x.num * y.den > y.num * x.den; },
        [](const Frac& x, const Frac& y) { return x.num * y.den == y.num * x.den; });
  } else {
    std::array<std::optional<long double>, 256> score;
    long double n0 = 0, s0 = 0;
    const auto n = static_cast<long double>(total);
    const auto sum = static_cast<long double>(total_sum);
    for (int k = 0; k < 256; ++k) {
      n0 += hist[k];
      s0 += static_cast<long double>(k) * hist[k];
      const long double n1 = n - n0;
      if (n0 == 0 || n1 == 0) continue;
      const long double d = s0 / n0 - (sum - s0) / n1;
      score[k] = n0 * n1 * d * d;
    }
    t = argmax_plateau(score, std::greater<>{}, std::equal_to<>{});
  }
  // A single gray level has no valid split; its level is the threshold.
  return t < 0 ? img.pixels.front() : t;
}

Element image_to_bitstream(const GrayImage& img, std::size_t scale, bool packed,
                           std::string id) {
  if (scale < 1) throw InvalidArgument("scale must be >= 1");
  if (img.height == 0 || img.width == 0 || img.pixels.size() != img.height * img.width) {
    throw InvalidArgument("image dimensions must be positive and match the pixel count");
  }
  GrayImage big = upscale_nearest(img, scale);
  const int t = otsu_threshold(big);
  std::string out;
  if (!packed) {
    out.reserve(big.pixels.size());
    for (auto p : big.pixels) out.push_back(p > t ? '1' : '0');
  } else {
    out.assign((big.pixels.size() + 7) / 8, '\0');
    for (std::size_t i = 0; i < big.pixels.size(); ++i) {
      if (big.pixels[i] > t) out[i / 8] = static_cast<char>(out[i / 8] | (0x80 >> (i % 8)));
    }
  }
  return Element(std::move(id), std::move(out));
}

namespace {

// Skips whitespace and '#' comments in a PNM header.
void skip_pnm_space(std::istream& in) {
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

std::uint32_t read_be32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw LoadError("truncated IDX header");
  return std::uint32_t{b[0]} << 24 | std::uint32_t{b[1]} << 16 | std::uint32_t{b[2]} << 8 | b[3];
}

}  // namespace

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw LoadError(path.string() + " is not a binary PGM (P5)");
  std::size_t w = 0, h = 0, maxval = 0;
  skip_pnm_space(in);
  in >> w;
  skip_pnm_space(in);
  in >> h;
  skip_pnm_space(in);
  in >> maxval;
  in.get();
  if (!in || w == 0 || h == 0 || maxval == 0 || maxval > 255) {
    throw LoadError("unsupported PGM header in " + path.string());
  }
  GrayImage img{h, w, std::vector<std::uint8_t>(w * h)};
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()),
               static_cast<std::streamsize>(img.pixels.size()))) {
    throw LoadError("truncated PGM data in " + path.string());
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(p * 255 / maxval);
  }
  return img;
}

void write_pgm(const GrayImage& img, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

std::vector<GrayImage> read_idx_images(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  if (read_be32(in) != 0x00000803) throw LoadError(path.string() + " is not an IDX3 ubyte file");
  const std::uint32_t count = read_be32(in);
  const std::uint32_t rows = read_be32(in);
  const std::uint32_t cols = read_be32(in);
  if (rows == 0 || cols == 0) throw LoadError("IDX images must have positive size");
  std::vector<GrayImage> out(count);
  for (auto& img : out) {
    img = GrayImage{rows, cols, std::vector<std::uint8_t>(std::size_t{rows} * cols)};
    if (!in.read(reinterpret_cast<char*>(img.pixels.data()),
                 static_cast<std::streamsize>(img.pixels.size()))) {
      throw LoadError("truncated IDX image data in " + path.string());
    }
  }
  return out;
}

std::vector<std::uint8_t> read_idx_labels(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  if (read_be32(in) != 0x00000801) throw LoadError(path.string() + " is not an IDX1 ubyte file");
  std::vector<std::uint8_t> out(read_be32(in));
  if (!in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()))) {
    throw LoadError("truncated IDX label data in " + path.string());
  }
  return out;
}

// Corpora --------------------------------------------------------------------

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string relative_id(const fs::path& p, const fs::path& root) {
  return p.lexically_relative(root).generic_string();
}

}  // namespace

std::vector<Element> load_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw LoadError("not a directory: " + dir.string());
  std::vector<Element> out;
  for (const auto& f : sorted_files(dir)) out.emplace_back(relative_id(f, dir), read_file(f));
  return out;
}

std::vector<Element> load_elements(std::span<const fs::path> paths) {
  std::vector<Element> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.emplace_back(p.generic_string(), read_file(p));
  return out;
}

LabeledCorpus load_corpus(const fs::path& path) {
  std::error_code ec;
  LabeledCorpus corpus;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(path)) {
      auto name = entry.path().filename().string();
      if (!name.empty() && name.front() != '.' && entry.is_directory()) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      std::vector<Element> members;
      for (const auto& f : sorted_files(d)) members.emplace_back(relative_id(f, path), read_file(f));
      if (members.empty()) throw LoadError("class directory " + d.string() + " is empty");
      corpus.classes.emplace(d.filename().string(), Multiset(std::move(members)));
    }
    if (corpus.classes.empty()) throw LoadError("no class directories under " + path.string());
    return corpus;
  }
  if (!fs::is_regular_file(path, ec)) throw LoadError("corpus not found: " + path.string());

  const fs::path root = path.parent_path();
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read manifest " + path.string());
  std::map<std::string, std::vector<Element>> classes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw LoadError("manifest line " + std::to_string(lineno) +
                      ": expected split<TAB>label<TAB>path");
    }
    std::string split = line.substr(0, t1);
    std::string label = line.substr(t1 + 1, t2 - t1 - 1);
    fs::path file = line.substr(t2 + 1);
    fs::path full = file.is_absolute() ? file : root / file;
    Element e(file.generic_string(), read_file(full));
    if (split == "train") {
      if (label.empty()) {
        throw LoadError("manifest line " + std::to_string(lineno) + ": training item without label");
      }
      classes[label].push_back(std::move(e));
    } else if (split == "test") {
      corpus.tests.push_back({std::move(e), label.empty() ? std::nullopt
                                                          : std::optional<std::string>(label)});
    } else {
      throw LoadError("manifest line " + std::to_string(lineno) + ": unknown split '" + split + "'");
    }
  }
  for (auto& [label, members] : classes) {
    std::sort(members.begin(), members.end(),
              [](const Element& a, const Element& b) { return a.id() < b.id(); });
    corpus.classes.emplace(label, Multiset(std::move(members)));
  }
  std::sort(corpus.tests.begin(), corpus.tests.end(),
            [](const TestItem& a, const TestItem& b) { return a.element.id() < b.element.id(); });
  return corpus;
}

}  // namespace ncdm::ingest
