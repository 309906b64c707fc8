#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncdm/classify.hpp"
#include "ncdm/element.hpp"

namespace ncdm::ingest {

/// T × D matrix of finite reals, row-major (one row per time point).
struct TimeSeries {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> names;

  double at(std::size_t t, std::size_t f) const { return values[t * cols + f]; }
  void validate() const;
};

/// Printable 64-symbol alphabet used for quantized streams.
std::string_view symbol_alphabet();

enum class Layout { kTimeMajor, kFeatureMajor };

struct QuantizerConfig {
  std::size_t n_symbols = 8;
  /// n_symbols − 1 ascending cut points per feature; value v maps to the
  /// number of edges <= v.
  std::vector<std::vector<double>> edges;
  Layout layout = Layout::kTimeMajor;
  /// Shift feature f by f·n_symbols in the alphabet (mod 64), so features
  /// use disjoint symbols whenever D·n_symbols <= 64.
  bool offset_features = true;
};

/// Equal-frequency bin edges per feature, fitted over every row of every
/// series in the corpus.
QuantizerConfig fit_quantizer(std::span<const TimeSeries> corpus,
                              std::size_t n_symbols,
                              Layout layout = Layout::kTimeMajor);

std::size_t quantize_value(double v, std::span<const double> edges);

Element quantize_timeseries(const TimeSeries& ts, const QuantizerConfig& cfg,
                            std::string id = {});

/// Convenience form: fits the bins on `ts` alone unless edges are given.
Element quantize_timeseries(const TimeSeries& ts, std::size_t n_symbols,
                            std::optional<std::vector<std::vector<double>>> edges =
                                std::nullopt,
                            std::string id = {});

TimeSeries read_timeseries_csv(const std::filesystem::path& path);

std::string quantizer_to_json(const QuantizerConfig& cfg);
QuantizerConfig quantizer_from_json(std::string_view text);

// Images ---------------------------------------------------------------------

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
};

GrayImage upscale_nearest(const GrayImage& img, std::size_t scale);

/// Otsu threshold over the 256 gray levels: pixels <= t form the dark
/// class. Maximizes between-class variance exactly (integer arithmetic);
/// a run of equal maxima resolves to its midpoint. A single-level image
/// returns that level.
int otsu_threshold(const GrayImage& img);

/// Nearest-neighbour upscale, Otsu binarization (pixel > t is '1'), and
/// row-major serialization as ASCII '0'/'1' (or MSB-first packed bits).
Element image_to_bitstream(const GrayImage& img, std::size_t scale = 4,
                           bool packed = false, std::string id = {});

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

/// IDX3 unsigned-byte image file (MNIST layout).
std::vector<GrayImage> read_idx_images(const std::filesystem::path& path);
/// IDX1 unsigned-byte label file.
std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path);

// Corpora --------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);

/// Loads a labeled corpus from either
///  * a directory holding one subdirectory per class label, one element per
///    file, or
///  * a manifest file of `split<TAB>label<TAB>path` lines, split being
///    `train` or `test` (label may be empty for test items), paths relative
///    to the manifest.
/// Element ids are paths relative to the corpus root; ordering is by id.
LabeledCorpus load_corpus(const std::filesystem::path& path);

/// One element per file; ids are the paths as given.
std::vector<Element> load_elements(std::span<const std::filesystem::path> paths);
/// Regular files of a directory, sorted by name; ids relative to `dir`.
std::vector<Element> load_directory(const std::filesystem::path& dir);

}  // namespace ncdm::ingest
