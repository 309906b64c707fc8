#pragma once

// Seeded corpus generators shared by the unit and acceptance tests.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ncdm/element.hpp"

namespace ncdm::testing {

inline std::string random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::string s(n, '\0');
  for (auto& c : s) c = static_cast<char>(byte(rng));
  return s;
}

/// Random string over a printable alphabet (never contains '\n').
inline std::string random_text(std::size_t n, std::uint64_t seed,
                               std::string_view alphabet =
                                   "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789") {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s(n, ' ');
  for (auto& c : s) c = alphabet[pick(rng)];
  return s;
}

/// Word-salad fragments from one of a few topic vocabularies; different
/// topics share no words. No newlines.
inline std::string text_fragment(std::size_t topic, std::size_t words, std::uint64_t seed) {
  static const std::vector<std::vector<std::string>> vocab = {
      {"the", "river", "flows", "under", "old", "stone", "bridge", "while", "boats", "drift",
       "slowly", "past", "green", "banks", "and", "willow", "trees"},
      {"compile", "kernel", "module", "link", "binary", "stack", "heap", "pointer", "thread",
       "mutex", "cache", "register", "branch", "vector", "opcode"},
      {"violin", "sonata", "allegro", "tempo", "chord", "minor", "major", "cadence", "fugue",
       "octave", "harmony", "rhythm", "melody", "overture"},
      {"protein", "enzyme", "cell", "membrane", "ribosome", "genome", "mitosis", "neuron",
       "axon", "synapse", "receptor", "ligand", "peptide"}};
  const auto& v = vocab[topic % vocab.size()];
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s.push_back(' ');
    s += v[pick(rng)];
  }
  return s;
}

/// An element from "generator" g: excerpts of a generator-specific random
/// source text, lightly mutated. Elements of one generator share long
/// substrings; elements of different generators share none.
inline std::string generator_sample(std::size_t generator, std::size_t length,
                                    std::uint64_t seed) {
  static constexpr std::string_view kAlphabets[] = {"abcdefghijklm", "NOPQRSTUVWXYZ",
                                                    "0123456789!?#", "nopqrstuvwxyz"};
  const std::string source =
      random_text(1024, 0xC0FFEE + generator, kAlphabets[generator % 4]);
  std::mt19937_64 rng(seed * 7919 + generator);
  std::uniform_int_distribution<std::size_t> offset(0, source.size() - 128);
  std::string s;
  while (s.size() < length) s += source.substr(offset(rng), 128);
  s.resize(length);
  std::uniform_int_distribution<std::size_t> pos(0, length - 1);
  const std::string mut = random_text(length / 128 + 1, seed ^ 0xABCD, kAlphabets[generator % 4]);
  for (char c : mut) s[pos(rng)] = c;
  return s;
}

inline std::vector<Element> generator_elements(std::size_t generator, std::size_t count,
                                               std::size_t length, std::uint64_t seed,
                                               const std::string& prefix) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.emplace_back(prefix + std::to_string(i),
                     generator_sample(generator, length, seed * 1000 + i));
  }
  return out;
}

/// `count` copies of one generator-specific random string, each with
/// `mutations` random byte substitutions. Copies of one generator are
/// nearly redundant given each other; generators share nothing.
inline std::vector<Element> mutated_copies(std::size_t generator, std::size_t count,
                                           std::size_t length, std::size_t mutations,
                                           std::uint64_t seed, const std::string& prefix) {
  const std::string base = random_bytes(length, 0xBA5E0000 + generator);
  std::mt19937_64 rng(seed * 104729 + generator);
  std::uniform_int_distribution<std::size_t> pos(0, length - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<Element> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string s = base;
    for (std::size_t m = 0; m < mutations; ++m) s[pos(rng)] = static_cast<char>(byte(rng));
    out.emplace_back(prefix + std::to_string(i), std::move(s));
  }
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ncdm-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

  void write(const std::string& rel, std::string_view bytes) const {
    auto p = path_ / rel;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }

 private:
  std::filesystem::path path_;
};

}  // namespace ncdm::testing
