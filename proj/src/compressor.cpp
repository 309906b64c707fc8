#include "ncdm/compressor.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ncdm/error.hpp"

namespace ncdm {

std::string serialize_multiset(const Multiset& x, Framing framing,
                               char separator) {
  std::size_t total = 0;
  for (const auto& e : x) total += e.size() + 10;
  std::string out;
  out.reserve(total);
  bool first = true;
  for (const auto& e : x) {
    auto bytes = e.bytes();
    if (framing == Framing::kText) {
      if (bytes.find(separator) != std::string_view::npos) {
        throw DegenerateInput("element '" + e.id() +
                              "' contains the separator byte; use "
                              "length-prefixed framing");
      }
      if (!first) out.push_back(separator);
    } else {
      std::uint64_t n = bytes.size();
      do {
        auto b = static_cast<unsigned char>(n & 0x7f);
        n >>= 7;
        if (n != 0) b |= 0x80;
        out.push_back(static_cast<char>(b));
      } while (n != 0);
    }
    out.append(bytes);
    first = false;
  }
  return out;
}

Digest content_digest(std::string_view backend_tag, std::string_view bytes) {
  Digest d{};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const char zero = 0;
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, backend_tag.data(), backend_tag.size());
  EVP_DigestUpdate(ctx, &zero, 1);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, d.data(), &len);
  EVP_MD_CTX_free(ctx);
  return d;
}

std::string to_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(d.size() * 2);
  for (auto b : d) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

std::optional<Digest> digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Digest d{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    d[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return d;
}

// SizeCache -----------------------------------------------------------------

std::size_t SizeCache::get_or_compute(
    const Digest& key, const std::function<std::size_t()>& compute) {
  std::promise<std::size_t> promise;
  std::shared_future<std::size_t> existing;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      existing = it->second;
    } else {
      entries_.emplace(key, promise.get_future().share());
    }
  }
  if (existing.valid()) return existing.get();
  try {
    std::size_t value = compute();
    promise.set_value(value);
    return value;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex_);
    entries_.erase(key);
    throw;
  }
}

std::optional<std::size_t> SizeCache::lookup(const Digest& key) const {
  std::shared_future<std::size_t> fut;
  {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    fut = it->second;
  }
  return fut.get();
}

void SizeCache::insert(const Digest& key, std::size_t size) {
  std::promise<std::size_t> p;
  p.set_value(size);
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(key, p.get_future().share());
}

std::size_t SizeCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void SizeCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read cache snapshot " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    std::optional<Digest> key;
    std::size_t value = 0;
    bool ok = false;
    if (tab != std::string::npos) {
      key = digest_from_hex(std::string_view(line).substr(0, tab));
      try {
        std::size_t used = 0;
        value = std::stoull(line.substr(tab + 1), &used);
        ok = key.has_value() && used == line.size() - tab - 1;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      throw LoadError("malformed cache record at " + path.string() + ":" +
                      std::to_string(lineno));
    }
    insert(*key, value);
  }
}

void SizeCache::save(const std::filesystem::path& path) const {
  std::vector<std::pair<Digest, std::shared_future<std::size_t>>> snapshot;
  {
    std::lock_guard lock(mutex_);
    snapshot.assign(entries_.begin(), entries_.end());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("cannot write cache snapshot " + path.string());
  // std::map keeps digests sorted already.
  for (auto& [key, fut] : snapshot) {
    out << to_hex(key) << '\t' << fut.get() << '\n';
  }
}

// Engine --------------------------------------------------------------------

Engine::Engine(Backend backend, EngineOptions options,
               std::shared_ptr<SizeCache> cache)
    : backend_(std::move(backend)),
      options_(options),
      cache_(cache ? std::move(cache) : std::make_shared<SizeCache>()),
      jobs_issued_(std::make_unique<std::atomic<std::size_t>>(0)) {}

std::size_t Engine::measure(const std::string& bytes) const {
  auto compute = [&] {
    jobs_issued_->fetch_add(1);
    return backend_.compressed_size(bytes);
  };
  if (!options_.memoize) return compute();
  return cache_->get_or_compute(content_digest(backend_.name(), bytes), compute);
}

std::size_t Engine::g(const Multiset& x) const {
  if (x.empty()) throw InvalidArgument("G(X) requires a non-empty multiset");
  return measure(serialize_multiset(x, options_.framing, options_.separator));
}

std::size_t Engine::g(const Element& x) const {
  return g(Multiset({x}));
}

}  // namespace ncdm
