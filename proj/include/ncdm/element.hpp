#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ncdm {

/// An immutable byte string together with a stable identifier.
///
/// Copies share the underlying payload, so an Element can be placed in
/// many multisets without duplicating its bytes.
class Element {
 public:
  Element() : Element(std::string{}, std::string{}) {}
  Element(std::string id, std::string bytes)
      : id_(std::move(id)),
        bytes_(std::make_shared<const std::string>(std::move(bytes))) {}

  const std::string& id() const noexcept { return id_; }
  std::string_view bytes() const noexcept { return *bytes_; }
  std::size_t size() const noexcept { return bytes_->size(); }

  /// Canonical order: length first, then bytes, then id (ids only
  /// disambiguate equal contents; they never affect serialization).
  friend std::strong_ordering operator<=>(const Element& a, const Element& b);
  friend bool operator==(const Element& a, const Element& b) {
    return a.id_ == b.id_ && *a.bytes_ == *b.bytes_;
  }

 private:
  std::string id_;
  std::shared_ptr<const std::string> bytes_;
};

/// Bag of elements held in canonical (length-increasing, then
/// lexicographic) order. Duplicates are allowed.
class Multiset {
 public:
  using const_iterator = std::vector<Element>::const_iterator;

  Multiset() = default;
  explicit Multiset(std::vector<Element> elements);

  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }
  const_iterator begin() const noexcept { return elements_.begin(); }
  const_iterator end() const noexcept { return elements_.end(); }
  std::span<const Element> elements() const noexcept { return elements_; }

  /// Inserts one occurrence, keeping canonical order.
  void add(Element e);

  /// Copy with one occurrence added.
  Multiset with(const Element& e) const;

  /// Copy with the occurrence at canonical position `index` removed.
  Multiset without(std::size_t index) const;

  /// Copy keeping the positions whose bit is set in `mask`.
  Multiset subset(std::uint64_t mask) const;

  /// Multiset union (multiplicities add).
  friend Multiset merge(const Multiset& a, const Multiset& b);

  std::vector<std::string> ids() const;

  friend bool operator==(const Multiset&, const Multiset&) = default;

 private:
  std::vector<Element> elements_;
};

}  // namespace ncdm
