#include "ncdm/element.hpp"

#include <algorithm>
#include <stdexcept>

namespace ncdm {

std::strong_ordering operator<=>(const Element& a, const Element& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  if (auto c = a.bytes().compare(b.bytes()); c != 0) {
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.id_ <=> b.id_;
}

Multiset::Multiset(std::vector<Element> elements)
    : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
}

void Multiset::add(Element e) {
  auto pos = std::upper_bound(elements_.begin(), elements_.end(), e);
  elements_.insert(pos, std::move(e));
}

Multiset Multiset::with(const Element& e) const {
  Multiset out = *this;
  out.add(e);
  return out;
}

Multiset Multiset::without(std::size_t index) const {
  if (index >= elements_.size()) {
    throw std::out_of_range("Multiset::without: index out of range");
  }
  Multiset out;
  out.elements_.reserve(elements_.size() - 1);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (i != index) out.elements_.push_back(elements_[i]);
  }
  return out;
}

Multiset Multiset::subset(std::uint64_t mask) const {
  Multiset out;
  for (std::size_t i = 0; i < elements_.size() && i < 64; ++i) {
    if (mask & (std::uint64_t{1} << i)) out.elements_.push_back(elements_[i]);
  }
  return out;
}

Multiset merge(const Multiset& a, const Multiset& b) {
  Multiset out;
  out.elements_.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(),
             std::back_inserter(out.elements_));
  return out;
}

std::vector<std::string> Multiset::ids() const {
  std::vector<std::string> out;
  out.reserve(elements_.size());
  for (const auto& e : elements_) out.push_back(e.id());
  return out;
}

}  // namespace ncdm
