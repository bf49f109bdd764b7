#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace bct {

/// Fixed-length dynamic bitset backed by 64-bit words. The graph kernels
/// need word-level AND/ANDNOT/popcount loops that std::vector<bool> and
/// boost::dynamic_bitset do not expose without temporaries.
class BitSet {
 public:
  using Word = std::uint64_t;

  BitSet() = default;
  explicit BitSet(std::size_t size, bool value = false)
      : size_(size), words_((size + 63) / 64, value ? ~Word{0} : Word{0}) {
    trim();
  }

  std::size_t size() const { return size_; }
  std::size_t num_words() const { return words_.size(); }
  const Word* data() const { return words_.data(); }
  Word* data() { return words_.data(); }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { words_[i >> 6] |= Word{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(Word{1} << (i & 63)); }
  void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }

  void set_all() {
    for (auto& w : words_) w = ~Word{0};
    trim();
  }
  void clear() {
    for (auto& w : words_) w = 0;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const {
    for (Word w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  BitSet& operator&=(const BitSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  BitSet& operator|=(const BitSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  BitSet& and_not(const BitSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend BitSet operator&(BitSet a, const BitSet& b) { return a &= b; }

  std::size_t count_and(const BitSet& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
    return c;
  }
  bool intersects(const BitSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }
  /// True iff this, a and b share a set bit.
  bool intersects_both(const BitSet& a, const BitSet& b) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & a.words_[i] & b.words_[i]) return true;
    return false;
  }
  bool is_subset_of(const BitSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  /// Calls f(i) for every set bit in increasing order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      Word w = words_[wi];
      while (w) {
        const int b = std::countr_zero(w);
        f(wi * 64 + static_cast<std::size_t>(b));
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  bool operator==(const BitSet&) const = default;

  std::size_t hash() const {
    std::size_t h = size_;
    for (Word w : words_) h = h * 0x9E3779B97F4A7C15ULL ^ std::hash<Word>{}(w);
    return h;
  }

 private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (Word{1} << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<Word> words_;
};

}  // namespace bct
