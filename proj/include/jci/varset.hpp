#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace jci {

using VarId = int;

/// Hard upper bound on the number of variables in one graph or problem.
inline constexpr int kMaxVariables = 64;

/// Set of variable ids backed by a 64-bit mask. Ordering compares the raw
/// masks, which gives a deterministic (if not human-friendly) total order.
class VarSet {
 public:
  constexpr VarSet() = default;
  explicit constexpr VarSet(std::uint64_t bits) : bits_(bits) {}
  VarSet(std::initializer_list<VarId> ids) {
    for (VarId v : ids) insert(v);
  }

  static VarSet of(const std::vector<VarId>& ids) {
    VarSet s;
    for (VarId v : ids) s.insert(v);
    return s;
  }
  /// {0, 1, ..., n-1}
  static constexpr VarSet first(int n) {
    return VarSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }
  static constexpr VarSet single(VarId v) { return VarSet(std::uint64_t{1} << v); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool contains(VarId v) const { return (bits_ >> v) & 1U; }
  constexpr void insert(VarId v) { bits_ |= std::uint64_t{1} << v; }
  constexpr void erase(VarId v) { bits_ &= ~(std::uint64_t{1} << v); }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool subset_of(VarSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool intersects(VarSet o) const { return (bits_ & o.bits_) != 0; }
  constexpr VarId min() const { return std::countr_zero(bits_); }

  constexpr VarSet operator|(VarSet o) const { return VarSet(bits_ | o.bits_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(bits_ & o.bits_); }
  constexpr VarSet operator-(VarSet o) const { return VarSet(bits_ & ~o.bits_); }
  constexpr VarSet& operator|=(VarSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr VarSet& operator&=(VarSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  constexpr VarSet& operator-=(VarSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }

  constexpr auto operator<=>(const VarSet&) const = default;

  template <class F>
  constexpr void for_each(F&& f) const {
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) f(static_cast<VarId>(std::countr_zero(b)));
  }

  std::vector<VarId> to_vector() const {
    std::vector<VarId> out;
    out.reserve(size());
    for_each([&](VarId v) { out.push_back(v); });
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

/// Calls f(subset) for every subset of `base` with at most `max_size` elements,
/// in order of increasing size, and within a size in increasing mask order.
template <class F>
void for_each_subset_up_to(VarSet base, int max_size, F&& f) {
  const std::vector<VarId> elems = base.to_vector();
  const int n = static_cast<int>(elems.size());
  if (max_size > n) max_size = n;
  std::vector<int> idx;
  for (int k = 0; k <= max_size; ++k) {
    idx.resize(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      VarSet s;
      for (int i : idx) s.insert(elems[i]);
      f(s);
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

}  // namespace jci
