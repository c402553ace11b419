#pragma once

#include <concepts>
#include <cstdint>
#include <type_traits>
#include <limits>
#include <string>
#include <vector>

#include "ltswap/error.hpp"

namespace ltswap {

/// A frequency bin [lo, hi). Bin 0 holds only the count 0; the top bin is
/// open-ended (hi == infinity). The label of a bin is its lower bound.
struct FrequencyBin {
  std::uint64_t lo = 0;
  std::uint64_t hi = 1;  // exclusive; kUnbounded for the top bin

  static constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

  std::uint64_t label() const { return lo; }
  bool open() const { return hi == kUnbounded; }
  bool contains(std::uint64_t c) const { return c >= lo && (open() || c < hi); }
  /// Largest summed family count a word in this bin may have before it is
  /// pruned from the candidate list. Infinite for the open top bin.
  std::uint64_t ceiling() const { return hi; }

  std::string name() const {
    if (lo == 0) return "0";
    if (open()) return "[" + std::to_string(lo) + ",inf)";
    return "[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
  }

  friend bool operator==(const FrequencyBin&, const FrequencyBin&) = default;
  friend auto operator<=>(const FrequencyBin& a, const FrequencyBin& b) { return a.lo <=> b.lo; }
};

/// Bins {0}, [2^0,2^1), ..., [2^(n-1),2^n), [2^n, inf). The default n = 9
/// gives the eleven labels 0,1,2,4,...,512.
class BinScheme {
 public:
  explicit BinScheme(int doublings = 9) : n_(doublings) {
    if (n_ < 1 || n_ > 62) throw ConfigError("bins.n must be in [1,62]");
  }

  int doublings() const { return n_; }

  template <std::integral T>
  FrequencyBin bin_of(T count) const {
    if constexpr (std::is_signed_v<T>) {
      if (count < 0) throw ContractViolation("bin_of: negative count");
    }
    const auto c = static_cast<std::uint64_t>(count);
    if (c == 0) return {0, 1};
    const std::uint64_t top = std::uint64_t{1} << n_;
    if (c >= top) return {top, FrequencyBin::kUnbounded};
    std::uint64_t lo = 1;
    while (lo * 2 <= c) lo *= 2;
    return {lo, lo * 2};
  }

  FrequencyBin from_label(std::uint64_t label) const {
    const auto b = bin_of(label);
    if (b.lo != label) throw InputError("not a bin label: " + std::to_string(label));
    return b;
  }

  std::vector<FrequencyBin> bins() const {
    std::vector<FrequencyBin> out{{0, 1}};
    for (int k = 0; k <= n_; ++k) out.push_back(bin_of(std::uint64_t{1} << k));
    return out;
  }

  std::uint64_t top_label() const { return std::uint64_t{1} << n_; }

 private:
  int n_;
};

}  // namespace ltswap
