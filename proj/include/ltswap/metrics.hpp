#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "ltswap/error.hpp"
#include "ltswap/quadruplet.hpp"
#include "ltswap/scoring.hpp"

namespace ltswap {

struct Cell {
  std::size_t correct = 0;
  std::size_t n = 0;
  double accuracy = 0.0;
  double se = 0.0;

  static Cell of(std::size_t correct, std::size_t n) {
    if (n == 0 || correct > n) throw ContractViolation("Cell: need 0 <= correct <= n, n > 0");
    Cell c;
    c.correct = correct;
    c.n = n;
    c.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    c.se = std::sqrt(c.accuracy * (1.0 - c.accuracy) / static_cast<double>(n));
    return c;
  }
};

struct CellKey {
  std::string model;
  std::string group;  // subtask name, or a finer label such as AS-LONG
  std::uint64_t bin = 0;
  auto operator<=>(const CellKey&) const = default;
};

class ScoreMatrix {
 public:
  void set(const CellKey& k, std::size_t correct, std::size_t n) { cells_[k] = Cell::of(correct, n); }

  void add(const CellKey& k, bool correct) {
    auto& c = cells_[k];
    c = Cell::of(c.correct + (correct ? 1 : 0), c.n + 1);
  }

  const std::map<CellKey, Cell>& cells() const { return cells_; }
  bool empty() const { return cells_.empty(); }

  std::optional<Cell> get(const std::string& model, const std::string& group, std::uint64_t bin) const {
    const auto it = cells_.find({model, group, bin});
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }

  std::set<std::string> models() const {
    std::set<std::string> out;
    for (const auto& [k, c] : cells_) out.insert(k.model);
    return out;
  }

  std::set<std::string> groups() const {
    std::set<std::string> out;
    for (const auto& [k, c] : cells_) out.insert(k.group);
    return out;
  }

  /// bin -> accuracy for one (model, group).
  std::map<std::uint64_t, double> curve(const std::string& model, const std::string& group) const {
    std::map<std::uint64_t, double> out;
    for (const auto& [k, c] : cells_)
      if (k.model == model && k.group == group) out[k.bin] = c.accuracy;
    return out;
  }

  friend bool operator==(const ScoreMatrix& a, const ScoreMatrix& b) {
    if (a.cells_.size() != b.cells_.size()) return false;
    for (auto i = a.cells_.begin(), j = b.cells_.begin(); i != a.cells_.end(); ++i, ++j)
      if (!(i->first == j->first) || i->second.correct != j->second.correct || i->second.n != j->second.n) return false;
    return true;
  }

 private:
  std::map<CellKey, Cell> cells_;
};

using GroupFn = std::function<std::string(const Quadruplet&)>;

inline std::string subtask_group(const Quadruplet& q) { return std::string(to_string(q.subtask)); }

/// Adds one count per verdict to the cell of its quadruplet. WordSwap
/// verdicts never land in bin 0.
inline void tally(ScoreMatrix& m, const std::string& model, const std::vector<QuadrupletVerdict>& verdicts,
                  const std::map<std::string, const Quadruplet*>& quads, const GroupFn& group = subtask_group) {
  for (const auto& v : verdicts) {
    const auto it = quads.find(v.quadruplet_id);
    if (it == quads.end()) throw InputError("verdict for unknown quadruplet " + v.quadruplet_id);
    const auto& q = *it->second;
    if (q.subtask == Subtask::WordSwap && q.bin.label() == 0)
      throw ContractViolation("WordSwap quadruplet " + q.id + " in bin 0");
    m.add({model, group(q), q.bin.label()}, v.correct);
  }
}

inline std::map<std::string, const Quadruplet*> by_id(const std::vector<Quadruplet>& quads) {
  std::map<std::string, const Quadruplet*> out;
  for (const auto& q : quads) out[q.id] = &q;
  return out;
}

inline const std::vector<std::string>& subtask_groups() {
  static const std::vector<std::string> g{"WORDSWAP", "INFLECTIONSWAP", "AGREEMENTSWAP"};
  return g;
}

/// Unweighted mean of every present (subtask, bin) cell of `model`.
inline double aggregate_ltswap(const ScoreMatrix& m, const std::string& model) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [k, c] : m.cells())
    if (k.model == model && std::find(subtask_groups().begin(), subtask_groups().end(), k.group) != subtask_groups().end()) {
      sum += c.accuracy;
      ++n;
    }
  if (n == 0) throw Error("aggregate_ltswap: no cells for model '" + model + "'");
  return sum / static_cast<double>(n);
}

using Curve = std::map<std::uint64_t, double>;

/// Per bin, the mean of the subtask accuracies present at that bin.
inline Curve combined_curve(const ScoreMatrix& m, const std::string& model) {
  std::map<std::uint64_t, std::pair<double, int>> acc;
  for (const auto& g : subtask_groups())
    for (const auto& [bin, a] : m.curve(model, g)) {
      acc[bin].first += a;
      acc[bin].second += 1;
    }
  Curve out;
  for (const auto& [bin, p] : acc) out[bin] = p.first / p.second;
  return out;
}

// ---- rank statistics -------------------------------------------------------

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = rank;
    i = j + 1;
  }
  return r;
}

inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;
  bool undefined = false;  // a constant input; rho reported as 0
  bool exact = false;      // p from full permutation enumeration
};

inline double spearman_t_pvalue(double rho, std::size_t n) {
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

/// Two-sided permutation p: share of orderings of y whose |rho| is at least
/// the observed one. Only for n <= 8.
inline double spearman_exact_pvalue(std::span<const double> x, std::span<const double> y, double rho) {
  if (x.size() > 8) throw ContractViolation("exact Spearman p is limited to n <= 8");
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  std::sort(ry.begin(), ry.end());
  std::size_t hits = 0, total = 0;
  do {
    const auto r = pearson(rx, ry);
    if (r && std::abs(*r) >= std::abs(rho) - 1e-12) ++hits;
    ++total;
  } while (std::next_permutation(ry.begin(), ry.end()));
  // next_permutation skips duplicate orderings of tied ranks; each distinct
  // ordering stands for the same number of raw permutations, so the ratio
  // is unchanged.
  return static_cast<double>(hits) / static_cast<double>(total);
}

inline SpearmanResult spearman(std::span<const double> x, std::span<const double> y, bool exact_p = false) {
  if (x.size() != y.size()) throw ContractViolation("spearman: length mismatch");
  if (x.size() < 3) throw ContractViolation("spearman: need at least 3 points");
  SpearmanResult r;
  const auto rho = pearson(average_ranks(x), average_ranks(y));
  if (!rho) {
    r.undefined = true;
    return r;
  }
  r.rho = *rho;
  if (exact_p) {
    r.p = spearman_exact_pvalue(x, y, r.rho);
    r.exact = true;
  } else {
    r.p = spearman_t_pvalue(r.rho, x.size());
  }
  return r;
}

inline SpearmanResult spearman(const Curve& c, bool exact_p = false) {
  std::vector<double> x, y;
  for (const auto& [bin, a] : c) {
    x.push_back(static_cast<double>(bin));
    y.push_back(a);
  }
  return spearman(x, y, exact_p);
}

// ---- cross-model statistics ------------------------------------------------

/// Rarest bin used for drop and spread: bin 1 for WordSwap (which has no
/// bin 0), bin 0 for everything else.
inline std::uint64_t rarest_bin(const std::string& group) { return group == "WORDSWAP" ? 1 : 0; }

/// Mean over models of acc(rarest) - acc(top).
inline double accuracy_drop(const std::map<std::string, Curve>& curves, std::uint64_t rarest, std::uint64_t top) {
  if (curves.empty()) throw Error("accuracy_drop: no models");
  double sum = 0.0;
  for (const auto& [model, c] : curves) {
    const auto lo = c.find(rarest), hi = c.find(top);
    if (lo == c.end() || hi == c.end())
      throw Error("accuracy_drop: model '" + model + "' lacks bin " + std::to_string(lo == c.end() ? rarest : top));
    sum += lo->second - hi->second;
  }
  return sum / static_cast<double>(curves.size());
}

/// (max - min across models at the rarest bin) / (max - min at the top bin).
/// Empty when the top-bin spread is zero.
inline std::optional<double> spread_ratio(const std::map<std::string, Curve>& curves, std::uint64_t rarest,
                                          std::uint64_t top) {
  if (curves.size() < 2) throw Error("spread_ratio: need at least 2 models");
  auto spread = [&](std::uint64_t bin) {
    double lo = 1e300, hi = -1e300;
    for (const auto& [model, c] : curves) {
      const auto it = c.find(bin);
      if (it == c.end()) throw Error("spread_ratio: model '" + model + "' lacks bin " + std::to_string(bin));
      lo = std::min(lo, it->second);
      hi = std::max(hi, it->second);
    }
    return hi - lo;
  };
  const double num = spread(rarest), den = spread(top);
  if (den == 0.0) return std::nullopt;
  return num / den;
}

inline std::map<std::string, Curve> curves_for(const ScoreMatrix& m, const std::string& group) {
  std::map<std::string, Curve> out;
  for (const auto& model : m.models()) {
    auto c = group == "COMBINED" ? combined_curve(m, model) : m.curve(model, group);
    if (!c.empty()) out[model] = std::move(c);
  }
  return out;
}

// ---- prefix experiment -----------------------------------------------------

struct PrefixDelta {
  std::map<std::uint64_t, std::pair<Cell, Cell>> bins;  // baseline, prefixed
  double mean_low_bins = 0.0;                           // mean delta over bins 1, 2, 4 present
  std::size_t low_bins_present = 0;

  double delta(std::uint64_t bin) const {
    const auto& [b, p] = bins.at(bin);
    return p.accuracy - b.accuracy;
  }
};

/// Per-bin accuracy change between two QUAD runs over the same WordSwap set.
inline PrefixDelta prefix_delta(const std::vector<Quadruplet>& quads, const std::vector<QuadrupletVerdict>& baseline,
                                const std::vector<QuadrupletVerdict>& prefixed) {
  const auto ids = by_id(quads);
  ScoreMatrix m;
  tally(m, "baseline", baseline, ids);
  tally(m, "prefixed", prefixed, ids);
  PrefixDelta d;
  for (const auto& [k, c] : m.cells()) {
    if (k.model != "baseline" || k.group != "WORDSWAP") continue;
    const auto p = m.get("prefixed", k.group, k.bin);
    if (!p) continue;
    d.bins[k.bin] = {c, *p};
  }
  double sum = 0.0;
  for (std::uint64_t b : {1, 2, 4})
    if (d.bins.count(b)) {
      sum += d.delta(b);
      ++d.low_bins_present;
    }
  if (d.low_bins_present) d.mean_low_bins = sum / static_cast<double>(d.low_bins_present);
  return d;
}

}  // namespace ltswap
