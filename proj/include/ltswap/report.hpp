#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ltswap/bins.hpp"
#include "ltswap/io.hpp"
#include "ltswap/metrics.hpp"
#include "ltswap/quadruplet.hpp"

namespace ltswap {

inline const std::vector<std::string>& count_columns() {
  static const std::vector<std::string> c{"WS-VERB", "WS-NOUN", "IS-VERB", "IS-NOUN", "AG-LONG", "AG-SHORT"};
  return c;
}

/// Count column of a quadruplet; empty for POS outside the table.
inline std::string count_column(const Quadruplet& q) {
  switch (q.subtask) {
    case Subtask::WordSwap:
    case Subtask::InflectionSwap: {
      const std::string p = q.subtask == Subtask::WordSwap ? "WS-" : "IS-";
      return p + std::string(coarse(q.pos));
    }
    case Subtask::AgreementSwap: return q.distance == Distance::Long ? "AG-LONG" : "AG-SHORT";
  }
  return {};
}

/// bin -> column -> number of quadruplets.
inline std::map<std::uint64_t, std::map<std::string, std::size_t>> pair_counts(const std::vector<Quadruplet>& quads,
                                                                               const BinScheme& bins) {
  std::map<std::uint64_t, std::map<std::string, std::size_t>> out;
  for (const auto& b : bins.bins())
    for (const auto& c : count_columns()) out[b.label()][c] = 0;
  for (const auto& q : quads) ++out[q.bin.label()][count_column(q)];
  return out;
}

inline std::string counts_csv(const std::vector<Quadruplet>& quads, const BinScheme& bins) {
  std::vector<std::string> header{"bin"};
  header.insert(header.end(), count_columns().begin(), count_columns().end());
  std::string out = io::csv_row(header);
  for (const auto& [bin, cols] : pair_counts(quads, bins)) {
    std::vector<std::string> row{std::to_string(bin)};
    for (const auto& c : count_columns())
      row.push_back(bin == 0 && c.rfind("WS-", 0) == 0 ? "NA" : std::to_string(cols.at(c)));
    out += io::csv_row(row);
  }
  return out;
}

inline std::string matrix_csv(const ScoreMatrix& m) {
  std::string out = io::csv_row({"model", "group", "bin", "correct", "n", "accuracy", "se"});
  for (const auto& [k, c] : m.cells())
    out += io::csv_row({k.model, k.group, std::to_string(k.bin), std::to_string(c.correct), std::to_string(c.n),
                        io::format_double(c.accuracy), io::format_double(c.se)});
  return out;
}

inline ScoreMatrix load_matrix_csv(const std::string& text) {
  const auto rows = io::parse_csv(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"model", "group", "bin", "correct", "n", "accuracy", "se"})
    throw InputError("matrix.csv: unexpected header", 1);
  ScoreMatrix m;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 7) throw InputError("matrix.csv: expected 7 fields", i + 1);
    try {
      m.set({r[0], r[1], std::stoull(r[2])}, std::stoull(r[3]), std::stoull(r[4]));
    } catch (const std::logic_error&) {
      throw InputError("matrix.csv: bad number", i + 1);
    }
  }
  return m;
}

inline std::string curves_csv(const ScoreMatrix& m) {
  std::string out = io::csv_row({"model", "group", "x", "y", "se"});
  for (const auto& [k, c] : m.cells())
    out += io::csv_row({k.model, k.group, std::to_string(k.bin), io::format_double(c.accuracy), io::format_double(c.se)});
  for (const auto& model : m.models())
    for (const auto& [bin, a] : combined_curve(m, model))
      out += io::csv_row({model, "COMBINED", std::to_string(bin), io::format_double(a), ""});
  return out;
}

inline io::json optional_number(const std::optional<double>& v) { return v ? io::json(*v) : io::json(nullptr); }

/// Summary statistics per model and across models.
inline io::json summary_json(const ScoreMatrix& m, const BinScheme& bins) {
  io::json j;
  const auto top = bins.top_label();
  std::vector<std::string> groups = subtask_groups();
  groups.push_back("COMBINED");

  io::json models = io::json::object();
  std::map<std::string, std::pair<double, int>> rho_sum;
  for (const auto& model : m.models()) {
    io::json e;
    bool any = false;
    for (const auto& g : subtask_groups())
      any = any || !m.curve(model, g).empty();
    e["ltswap_score"] = any ? io::json(aggregate_ltswap(m, model)) : io::json(nullptr);
    io::json sp = io::json::object();
    for (const auto& g : groups) {
      const auto c = g == "COMBINED" ? combined_curve(m, model) : m.curve(model, g);
      if (c.size() < 3) continue;
      const auto r = spearman(c);
      sp[g] = {{"rho", r.rho}, {"p", r.p}, {"undefined", r.undefined}};
      if (!r.undefined) {
        rho_sum[g].first += r.rho;
        rho_sum[g].second += 1;
      }
    }
    e["spearman"] = std::move(sp);
    models[model] = std::move(e);
  }
  j["models"] = std::move(models);

  io::json avg = io::json::object();
  for (const auto& [g, s] : rho_sum) avg[g] = s.first / s.second;
  j["spearman_average"] = std::move(avg);

  io::json drop = io::json::object(), spread = io::json::object();
  for (const auto& g : groups) {
    const auto curves = curves_for(m, g);
    const auto rare = rarest_bin(g);
    try {
      drop[g] = accuracy_drop(curves, rare, top);
    } catch (const Error&) {
      drop[g] = nullptr;
    }
    try {
      const auto r = spread_ratio(curves, rare, top);
      spread[g] = {{"value", optional_number(r)}, {"undefined", !r.has_value()}};
    } catch (const Error&) {
      spread[g] = {{"value", nullptr}, {"undefined", true}};
    }
  }
  j["accuracy_drop"] = std::move(drop);
  j["spread_ratio"] = std::move(spread);
  j["metadata"] = {{"rarest_bin", {{"WORDSWAP", 1}, {"INFLECTIONSWAP", 0}, {"AGREEMENTSWAP", 0}, {"COMBINED", 0}}},
                   {"top_bin", top},
                   {"rarest_bin_note", "bin 1 for WORDSWAP (no bin-0 cell), bin 0 for the other subtasks and the "
                                       "combined curve; a choice of this implementation"},
                   {"spearman_x", "bin labels ascending (rare to frequent)"}};
  return j;
}

/// AgreementSwap accuracy split by distance.
inline ScoreMatrix distance_matrix(const std::string& model, const std::vector<QuadrupletVerdict>& verdicts,
                                   const std::vector<Quadruplet>& quads) {
  std::vector<QuadrupletVerdict> as;
  const auto ids = by_id(quads);
  for (const auto& v : verdicts) {
    const auto it = ids.find(v.quadruplet_id);
    if (it != ids.end() && it->second->subtask == Subtask::AgreementSwap) as.push_back(v);
  }
  ScoreMatrix m;
  tally(m, model, as, ids, [](const Quadruplet& q) { return q.distance == Distance::Long ? "AS-LONG" : "AS-SHORT"; });
  return m;
}

struct ReportInputs {
  ScoreMatrix matrix;
  std::vector<Quadruplet> quadruplets;  // the evaluated (kept) set, for counts
  std::optional<ScoreMatrix> distance;
};

inline void emit_report(const std::filesystem::path& dir, const ReportInputs& in, const BinScheme& bins,
                        io::json extra = io::json::object()) {
  std::filesystem::create_directories(dir);
  auto summary = summary_json(in.matrix, bins);
  for (auto it = extra.begin(); it != extra.end(); ++it) summary[it.key()] = it.value();
  io::write_atomic(dir / "report.json", summary.dump(2) + "\n");
  io::write_atomic(dir / "matrix.csv", matrix_csv(in.matrix));
  io::write_atomic(dir / "curves.csv", curves_csv(in.matrix));
  io::write_atomic(dir / "counts.csv", counts_csv(in.quadruplets, bins));
  if (in.distance) io::write_atomic(dir / "agreement_distance.csv", matrix_csv(*in.distance));
}

}  // namespace ltswap
