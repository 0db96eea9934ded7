#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mbg/errors.hpp"

namespace mbg::harness {

// One checkpoint of one trial.
struct TrajectoryRecord {
  int trial = 0;
  long t = 0;
  double dist_sq_played = 0;  // sum_i ||played_i - x*_i||^2
  double dist_sq_pivot = 0;   // sum_i ||pivot_i - x*_i||^2
  long warnings = 0;          // cumulative step-size safety violations

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

// Geometric checkpoint grid: every t = ceil(ratio^k) up to the horizon, plus
// the horizon itself.
inline std::vector<long> checkpoint_rounds(long horizon, double ratio = 1.25) {
  std::vector<long> out;
  double v = 1.0;
  while (true) {
    const long t = static_cast<long>(std::ceil(v));
    if (t > horizon) break;
    if (out.empty() || out.back() != t) out.push_back(t);
    v *= ratio;
  }
  if (out.empty() || out.back() != horizon) out.push_back(horizon);
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_records_csv(std::ostream& os,
                              const std::vector<TrajectoryRecord>& records) {
  os << "trial,t,dist_sq_played,dist_sq_pivot,warnings\n";
  for (const auto& r : records)
    os << r.trial << ',' << r.t << ',' << format_double(r.dist_sq_played) << ','
       << format_double(r.dist_sq_pivot) << ',' << r.warnings << '\n';
}

inline std::vector<TrajectoryRecord> read_records_csv(std::istream& is) {
  std::vector<TrajectoryRecord> out;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "trial,t,dist_sq_played,dist_sq_pivot,warnings")
        throw ParseError("records csv: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    TrajectoryRecord r;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    if (!(ls >> r.trial >> r.t >> r.dist_sq_played >> r.dist_sq_pivot >>
          r.warnings))
      throw ParseError("records csv line " + std::to_string(line_no) +
                       ": malformed row");
    out.push_back(r);
  }
  return out;
}

// Least-squares slope of log(mean dist_sq_played over trials) against log t,
// restricted to the tail half of the checkpoint grid. Requires at least 10
// checkpoints spanning two decades.
inline double fit_rate(const std::vector<TrajectoryRecord>& records) {
  std::map<long, std::pair<double, int>> by_t;  // t -> (sum, count)
  for (const auto& r : records) {
    auto& acc = by_t[r.t];
    acc.first += r.dist_sq_played;
    acc.second += 1;
  }
  if (by_t.size() < 10)
    throw InsufficientDataError("fit_rate: need at least 10 checkpoints");
  const long t_min = by_t.begin()->first;
  const long t_max = by_t.rbegin()->first;
  if (t_max < 100 * t_min)
    throw InsufficientDataError("fit_rate: checkpoints must span two decades");

  std::vector<std::pair<double, double>> pts;  // (log t, log mean)
  std::size_t idx = 0;
  const std::size_t start = by_t.size() / 2;
  for (const auto& [t, acc] : by_t) {
    if (idx++ < start) continue;
    const double mean = acc.first / acc.second;
    if (mean > 0) pts.emplace_back(std::log(static_cast<double>(t)), std::log(mean));
  }
  if (pts.size() < 2)
    throw InsufficientDataError("fit_rate: tail has fewer than 2 usable points");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation (0 for a single observation).
inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// Mean +/- std tables in the layout of the benchmark tables: one row per
// parameter tuple, one column per algorithm.
// ---------------------------------------------------------------------------
struct TableCell {
  std::string key;        // e.g. "(10, 10, 0.05)"
  std::string algorithm;  // "fkm" | "barrier"
  std::vector<double> final_dists;
  long horizon = 0;
  int trials = 0;
};

struct TableRow {
  std::string key;
  std::map<std::string, std::pair<double, double>> columns;  // algo -> (mean, std)
};

struct Table {
  std::vector<TableRow> rows;
  std::vector<std::string> algorithms;

  std::string to_text() const {
    std::ostringstream os;
    os << "params";
    for (const auto& a : algorithms) os << '\t' << a;
    os << '\n';
    for (const auto& row : rows) {
      os << row.key;
      for (const auto& a : algorithms) {
        os << '\t';
        auto it = row.columns.find(a);
        if (it == row.columns.end()) {
          os << '-';
        } else {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.1e ± %.1e", it->second.first,
                        it->second.second);
          os << buf;
        }
      }
      os << '\n';
    }
    return os.str();
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "params";
    for (const auto& a : algorithms) os << ',' << a << "_mean," << a << "_std";
    os << '\n';
    for (const auto& row : rows) {
      os << '"' << row.key << '"';
      for (const auto& a : algorithms) {
        auto it = row.columns.find(a);
        if (it == row.columns.end())
          os << ",,";
        else
          os << ',' << format_double(it->second.first) << ','
             << format_double(it->second.second);
      }
      os << '\n';
    }
    return os.str();
  }
};

inline Table aggregate_table(const std::vector<TableCell>& cells) {
  if (cells.empty()) throw MissingCellError("aggregate_table: no cells");
  for (const auto& c : cells) {
    if (c.final_dists.empty())
      throw MissingCellError("aggregate_table: cell '" + c.key + "' is empty");
    if (c.horizon != cells.front().horizon || c.trials != cells.front().trials)
      throw MissingCellError(
          "aggregate_table: cells ran with different horizon/trials");
  }
  Table table;
  for (const auto& c : cells) {
    if (std::find(table.algorithms.begin(), table.algorithms.end(),
                  c.algorithm) == table.algorithms.end())
      table.algorithms.push_back(c.algorithm);
    auto it = std::find_if(table.rows.begin(), table.rows.end(),
                           [&](const TableRow& r) { return r.key == c.key; });
    if (it == table.rows.end()) {
      table.rows.push_back({c.key, {}});
      it = table.rows.end() - 1;
    }
    it->columns[c.algorithm] = {mean_of(c.final_dists), sample_std(c.final_dists)};
  }
  return table;
}

}  // namespace mbg::harness
