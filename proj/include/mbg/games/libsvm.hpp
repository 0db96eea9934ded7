#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "mbg/errors.hpp"

namespace mbg::games {

// Dense sample matrix with +1/-1 labels.
struct Dataset {
  Eigen::MatrixXd features;  // m x n
  Eigen::VectorXd labels;    // m

  int m() const { return static_cast<int>(features.rows()); }
  int n() const { return static_cast<int>(features.cols()); }

  int positives() const { return static_cast<int>((labels.array() > 0).count()); }
  int negatives() const { return static_cast<int>((labels.array() < 0).count()); }
};

struct LibsvmOptions {
  // When > 0, fixes the feature dimension; indices beyond it are errors.
  int configured_dim = 0;
  // Raw label values mapped to +1; everything in negative_labels maps to -1.
  std::vector<double> positive_labels = {1.0};
  std::vector<double> negative_labels = {-1.0, 0.0, 2.0};
};

// LIBSVM text format: one sample per line, "label idx:val idx:val ...",
// 1-based indices. Malformed tokens report the offending line number.
inline Dataset parse_libsvm(std::istream& in, const LibsvmOptions& opt = {}) {
  struct Entry {
    int index;
    double value;
  };
  std::vector<double> labels;
  std::vector<std::vector<Entry>> rows;
  int max_index = 0;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments and blank lines.
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::istringstream ls(line);
    std::string label_tok;
    if (!(ls >> label_tok)) continue;

    double raw = 0;
    try {
      std::size_t used = 0;
      raw = std::stod(label_tok, &used);
      if (used != label_tok.size()) throw std::invalid_argument(label_tok);
    } catch (const std::exception&) {
      throw ParseError("libsvm line " + std::to_string(line_no) +
                       ": bad label token '" + label_tok + "'");
    }
    double mapped = 0;
    for (double v : opt.positive_labels)
      if (raw == v) mapped = 1.0;
    for (double v : opt.negative_labels)
      if (raw == v) mapped = -1.0;
    if (mapped == 0)
      throw ParseError("libsvm line " + std::to_string(line_no) +
                       ": unmapped label value " + label_tok);

    std::vector<Entry> row;
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("libsvm line " + std::to_string(line_no) +
                         ": bad feature token '" + tok + "'");
      int idx = 0;
      double val = 0;
      try {
        std::size_t used = 0;
        idx = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        val = std::stod(tok.substr(colon + 1), &used);
        if (used != tok.size() - colon - 1) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("libsvm line " + std::to_string(line_no) +
                         ": bad feature token '" + tok + "'");
      }
      if (idx < 1)
        throw ParseError("libsvm line " + std::to_string(line_no) +
                         ": indices are 1-based, got " + std::to_string(idx));
      if (opt.configured_dim > 0 && idx > opt.configured_dim)
        throw DimensionError("libsvm line " + std::to_string(line_no) +
                             ": index " + std::to_string(idx) +
                             " exceeds configured dimension " +
                             std::to_string(opt.configured_dim));
      max_index = std::max(max_index, idx);
      row.push_back({idx, val});
    }
    labels.push_back(mapped);
    rows.push_back(std::move(row));
  }

  const int m = static_cast<int>(rows.size());
  const int n = opt.configured_dim > 0 ? opt.configured_dim : max_index;
  Dataset data;
  data.features = Eigen::MatrixXd::Zero(m, n);
  data.labels = Eigen::VectorXd(m);
  for (int j = 0; j < m; ++j) {
    data.labels[j] = labels[j];
    for (const auto& e : rows[j]) data.features(j, e.index - 1) = e.value;
  }
  return data;
}

inline Dataset load_libsvm(const std::string& path, const LibsvmOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("libsvm: cannot open '" + path + "'");
  return parse_libsvm(in, opt);
}

}  // namespace mbg::games
