// Dataset container, libsvm-format I/O and seeded train/test splitting.
//
// libsvm text format: one sample per line, "label index:value ...",
// whitespace separated, 1-based feature indices, absent indices read as 0.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "truncreg/rng.hpp"

namespace truncreg {

/// Where a dataset came from: noise family, its level, the seed, and which
/// rows received sparse output corruption (empty otherwise).
struct Provenance {
  std::string noise = "none";
  double level = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> corrupted_indices;
};

/// Row-major dense matrix: one sample per contiguous row, so per-sample
/// gradient evaluations stream cache-friendly memory.
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Design matrix X (one sample per row), targets y, optional ground truth.
struct Dataset {
  RowMajorMatrix X;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> w_star;
  Provenance provenance;

  int n() const { return static_cast<int>(X.rows()); }
  int dim() const { return static_cast<int>(X.cols()); }

  void require_consistent() const {
    if (X.rows() != y.size())
      throw std::invalid_argument("Dataset: row count of X must match length of y");
    if (w_star && w_star->size() != X.cols())
      throw std::invalid_argument("Dataset: w_star length must match feature dimension");
  }
};

struct LibsvmParseError : std::runtime_error {
  int line;
  explicit LibsvmParseError(int line_number, const std::string& what)
      : std::runtime_error("libsvm parse error at line " + std::to_string(line_number) +
                           ": " + what),
        line(line_number) {}
};

/// Parses libsvm text into a dense Dataset; d is the largest index seen.
inline Dataset parse_libsvm(std::istream& in) {
  std::vector<double> labels;
  std::vector<std::vector<std::pair<int, double>>> rows;
  int max_index = 0;

  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    // strip trailing comments, as written by some exporters
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line

    std::size_t used = 0;
    double label;
    try {
      label = std::stod(token, &used);
    } catch (const std::exception&) {
      throw LibsvmParseError(line_number, "bad label '" + token + "'");
    }
    if (used != token.size())
      throw LibsvmParseError(line_number, "bad label '" + token + "'");

    std::vector<std::pair<int, double>> row;
    while (ls >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
        throw LibsvmParseError(line_number, "bad feature '" + token + "'");
      int index;
      double value;
      try {
        index = std::stoi(token.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("trailing");
        value = std::stod(token.substr(colon + 1), &used);
        if (used != token.size() - colon - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw LibsvmParseError(line_number, "bad feature '" + token + "'");
      }
      if (index < 1) throw LibsvmParseError(line_number, "feature indices are 1-based");
      max_index = std::max(max_index, index);
      row.emplace_back(index, value);
    }
    labels.push_back(label);
    rows.push_back(std::move(row));
  }
  if (labels.empty()) throw LibsvmParseError(0, "empty input");

  Dataset data;
  data.X = RowMajorMatrix::Zero(static_cast<int>(labels.size()), max_index);
  data.y = Eigen::VectorXd(static_cast<int>(labels.size()));
  for (int i = 0; i < data.n(); ++i) {
    data.y[i] = labels[static_cast<std::size_t>(i)];
    for (const auto& [index, value] : rows[static_cast<std::size_t>(i)])
      data.X(i, index - 1) = value;
  }
  data.provenance.noise = "file";
  return data;
}

inline Dataset parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open libsvm file: " + path);
  return parse_libsvm(in);
}

/// Writes libsvm text (skips exact zeros; 17 significant digits so that a
/// write/parse round trip is lossless).
inline void write_libsvm(std::ostream& out, const Dataset& data) {
  data.require_consistent();
  char buffer[64];
  for (int i = 0; i < data.n(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.17g", data.y[i]);
    out << buffer;
    for (int j = 0; j < data.dim(); ++j) {
      if (data.X(i, j) == 0.0) continue;
      std::snprintf(buffer, sizeof buffer, "%.17g", data.X(i, j));
      out << ' ' << (j + 1) << ':' << buffer;
    }
    out << '\n';
  }
}

inline void write_libsvm_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_libsvm(out, data);
}

/// Seeded Fisher-Yates permutation of 0..n-1.
inline std::vector<int> random_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

inline Dataset subset(const Dataset& data, const std::vector<int>& indices) {
  Dataset out;
  out.X = RowMajorMatrix(static_cast<int>(indices.size()), data.dim());
  out.y = Eigen::VectorXd(static_cast<int>(indices.size()));
  for (int i = 0; i < static_cast<int>(indices.size()); ++i) {
    out.X.row(i) = data.X.row(indices[static_cast<std::size_t>(i)]);
    out.y[i] = data.y[indices[static_cast<std::size_t>(i)]];
  }
  out.w_star = data.w_star;
  out.provenance = data.provenance;
  out.provenance.corrupted_indices.clear();
  return out;
}

/// Disjoint, exhaustive, seed-reproducible split into (train, test).
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& data, int n_train,
                                                    std::uint64_t seed) {
  data.require_consistent();
  if (n_train < 1 || n_train >= data.n())
    throw std::invalid_argument("train_test_split: need 1 <= n_train < n");
  const auto perm = random_permutation(data.n(), seed);
  std::vector<int> train_idx(perm.begin(), perm.begin() + n_train);
  std::vector<int> test_idx(perm.begin() + n_train, perm.end());
  return {subset(data, train_idx), subset(data, test_idx)};
}

}  // namespace truncreg
