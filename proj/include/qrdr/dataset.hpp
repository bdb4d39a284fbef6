// Copyright 2026 The QRDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qrdr/errors.hpp"
#include "qrdr/rng.hpp"
#include "qrdr/tensor.hpp"

namespace qrdr {

/// Feature matrix (one sample per row) with +/-1 labels.
struct LabeledDataset {
  RMatrix x;
  std::vector<int> labels;
  std::vector<std::string> names;

  Index samples() const noexcept { return x.rows(); }
  Index features() const noexcept { return x.cols(); }

  void validate() const {
    if (static_cast<std::size_t>(x.rows()) != labels.size()) {
      throw DimensionError("dataset: " + std::to_string(x.rows()) + " rows but " +
                           std::to_string(labels.size()) + " labels");
    }
    for (int y : labels) {
      if (y != 1 && y != -1) throw ValidationError("dataset: label must be +1 or -1");
    }
    if (!names.empty() && names.size() != labels.size()) {
      throw DimensionError("dataset: name count does not match sample count");
    }
  }

  LabeledDataset subset(const std::vector<std::size_t>& rows) const {
    LabeledDataset out;
    out.x.resize(static_cast<Index>(rows.size()), x.cols());
    out.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.x.row(static_cast<Index>(r)) = x.row(static_cast<Index>(rows[r]));
      out.labels.push_back(labels[rows[r]]);
      if (!names.empty()) out.names.push_back(names[rows[r]]);
    }
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, std::size_t line, std::size_t column) {
  field = trim(field);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
    throw ParseError(line, "field " + std::to_string(column) + " is not numeric: '" +
                               std::string(field) + "'");
  }
  return value;
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace detail

inline constexpr int kSonarFeatures = 60;

/// Reads the UCI "sonar.all-data" layout: 60 comma-separated reals then M
/// (mine, +1) or R (rock, -1). Blank lines are skipped. A different feature
/// count is accepted only when every row agrees with the first one.
inline LabeledDataset parse_sonar(std::istream& in, int expected_features = kSonarFeatures) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      fields.push_back(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (expected_features > 0 && static_cast<int>(fields.size()) != expected_features + 1) {
      throw ParseError(line_no, "expected " + std::to_string(expected_features + 1) +
                                    " fields, found " + std::to_string(fields.size()));
    }
    if (fields.size() < 2) throw ParseError(line_no, "row has no features");
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t f = 0; f + 1 < fields.size(); ++f) {
      row.push_back(detail::parse_double(fields[f], line_no, f + 1));
    }
    const std::string_view tag = detail::trim(fields.back());
    if (tag == "M") {
      labels.push_back(+1);
    } else if (tag == "R") {
      labels.push_back(-1);
    } else {
      throw ParseError(line_no, "unknown label '" + std::string(tag) + "' (expected M or R)");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(line_no, "inconsistent feature count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no, "empty dataset");

  LabeledDataset ds;
  ds.x.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      ds.x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

inline LabeledDataset load_sonar(const std::string& path, int expected_features = kSonarFeatures) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_sonar(in, expected_features);
}

/// Writes the same layout back; values use shortest round-trip formatting so
/// a reload reproduces every double bit-for-bit.
inline void write_sonar(const LabeledDataset& ds, std::ostream& out) {
  ds.validate();
  for (Index i = 0; i < ds.samples(); ++i) {
    for (Index j = 0; j < ds.features(); ++j) out << detail::format_double(ds.x(i, j)) << ',';
    out << (ds.labels[static_cast<std::size_t>(i)] > 0 ? 'M' : 'R') << '\n';
  }
}

inline void write_sonar(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_sonar(ds, out);
  if (!out) throw Error("write failed for '" + path + "'");
}

/// Sample index -> fold id. Unstratified: folds come from a seeded shuffle of
/// indices only.
struct FoldPlan {
  std::vector<int> assignment;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> fold(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == f) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> complement(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != f) out.push_back(i);
    }
    return out;
  }

  bool operator==(const FoldPlan&) const = default;
};

inline FoldPlan kfold_split(std::size_t samples, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<std::size_t>(k) > samples) {
    throw ValidationError("kfold_split: k must lie in [2, " + std::to_string(samples) +
                          "], got " + std::to_string(k));
  }
  CounterRng rng(seed, /*stream=*/0x6b666f6c64ULL);
  const auto order = permutation(samples, rng);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignment.assign(samples, 0);
  for (std::size_t p = 0; p < samples; ++p) {
    plan.assignment[order[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
  }
  return plan;
}

inline FoldPlan kfold_split(const LabeledDataset& ds, int k, std::uint64_t seed) {
  return kfold_split(static_cast<std::size_t>(ds.samples()), k, seed);
}

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Disjoint train/test index sets, each sorted ascending.
inline HoldoutSplit holdout_split(std::size_t samples, std::size_t test_count,
                                  std::uint64_t seed) {
  if (test_count == 0 || test_count >= samples) {
    throw ValidationError("holdout_split: test count must lie in [1, " +
                          std::to_string(samples - 1) + "], got " + std::to_string(test_count));
  }
  CounterRng rng(seed, /*stream=*/0x686f6c64ULL);
  auto order = permutation(samples, rng);
  HoldoutSplit split;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_count));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_count), order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

inline HoldoutSplit holdout_split(const LabeledDataset& ds, std::size_t test_count,
                                  std::uint64_t seed) {
  return holdout_split(static_cast<std::size_t>(ds.samples()), test_count, seed);
}

}  // namespace qrdr
