#pragma once

#include <cstddef>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flma/dataset.hpp"
#include "flma/detail/text.hpp"
#include "flma/errors.hpp"
#include "flma/matrix.hpp"

namespace flma {

namespace detail {

struct ParsedCsv {
  std::vector<std::string> header;  // empty when has_header is false
  Matrix<double> values;
};

inline ParsedCsv read_numeric_csv(const std::string& path, bool has_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);

  ParsedCsv out;
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (has_header && out.header.empty() && rows == 0) {
      for (auto c : cells) out.header.push_back(std::string(unquote(trim(c))));
      cols = out.header.size();
      continue;
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols)
      throw ParseError(path, line_no,
                       "expected " + std::to_string(cols) + " values, got " +
                           std::to_string(cells.size()));
    for (auto c : cells) {
      auto v = parse_double(trim(c));
      if (!v) throw ParseError(path, line_no, "invalid number '" + std::string(trim(c)) + "'");
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path, line_no, "no data rows");
  out.values = Matrix<double>(rows, cols, std::move(values));
  return out;
}

}  // namespace detail

// Dataset CSV: one header row, feature columns first, then `label_count`
// binary label columns at the end.
inline MultiLabelDataset load_csv(const std::string& path, int label_count) {
  if (label_count < 1) throw std::invalid_argument("load_csv: label_count must be positive");
  auto parsed = detail::read_numeric_csv(path, /*has_header=*/true);
  const std::size_t cols = parsed.values.cols();
  if (static_cast<std::size_t>(label_count) >= cols)
    throw ParseError(path +
                     ": label_count must leave at least one feature column (columns: " +
                     std::to_string(cols) + ")");
  const std::size_t d = cols - static_cast<std::size_t>(label_count);
  const std::size_t n = parsed.values.rows();

  Matrix<double> features(n, d);
  LabelMatrix labels(n, static_cast<std::size_t>(label_count));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) features(r, c) = parsed.values(r, c);
    for (std::size_t c = d; c < cols; ++c) {
      double v = parsed.values(r, c);
      if (v != 0.0 && v != 1.0)
        throw ParseError(path + ": non-binary value in label column '" + parsed.header[c] + "'");
      labels(r, c - d) = static_cast<std::uint8_t>(v);
    }
  }
  std::vector<std::string> names(parsed.header.begin() + static_cast<std::ptrdiff_t>(d),
                                 parsed.header.end());
  return MultiLabelDataset(std::move(features), std::move(labels), std::move(names));
}

struct ScoreCsv {
  std::vector<std::string> label_names;  // empty when the file had no header
  ScoreMatrix scores;
};

inline ScoreCsv read_score_csv(const std::string& path, bool has_header = true) {
  auto parsed = detail::read_numeric_csv(path, has_header);
  return {std::move(parsed.header), std::move(parsed.values)};
}

// Score matrix for an externally produced classifier. Values must lie in
// [0, 1] and the column count must match the expected label count.
inline ScoreMatrix load_external_scores(const std::string& path, std::size_t expected_labels,
                                        bool has_header = true) {
  auto parsed = detail::read_numeric_csv(path, has_header);
  if (parsed.values.cols() != expected_labels)
    throw LabelMismatchError(path + ": expected " + std::to_string(expected_labels) +
                             " score columns, got " + std::to_string(parsed.values.cols()));
  for (double v : parsed.values.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw ParseError(path + ": score outside [0, 1]: " + detail::format_double(v));
  return std::move(parsed.values);
}

inline void write_score_csv(std::ostream& os, const ScoreMatrix& scores,
                            std::span<const std::string> label_names) {
  if (!label_names.empty()) {
    if (label_names.size() != scores.cols())
      throw std::invalid_argument("write_score_csv: header width does not match matrix");
    for (std::size_t c = 0; c < label_names.size(); ++c)
      os << (c ? "," : "") << label_names[c];
    os << '\n';
  }
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t c = 0; c < scores.cols(); ++c)
      os << (c ? "," : "") << detail::format_double(scores(r, c));
    os << '\n';
  }
}

inline void write_score_csv_file(const std::string& path, const ScoreMatrix& scores,
                                 std::span<const std::string> label_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  write_score_csv(out, scores, label_names);
}

struct BinaryCsv {
  std::vector<std::string> label_names;
  LabelMatrix labels;
};

inline BinaryCsv read_binary_csv(const std::string& path, bool has_header = true) {
  auto parsed = detail::read_numeric_csv(path, has_header);
  LabelMatrix labels(parsed.values.rows(), parsed.values.cols());
  for (std::size_t r = 0; r < labels.rows(); ++r)
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      double v = parsed.values(r, c);
      if (v != 0.0 && v != 1.0) throw ParseError(path + ": matrix is not binary");
      labels(r, c) = static_cast<std::uint8_t>(v);
    }
  return {std::move(parsed.header), std::move(labels)};
}

inline void write_label_csv(std::ostream& os, const LabelMatrix& labels,
                            std::span<const std::string> label_names) {
  if (!label_names.empty()) {
    if (label_names.size() != labels.cols())
      throw std::invalid_argument("write_label_csv: header width does not match matrix");
    for (std::size_t c = 0; c < label_names.size(); ++c)
      os << (c ? "," : "") << label_names[c];
    os << '\n';
  }
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c)
      os << (c ? "," : "") << static_cast<int>(labels(r, c));
    os << '\n';
  }
}

inline void write_label_csv_file(const std::string& path, const LabelMatrix& labels,
                                 std::span<const std::string> label_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  write_label_csv(out, labels, label_names);
}

}  // namespace flma
