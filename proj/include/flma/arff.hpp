#pragma once

// Loader for Mulan-style multi-label datasets: a dense ARFF file plus an XML
// file listing which attributes are labels.
//
// Supported ARFF subset:
//   - @relation, @attribute, @data (case-insensitive), '%' comments
//   - attribute names bare or quoted with ' or "
//   - numeric/real/integer attributes and nominal {v1,v2,...} attributes
//   - '?' feature values, imputed with the per-column mean
// Label attributes must be nominal over {0,1} (declared in any order); a '?'
// or any other value in a label column is an error. Sparse data rows are not
// supported.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "flma/dataset.hpp"
#include "flma/detail/text.hpp"
#include "flma/errors.hpp"

namespace flma {

namespace detail {

struct ArffAttribute {
  std::string name;
  bool numeric = true;
  std::vector<std::string> nominal_values;  // declaration order
  std::size_t line = 0;
};

// Splits a data row on commas, honouring quotes.
inline std::vector<std::string> split_arff_row(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : s) {
    if (quote) {
      if (c == quote) quote = 0;
      else cur.push_back(c);
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == ',') {
      out.push_back(std::string(trim(cur)));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::string(trim(cur)));
  return out;
}

// Reads an attribute name, which may be quoted and may contain spaces when
// quoted. Returns the name and the rest of the line (the type part).
inline std::pair<std::string, std::string_view> take_attribute_name(std::string_view rest,
                                                                    const std::string& path,
                                                                    std::size_t line) {
  rest = trim(rest);
  if (rest.empty()) throw ParseError(path, line, "attribute declaration missing name");
  if (rest.front() == '"' || rest.front() == '\'') {
    char quote = rest.front();
    auto end = rest.find(quote, 1);
    if (end == std::string_view::npos)
      throw ParseError(path, line, "unterminated quoted attribute name");
    return {std::string(rest.substr(1, end - 1)), trim(rest.substr(end + 1))};
  }
  auto end = rest.find_first_of(" \t");
  if (end == std::string_view::npos)
    throw ParseError(path, line, "attribute declaration missing type");
  return {std::string(rest.substr(0, end)), trim(rest.substr(end + 1))};
}

inline ArffAttribute parse_attribute(std::string_view rest, const std::string& path,
                                     std::size_t line) {
  ArffAttribute attr;
  attr.line = line;
  auto [name, type] = take_attribute_name(rest, path, line);
  attr.name = std::move(name);
  if (type.empty()) throw ParseError(path, line, "attribute declaration missing type");
  if (type.front() == '{') {
    if (type.back() != '}')
      throw ParseError(path, line, "unterminated nominal value list");
    attr.numeric = false;
    for (auto v : split(type.substr(1, type.size() - 2), ',')) {
      auto value = unquote(trim(v));
      attr.nominal_values.push_back(std::string(value));
    }
    if (attr.nominal_values.empty())
      throw ParseError(path, line, "empty nominal value list");
    return attr;
  }
  std::string lowered = to_lower(type);
  if (lowered == "numeric" || lowered == "real" || lowered == "integer") {
    attr.numeric = true;
    return attr;
  }
  throw ParseError(path, line, "unsupported attribute type '" + std::string(type) + "'");
}

}  // namespace detail

// Ordered label names from a Mulan XML label specification. Every
// <label name="..."/> element counts; order in the file is preserved.
inline std::vector<std::string> read_label_spec_xml(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open label specification: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string xml = buf.str();

  auto unescape = [](std::string s) {
    const std::pair<const char*, const char*> reps[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&amp;", "&"}};
    for (auto [from, to] : reps) {
      std::size_t pos = 0;
      while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, std::string(from).size(), to);
        pos += std::string(to).size();
      }
    }
    return s;
  };

  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = xml.find("<label", pos)) != std::string::npos) {
    auto close = xml.find('>', pos);
    if (close == std::string::npos) throw ParseError(path + ": unterminated <label> element");
    std::string_view element(xml.data() + pos, close - pos);
    auto name_pos = element.find("name");
    if (name_pos != std::string_view::npos) {
      auto eq = element.find('=', name_pos);
      if (eq != std::string_view::npos) {
        auto rest = detail::trim(element.substr(eq + 1));
        if (!rest.empty() && (rest.front() == '"' || rest.front() == '\'')) {
          char quote = rest.front();
          auto end = rest.find(quote, 1);
          if (end == std::string_view::npos)
            throw ParseError(path + ": unterminated attribute value in <label>");
          names.push_back(unescape(std::string(rest.substr(1, end - 1))));
        }
      }
    }
    pos = close + 1;
  }
  if (names.empty()) throw ParseError(path + ": no <label> elements found");
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) throw ParseError(path + ": duplicate label names");
  return names;
}

// Loads the ARFF data file and the XML label specification into a dataset.
// Feature columns keep file order; label columns follow the XML order.
inline MultiLabelDataset load_mulan_arff(const std::string& data_path,
                                         const std::string& label_spec_path) {
  const std::vector<std::string> label_names = read_label_spec_xml(label_spec_path);

  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset: " + data_path);

  std::vector<detail::ArffAttribute> attrs;
  std::map<std::string, std::size_t> attr_index;
  bool in_data = false;
  std::size_t data_line = 0;

  std::vector<std::vector<double>> feature_rows;
  std::vector<std::vector<std::uint8_t>> label_rows;

  // Filled once the header is complete.
  std::vector<std::size_t> feature_attrs;             // attribute indices of features
  std::vector<std::ptrdiff_t> label_slot_of_attr;     // -1 for features, else label column
  auto finish_header = [&](std::size_t line) {
    if (attrs.empty()) throw ParseError(data_path, line, "no attribute declarations before @data");
    label_slot_of_attr.assign(attrs.size(), -1);
    for (std::size_t li = 0; li < label_names.size(); ++li) {
      auto it = attr_index.find(label_names[li]);
      if (it == attr_index.end())
        throw ParseError(data_path, line,
                         "label '" + label_names[li] + "' is not declared as an attribute");
      const auto& attr = attrs[it->second];
      bool binary_nominal = !attr.numeric && attr.nominal_values.size() == 2 &&
                            ((attr.nominal_values[0] == "0" && attr.nominal_values[1] == "1") ||
                             (attr.nominal_values[0] == "1" && attr.nominal_values[1] == "0"));
      if (!binary_nominal)
        throw ParseError(data_path, attr.line,
                         "label attribute '" + attr.name + "' must be nominal over {0,1}");
      label_slot_of_attr[it->second] = static_cast<std::ptrdiff_t>(li);
    }
    for (std::size_t a = 0; a < attrs.size(); ++a)
      if (label_slot_of_attr[a] < 0) feature_attrs.push_back(a);
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data) {
      // Header directives.
      auto space = line.find_first_of(" \t");
      std::string head = detail::to_lower(space == std::string_view::npos ? line : line.substr(0, space));
      std::string_view rest = space == std::string_view::npos ? std::string_view{} : line.substr(space + 1);
      if (head == "@relation") continue;
      if (head == "@attribute") {
        auto attr = detail::parse_attribute(rest, data_path, line_no);
        if (attr_index.count(attr.name))
          throw ParseError(data_path, line_no, "duplicate attribute name '" + attr.name + "'");
        attr_index[attr.name] = attrs.size();
        attrs.push_back(std::move(attr));
        continue;
      }
      if (head == "@data") {
        finish_header(line_no);
        in_data = true;
        data_line = line_no;
        continue;
      }
      throw ParseError(data_path, line_no, "unrecognised header directive '" + head + "'");
    }

    // Data rows.
    if (line.front() == '{')
      throw ParseError(data_path, line_no, "sparse ARFF rows are not supported");
    auto cells = detail::split_arff_row(line);
    if (cells.size() != attrs.size())
      throw ParseError(data_path, line_no,
                       "expected " + std::to_string(attrs.size()) + " values, got " +
                           std::to_string(cells.size()));

    std::vector<double> fr(feature_attrs.size());
    std::vector<std::uint8_t> lr(label_names.size());
    std::size_t fi = 0;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const std::string& cell = cells[a];
      if (label_slot_of_attr[a] >= 0) {
        if (cell == "0") lr[static_cast<std::size_t>(label_slot_of_attr[a])] = 0;
        else if (cell == "1") lr[static_cast<std::size_t>(label_slot_of_attr[a])] = 1;
        else
          throw ParseError(data_path, line_no,
                           "non-binary value '" + cell + "' in label column '" + attrs[a].name + "'");
        continue;
      }
      double v;
      if (cell == "?") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (attrs[a].numeric) {
        auto parsed = detail::parse_double(cell);
        if (!parsed)
          throw ParseError(data_path, line_no,
                           "invalid numeric value '" + cell + "' in column '" + attrs[a].name + "'");
        v = *parsed;
      } else {
        const auto& values = attrs[a].nominal_values;
        auto it = std::find(values.begin(), values.end(), cell);
        if (it == values.end())
          throw ParseError(data_path, line_no,
                           "value '" + cell + "' not in nominal range of column '" + attrs[a].name + "'");
        v = static_cast<double>(it - values.begin());
      }
      fr[fi++] = v;
    }
    feature_rows.push_back(std::move(fr));
    label_rows.push_back(std::move(lr));
  }

  if (!in_data) throw ParseError(data_path, line_no, "missing @data section");
  if (feature_rows.empty()) throw ParseError(data_path, data_line, "no data rows");

  const std::size_t n = feature_rows.size();
  const std::size_t d = feature_attrs.size();
  Matrix<double> features(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) features(r, c) = feature_rows[r][c];

  // Mean-impute missing feature values; an all-missing column becomes zero.
  for (std::size_t c = 0; c < d; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < n; ++r)
      if (!std::isnan(features(r, c))) { sum += features(r, c); ++count; }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    for (std::size_t r = 0; r < n; ++r)
      if (std::isnan(features(r, c))) features(r, c) = mean;
  }

  LabelMatrix labels(n, label_names.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < label_names.size(); ++c) labels(r, c) = label_rows[r][c];

  return MultiLabelDataset(std::move(features), std::move(labels), label_names);
}

}  // namespace flma
