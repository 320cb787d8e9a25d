#pragma once

// Shared helpers for the test suite: deterministic random generators, a
// synthetic correlated dataset, temp directories, and small file utilities.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flma/flma.hpp"

namespace test_support {

inline flma::LabelMatrix random_label_matrix(std::mt19937& rng, std::size_t rows,
                                             std::size_t cols, double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  flma::LabelMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = unit(rng) < density ? 1 : 0;
  return m;
}

inline flma::ScoreMatrix random_score_matrix(std::mt19937& rng, std::size_t rows,
                                             std::size_t cols) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  flma::ScoreMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = unit(rng);
  return m;
}

inline std::vector<std::string> label_names(std::size_t count, const std::string& prefix = "L") {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

// Labels drawn from three latent topics so that co-presence and co-absence
// structure exists; features are noisy sums of per-label prototype vectors,
// which ML-KNN can pick up.
inline flma::MultiLabelDataset synthetic_dataset(std::mt19937& rng, std::size_t n,
                                                 std::size_t c_count = 6) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.35);
  const std::size_t d = c_count + 2;

  std::vector<std::vector<double>> prototypes(c_count, std::vector<double>(d, 0.0));
  for (std::size_t l = 0; l < c_count; ++l) {
    prototypes[l][l] = 2.0;
    prototypes[l][(l + 1) % d] = 1.0;
  }

  flma::Matrix<double> features(n, d);
  flma::LabelMatrix labels(n, c_count);
  for (std::size_t r = 0; r < n; ++r) {
    const int topic = static_cast<int>(rng() % 3);
    for (std::size_t l = 0; l < c_count; ++l) {
      double p = 0.15;
      if (topic == 0 && l < 2) p = 0.9;          // labels 0,1 co-present
      if (topic == 1 && (l == 2 || l == 3)) p = 0.85;
      if (topic == 2 && l >= c_count - 2) p = 0.8;
      labels(r, l) = unit(rng) < p ? 1 : 0;
    }
    // Guarantee at least one relevant label per instance.
    bool any = false;
    for (std::size_t l = 0; l < c_count; ++l) any = any || labels(r, l);
    if (!any) labels(r, static_cast<std::size_t>(topic) * 2 % c_count) = 1;
    for (std::size_t j = 0; j < d; ++j) {
      double v = noise(rng);
      for (std::size_t l = 0; l < c_count; ++l)
        if (labels(r, l)) v += prototypes[l][j];
      features(r, j) = v;
    }
  }
  return flma::MultiLabelDataset(std::move(features), std::move(labels),
                                 label_names(c_count));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / (tag + "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp directory for " + tag);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes a dataset as ARFF + label XML, for exercising the loader and CLI.
inline void write_arff_pair(const std::filesystem::path& arff_path,
                            const std::filesystem::path& xml_path,
                            const flma::MultiLabelDataset& ds) {
  std::ostringstream arff;
  arff << "@relation synthetic\n\n";
  for (std::size_t j = 0; j < ds.feature_count(); ++j)
    arff << "@attribute f" << j << " numeric\n";
  for (const auto& name : ds.label_names())
    arff << "@attribute " << name << " {0,1}\n";
  arff << "\n@data\n";
  for (std::size_t r = 0; r < ds.instance_count(); ++r) {
    for (std::size_t j = 0; j < ds.feature_count(); ++j)
      arff << (j ? "," : "") << flma::detail::format_double(ds.features()(r, j));
    for (std::size_t l = 0; l < ds.label_count(); ++l)
      arff << ',' << static_cast<int>(ds.labels()(r, l));
    arff << '\n';
  }
  write_file(arff_path, arff.str());

  std::ostringstream xml;
  xml << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      << "<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n";
  for (const auto& name : ds.label_names())
    xml << "  <label name=\"" << name << "\"></label>\n";
  xml << "</labels>\n";
  write_file(xml_path, xml.str());
}

}  // namespace test_support
