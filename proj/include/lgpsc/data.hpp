#pragma once

// Labeled dataset ingestion from delimiter-separated text, plus seeded
// synthetic generators.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lgpsc/data_matrix.hpp"
#include "lgpsc/error.hpp"
#include "lgpsc/labeling.hpp"
#include "lgpsc/random.hpp"

namespace lgpsc {

struct LabeledDataset {
  std::string name;
  DataMatrix x;
  Labeling labels;  // ground truth
  int d_true = 0;
  std::vector<std::string> feature_names;
};

/// Which field of each row holds the label.
struct LabelColumn {
  static LabelColumn last() { return LabelColumn{}; }
  static LabelColumn at(std::size_t i) { return LabelColumn{i}; }

  std::optional<std::size_t> index;  // empty means the last field
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Integer labels keep their order (ascending); anything else is numbered
/// by first appearance.
inline std::pair<std::vector<int>, int> map_labels(const std::vector<std::string>& raw) {
  std::vector<int> ids(raw.size());
  bool all_int = true;
  for (const auto& r : raw) all_int = all_int && parse_integer(r).has_value();
  if (all_int) {
    std::map<long long, int> order;
    for (const auto& r : raw) order.emplace(*parse_integer(r), 0);
    int next = 0;
    for (auto& [value, id] : order) id = next++;
    for (std::size_t i = 0; i < raw.size(); ++i) ids[i] = order.at(*parse_integer(raw[i]));
    return {ids, next};
  }
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = seen.emplace(raw[i], static_cast<int>(seen.size()));
    ids[i] = it->second;
  }
  return {ids, static_cast<int>(seen.size())};
}

}  // namespace detail

inline LabeledDataset load_delimited(const std::filesystem::path& path,
                                     LabelColumn label_column = LabelColumn::last(),
                                     char delimiter = ',', bool has_header = false) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::size_t width = 0;
  std::size_t label_at = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;

  auto fail = [&](const std::string& what) {
    return ParseError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, delimiter);
    if (width == 0) {
      width = fields.size();
      if (width < 2) throw fail("need at least one feature and a label column");
      label_at = label_column.index.value_or(width - 1);
      if (label_at >= width) {
        throw fail("label column " + std::to_string(label_at) + " out of range");
      }
    } else if (fields.size() != width) {
      throw fail("expected " + std::to_string(width) + " fields, got " +
                 std::to_string(fields.size()));
    }
    if (header_pending) {
      header_pending = false;
      for (std::size_t f = 0; f < width; ++f) {
        if (f != label_at) header.emplace_back(fields[f]);
      }
      continue;
    }
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t f = 0; f < width; ++f) {
      if (f == label_at) continue;
      const auto v = detail::parse_double(fields[f]);
      if (!v || !std::isfinite(*v)) {
        throw fail("field " + std::to_string(f) + " is not a finite number: '" +
                   std::string(fields[f]) + "'");
      }
      row.push_back(*v);
    }
    if (fields[label_at].empty()) throw fail("empty label");
    raw_labels.emplace_back(fields[label_at]);
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) {
    throw ParseError(path.string() + ": need at least 2 data rows, got " +
                     std::to_string(rows.size()));
  }

  RowMatrix x(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < rows[i].size(); ++f) {
      x(static_cast<Index>(i), static_cast<Index>(f)) = rows[i][f];
    }
  }
  auto [ids, d] = detail::map_labels(raw_labels);
  if (d < 2) throw ParseError(path.string() + ": need at least 2 distinct labels");
  return LabeledDataset{path.stem().string(), DataMatrix(std::move(x)),
                        Labeling{std::move(ids), d}, d, std::move(header)};
}

/// Writes features followed by the label as the last column.
inline void write_delimited(const LabeledDataset& ds, const std::filesystem::path& path,
                            char delimiter = ',', bool with_header = true) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const Index m = ds.x.feature_count();
  if (with_header) {
    for (Index f = 0; f < m; ++f) {
      if (static_cast<std::size_t>(f) < ds.feature_names.size()) {
        out << ds.feature_names[static_cast<std::size_t>(f)];
      } else {
        out << 'x' << f;
      }
      out << delimiter;
    }
    out << "label\n";
  }
  for (Index i = 0; i < ds.x.point_count(); ++i) {
    for (Index f = 0; f < m; ++f) out << detail::format_double(ds.x.matrix()(i, f)) << delimiter;
    out << ds.labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

/// Two interleaved unit half-circles with n/2 evenly spaced points each:
/// (cos t, sin t) labelled 0 and (1 - cos t, 1/2 - sin t) labelled 1, plus
/// N(0, noise^2) jitter on each coordinate.
inline LabeledDataset gen_two_moons(Index n, double noise, std::uint64_t seed) {
  if (n < 4 || n % 2 != 0) {
    throw ParameterError("two-moons needs an even n >= 4, got " + std::to_string(n));
  }
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  const Index half = n / 2;
  RowMatrix x(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < half; ++i) {
    const double t = std::numbers::pi * static_cast<double>(i) / static_cast<double>(half - 1);
    x(i, 0) = std::cos(t);
    x(i, 1) = std::sin(t);
    x(half + i, 0) = 1.0 - std::cos(t);
    x(half + i, 1) = 0.5 - std::sin(t);
    labels[static_cast<std::size_t>(i)] = 0;
    labels[static_cast<std::size_t>(half + i)] = 1;
  }
  if (noise > 0.0) {
    Rng rng(seed);
    for (Index i = 0; i < n; ++i) {
      x(i, 0) += noise * rng.normal();
      x(i, 1) += noise * rng.normal();
    }
  }
  return LabeledDataset{"two_moons", DataMatrix(std::move(x)), Labeling{std::move(labels), 2}, 2,
                        {"x", "y"}};
}

/// Isotropic Gaussian clusters, points_per points around each center,
/// grouped by center in order.
inline LabeledDataset gen_blobs(const std::vector<std::vector<double>>& centers, Index points_per,
                                double stddev, std::uint64_t seed) {
  if (centers.size() < 2) throw ParameterError("blobs need at least 2 centers");
  const std::size_t m = centers.front().size();
  if (m == 0) throw ParameterError("blob centers must have at least one coordinate");
  for (const auto& c : centers) {
    if (c.size() != m) throw ParameterError("blob centers differ in dimension");
  }
  if (points_per < 1) throw ParameterError("points_per must be >= 1");
  if (!(stddev > 0.0)) throw ParameterError("stddev must be > 0");

  const auto count = static_cast<Index>(centers.size());
  RowMatrix x(count * points_per, static_cast<Index>(m));
  std::vector<int> labels(static_cast<std::size_t>(count * points_per));
  Rng rng(seed);
  for (Index c = 0; c < count; ++c) {
    for (Index p = 0; p < points_per; ++p) {
      const Index i = c * points_per + p;
      for (std::size_t f = 0; f < m; ++f) {
        x(i, static_cast<Index>(f)) = centers[static_cast<std::size_t>(c)][f] + stddev * rng.normal();
      }
      labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
    }
  }
  return LabeledDataset{"blobs", DataMatrix(std::move(x)),
                        Labeling{std::move(labels), static_cast<int>(count)}, static_cast<int>(count),
                        {}};
}

}  // namespace lgpsc
