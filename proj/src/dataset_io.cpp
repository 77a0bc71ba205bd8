#include "trunclr/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "trunclr/errors.hpp"

namespace trunclr {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_dataset(const Dataset& data, std::ostream& out) {
  data.validate();
  const int d = data.dim();
  for (int j = 0; j < d; ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < data.xs.rows(); ++i) {
    for (int j = 0; j < d; ++j) out << format_double(data.xs(i, j)) << ',';
    out << format_double(data.ys[i]) << '\n';
  }
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_dataset(data, out);
  if (!out) throw Error("failed writing " + path.string());
}

Dataset read_dataset(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(where(source, 1) + "empty file, expected header x1,...,xd,y");
  const auto header = split_fields(line);
  const auto y_col = trim(header.back());
  if (y_col != "y") {
    bool has_y = false;
    for (auto h : header) has_y = has_y || trim(h) == "y";
    throw SchemaError(where(source, 1) +
                      (has_y ? "column 'y' must be the last column" : "missing 'y' column"));
  }
  const std::size_t d = header.size() - 1;
  if (d == 0) throw SchemaError(where(source, 1) + "no feature columns before 'y'");
  for (std::size_t j = 0; j < d; ++j) {
    const std::string expected = "x" + std::to_string(j + 1);
    if (trim(header[j]) != expected) {
      throw SchemaError(where(source, 1) + "expected column '" + expected + "', got '" +
                        std::string(trim(header[j])) + "'");
    }
  }

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d + 1) {
      throw SchemaError(where(source, line_no) + "expected " + std::to_string(d + 1) + " fields, got " +
                        std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j <= d; ++j) {
      const auto f = trim(fields[j]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        const std::string col = j == d ? "y" : "x" + std::to_string(j + 1);
        throw SchemaError(where(source, line_no) + "column '" + col + "' holds a non-finite or malformed value '" +
                          std::string(f) + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw SchemaError(where(source, line_no) + "no data rows");

  Dataset data;
  data.xs.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  data.ys.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      data.xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * (d + 1) + j];
    }
    data.ys[static_cast<Eigen::Index>(i)] = values[i * (d + 1) + d];
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path.string());
  return read_dataset(in, path.string());
}

}  // namespace trunclr
