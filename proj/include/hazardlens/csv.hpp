#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hazardlens/errors.hpp"
#include "hazardlens/types.hpp"

namespace hazardlens {

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_double_field(std::string_view field, const std::string& file,
                                 std::size_t line_no, const std::string& column) {
  double v = 0.0;
  auto first = field.data();
  auto last = field.data() + field.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  while (ptr != last && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
  if (ec != std::errc() || ptr != last)
    throw input_error(file + ":" + std::to_string(line_no) +
                      ": column '" + column + "': expected a number, got '" +
                      std::string(field) + "'");
  return v;
}

/// Shortest round-trip decimal representation, stable across runs.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

/// Reads the dataset schema `id,time,status,arm[,cov_1..cov_k][,z][,t0][,t1]`.
/// Header is required; errors carry file:line and the offending column.
inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw input_error(path + ":1: empty file, header required");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = detail::split_csv_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "time" ||
      header[2] != "status" || header[3] != "arm")
    throw input_error(path + ":1: header must start with id,time,status,arm");

  std::vector<std::string> cov_names;
  int z_col = -1, t0_col = -1, t1_col = -1;
  for (std::size_t c = 4; c < header.size(); ++c) {
    std::string name(header[c]);
    if (name.rfind("cov_", 0) == 0) {
      if (z_col >= 0 || t0_col >= 0 || t1_col >= 0)
        throw input_error(path + ":1: covariate columns must precede z/t0/t1");
      cov_names.push_back(name);
    } else if (name == "z") {
      z_col = static_cast<int>(c);
    } else if (name == "t0") {
      t0_col = static_cast<int>(c);
    } else if (name == "t1") {
      t1_col = static_cast<int>(c);
    } else {
      throw input_error(path + ":1: unknown column '" + name + "'");
    }
  }

  Dataset ds;
  ds.n_covariates = cov_names.size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw input_error(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    SurvivalSample s;
    s.id = std::string(fields[0]);
    s.time = detail::parse_double_field(fields[1], path, line_no, "time");
    double status = detail::parse_double_field(fields[2], path, line_no, "status");
    double arm = detail::parse_double_field(fields[3], path, line_no, "arm");
    if (s.time < 0)
      throw input_error(path + ":" + std::to_string(line_no) +
                        ": column 'time': must be >= 0");
    if (status != 0.0 && status != 1.0)
      throw input_error(path + ":" + std::to_string(line_no) +
                        ": column 'status': must be 0 or 1");
    if (arm != 0.0 && arm != 1.0)
      throw input_error(path + ":" + std::to_string(line_no) +
                        ": column 'arm': must be 0 or 1");
    s.status = static_cast<int>(status);
    s.arm = static_cast<int>(arm);
    for (std::size_t k = 0; k < cov_names.size(); ++k)
      s.covariates.push_back(
          detail::parse_double_field(fields[4 + k], path, line_no, cov_names[k]));
    if (z_col >= 0)
      ds.z.push_back(detail::parse_double_field(fields[static_cast<std::size_t>(z_col)],
                                                path, line_no, "z"));
    if (t0_col >= 0)
      ds.t0.push_back(detail::parse_double_field(fields[static_cast<std::size_t>(t0_col)],
                                                 path, line_no, "t0"));
    if (t1_col >= 0)
      ds.t1.push_back(detail::parse_double_field(fields[static_cast<std::size_t>(t1_col)],
                                                 path, line_no, "t1"));
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw input_error(path + ": no data rows");
  return ds;
}

inline std::string dataset_csv_string(const Dataset& ds) {
  std::ostringstream out;
  out << "id,time,status,arm";
  for (std::size_t k = 0; k < ds.n_covariates; ++k) out << ",cov_" << (k + 1);
  if (!ds.z.empty()) out << ",z";
  if (!ds.t0.empty()) out << ",t0";
  if (!ds.t1.empty()) out << ",t1";
  out << "\n";
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& s = ds.samples[i];
    out << s.id << ',' << detail::format_double(s.time) << ',' << s.status
        << ',' << s.arm;
    for (double c : s.covariates) out << ',' << detail::format_double(c);
    if (!ds.z.empty()) out << ',' << detail::format_double(ds.z[i]);
    if (!ds.t0.empty()) out << ',' << detail::format_double(ds.t0[i]);
    if (!ds.t1.empty()) out << ',' << detail::format_double(ds.t1[i]);
    out << "\n";
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + path);
  out << text;
}

inline void write_dataset_csv(const std::string& path, const Dataset& ds) {
  write_text_file(path, dataset_csv_string(ds));
}

/// Potential-outcome pair schema `id,t0,t1,z,a,t_obs`.
inline void write_pairs_csv(const std::string& path,
                            const std::vector<PotentialOutcomePair>& pairs) {
  std::ostringstream out;
  out << "id,t0,t1,z,a,t_obs\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    out << (i + 1) << ',' << detail::format_double(p.t0) << ','
        << detail::format_double(p.t1) << ',' << detail::format_double(p.z)
        << ',' << p.a << ',' << detail::format_double(p.t_obs) << "\n";
  }
  write_text_file(path, out.str());
}

/// Generic numeric table with a header row.
inline std::string table_csv_string(const std::vector<std::string>& columns,
                                    const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << detail::format_double(row[c]);
    out << "\n";
  }
  return out.str();
}

inline void write_table_csv(const std::string& path,
                            const std::vector<std::string>& columns,
                            const std::vector<std::vector<double>>& rows) {
  write_text_file(path, table_csv_string(columns, rows));
}

}  // namespace hazardlens
