#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsc/core/types.hpp"
#include "dsc/io/number_format.hpp"

namespace dsc::io {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

/// Reads `theta_1,...,theta_p,weight`. Weights are normalized by UncertaintySet.
inline UncertaintySet read_uncertainty_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_theta = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw CsvError(source + ": empty uncertainty file");
  {
    const auto header = split_commas(line);
    if (header.size() < 2 || header.back() != "weight") {
      throw CsvError(source + ":" + std::to_string(line_no) + ": header must be theta_1,...,theta_p,weight");
    }
    n_theta = header.size() - 1;
    for (std::size_t i = 0; i < n_theta; ++i) {
      if (header[i] != "theta_" + std::to_string(i + 1)) {
        throw CsvError(source + ":" + std::to_string(line_no) + ": expected column theta_" + std::to_string(i + 1) +
                       ", found '" + std::string(header[i]) + "'");
      }
    }
  }
  std::vector<ThetaSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != n_theta + 1) {
      throw CsvError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(n_theta + 1) +
                     " fields, found " + std::to_string(fields.size()));
    }
    ThetaSample s;
    s.theta.resize(n_theta);
    for (std::size_t i = 0; i <= n_theta; ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) {
        throw CsvError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(i + 1) +
                       " is not a number: '" + std::string(fields[i]) + "'");
      }
      (i < n_theta ? s.theta[i] : s.weight) = *v;
    }
    samples.push_back(std::move(s));
  }
  try {
    return UncertaintySet(std::move(samples));
  } catch (const std::invalid_argument& e) {
    throw CsvError(source + ": " + e.what());
  }
}

inline UncertaintySet read_uncertainty_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open uncertainty file '" + path + "'");
  return read_uncertainty_csv(in, path);
}

inline void write_uncertainty_csv(std::ostream& out, const UncertaintySet& set) {
  for (std::size_t i = 0; i < set.dim(); ++i) out << "theta_" << i + 1 << ',';
  out << "weight\n";
  for (const auto& s : set.samples()) {
    for (double v : s.theta) out << format_double(v) << ',';
    out << format_double(s.weight) << '\n';
  }
}

}  // namespace dsc::io
