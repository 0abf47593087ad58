#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dsc/core/types.hpp"
#include "dsc/io/number_format.hpp"
#include "dsc/io/uncertainty_csv.hpp"
#include "dsc/ns/nested_sampler.hpp"

namespace dsc::io {

/// samples.csv: `d_1,...,d_n,prob,status`, one row per design sample in
/// result order. prob is empty for interrupted estimates.
inline void write_samples_csv(std::ostream& out, const std::vector<DesignSample>& samples, std::size_t n_d) {
  for (std::size_t i = 0; i < n_d; ++i) out << "d_" << i + 1 << ',';
  out << "prob,status\n";
  for (const auto& s : samples) {
    for (double v : s.d) out << format_double(v) << ',';
    if (s.prob) out << format_double(*s.prob);
    out << ',' << to_string(s.status) << '\n';
  }
}

inline std::string samples_csv_string(const std::vector<DesignSample>& samples, std::size_t n_d) {
  std::ostringstream out;
  write_samples_csv(out, samples, n_d);
  return out.str();
}

inline std::vector<DesignSample> read_samples_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw CsvError(source + ": empty samples file");
  const auto header = split_commas(line);
  if (header.size() < 3 || header[header.size() - 2] != "prob" || header.back() != "status") {
    throw CsvError(source + ":1: header must be d_1,...,d_n,prob,status");
  }
  const std::size_t n_d = header.size() - 2;
  for (std::size_t i = 0; i < n_d; ++i) {
    if (header[i] != "d_" + std::to_string(i + 1)) {
      throw CsvError(source + ":1: expected column d_" + std::to_string(i + 1));
    }
  }
  std::vector<DesignSample> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != n_d + 2) throw CsvError(where + ": expected " + std::to_string(n_d + 2) + " fields");
    DesignSample s;
    s.d.resize(n_d);
    for (std::size_t i = 0; i < n_d; ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) throw CsvError(where + ": d_" + std::to_string(i + 1) + " is not a number");
      s.d[i] = *v;
    }
    if (!fields[n_d].empty()) {
      const auto p = parse_double(fields[n_d]);
      if (!p || *p < 0.0 || *p > 1.0) throw CsvError(where + ": prob must be a number in [0, 1]");
      s.prob = *p;
    }
    if (fields[n_d + 1] == "live") {
      s.status = SampleStatus::live;
    } else if (fields[n_d + 1] == "dead") {
      s.status = SampleStatus::dead;
    } else {
      throw CsvError(where + ": status must be live or dead");
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<DesignSample> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open samples file '" + path + "'");
  return read_samples_csv(in, path);
}

/// trace.csv: per-iteration nested-sampling diagnostics.
inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,p_min,enlargement,model_evals\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << format_double(r.p_min) << ',' << format_double(r.enlargement) << ',' << r.model_evals
        << '\n';
  }
}

}  // namespace dsc::io
