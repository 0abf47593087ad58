#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dsc/core/types.hpp"

namespace dsc::test {

/// Counts evaluations of a wrapped model.
template <class M>
class CountingModel {
 public:
  explicit CountingModel(M inner) : inner_(std::move(inner)) {}
  std::size_t constraint_count() const { return inner_.constraint_count(); }
  Vector evaluate(std::span<const double> d, std::span<const double> theta) const {
    ++calls_;
    return inner_.evaluate(d, theta);
  }
  std::size_t calls() const { return calls_.load(); }

 private:
  M inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

/// g = theta_0 - d_0: feasible iff theta_0 <= d_0.
struct ThresholdModel {
  std::size_t constraint_count() const { return 1; }
  Vector evaluate(std::span<const double> d, std::span<const double> theta) const { return {theta[0] - d[0]}; }
};

/// Returns fixed constraint values regardless of inputs.
struct ConstantModel {
  Vector g;
  std::size_t constraint_count() const { return g.size(); }
  Vector evaluate(std::span<const double>, std::span<const double>) const { return g; }
};

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dsc_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace dsc::test
