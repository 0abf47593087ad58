#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "dsc/benchmark/illustrative.hpp"
#include "dsc/bridge/external_model.hpp"
#include "dsc/core/normal_generator.hpp"
#include "dsc/core/types.hpp"
#include "dsc/mc/monte_carlo.hpp"
#include "dsc/ns/nested_sampler.hpp"

namespace dsc::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { mc, ns, nominal };

const char* to_string(Method m);

struct ModelSpec {
  std::string name;                              // registry name, or "command"
  std::optional<bridge::CommandSpec> command;    // set for external models
  illustrative::CqaBand band;                    // illustrative model only
};

struct UncertaintySpec {
  std::optional<NormalSpec> normal;
  std::optional<std::filesystem::path> file;
};

struct RunConfig {
  ModelSpec model;
  std::optional<KnowledgeSpace> knowledge_space;
  UncertaintySpec uncertainty;
  Method method = Method::ns;
  MCConfig mc;
  NSConfig ns;
  Vector nominal_theta;
  std::filesystem::path output = "results";
  std::uint64_t seed = 0;

  const KnowledgeSpace& space() const { return knowledge_space.value(); }
};

/// Parses a YAML run configuration; relative paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace dsc::cli
