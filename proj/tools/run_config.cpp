#include "run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <yaml-cpp/yaml.h>

namespace dsc::cli {

const char* to_string(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::ns: return "ns";
    case Method::nominal: return "nominal";
  }
  return "unknown";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream out;
    out << source_;
    if (node.IsDefined() && node.Mark().line >= 0) out << ':' << node.Mark().line + 1;
    out << ": field '" << field << "': " << msg;
    throw ConfigError(out.str());
  }

  void check_keys(const YAML::Node& map, const std::string& prefix, std::initializer_list<std::string_view> allowed) const {
    if (!map.IsMap()) fail(map, prefix, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) fail(kv.first, join(prefix, key), "unknown field");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& field, const char* expected) const {
    if (!node.IsScalar()) fail(node, field, std::string("expected ") + expected);
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, std::string("expected ") + expected + ", got '" + node.Scalar() + "'");
    }
  }

  double number(const YAML::Node& node, const std::string& field) const { return scalar<double>(node, field, "a number"); }

  std::size_t count(const YAML::Node& node, const std::string& field) const {
    const auto v = scalar<long long>(node, field, "a non-negative integer");
    if (v < 0) fail(node, field, "must be non-negative");
    return static_cast<std::size_t>(v);
  }

  Vector vector(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    Vector out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(number(node[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  Parser p(source);
  if (!root.IsMap()) throw ConfigError(source + ": configuration must be a mapping");
  p.check_keys(root, "", {"model", "knowledge_space", "uncertainty", "method", "mc", "ns", "nominal", "output", "seed"});

  RunConfig cfg;

  if (root["seed"]) cfg.seed = p.scalar<std::uint64_t>(root["seed"], "seed", "a non-negative integer");
  if (root["output"]) cfg.output = p.scalar<std::string>(root["output"], "output", "a path");

  // model
  const YAML::Node model = root["model"];
  if (!model) throw ConfigError(source + ": field 'model': required");
  p.check_keys(model, "model", {"name", "cqa_band", "command", "constraints", "timeout"});
  if (model["command"]) {
    if (model["name"]) p.fail(model["name"], "model.name", "give either a registry name or a command, not both");
    bridge::CommandSpec spec;
    spec.command = p.scalar<std::string>(model["command"], "model.command", "a command line");
    if (!model["constraints"]) p.fail(model, "model.constraints", "required for external command models");
    spec.constraints = p.count(model["constraints"], "model.constraints");
    if (spec.constraints == 0) p.fail(model["constraints"], "model.constraints", "must be >= 1");
    if (model["timeout"]) {
      spec.timeout_seconds = p.number(model["timeout"], "model.timeout");
      if (!(spec.timeout_seconds > 0.0)) p.fail(model["timeout"], "model.timeout", "must be > 0");
    }
    cfg.model.name = "command";
    cfg.model.command = spec;
  } else {
    if (!model["name"]) p.fail(model, "model.name", "required (or give model.command)");
    cfg.model.name = p.scalar<std::string>(model["name"], "model.name", "a model name");
    if (cfg.model.name != "illustrative") p.fail(model["name"], "model.name", "unknown model '" + cfg.model.name + "' (registered: illustrative)");
    if (model["cqa_band"]) {
      const Vector band = p.vector(model["cqa_band"], "model.cqa_band");
      if (band.size() != 2 || !(band[0] <= band[1])) p.fail(model["cqa_band"], "model.cqa_band", "expected [lower, upper] with lower <= upper");
      cfg.model.band = {band[0], band[1]};
    }
  }

  // knowledge space
  if (const YAML::Node ks = root["knowledge_space"]) {
    p.check_keys(ks, "knowledge_space", {"lower", "upper"});
    if (!ks["lower"]) p.fail(ks, "knowledge_space.lower", "required");
    if (!ks["upper"]) p.fail(ks, "knowledge_space.upper", "required");
    const Vector lower = p.vector(ks["lower"], "knowledge_space.lower");
    const Vector upper = p.vector(ks["upper"], "knowledge_space.upper");
    if (lower.size() != upper.size() || lower.empty()) {
      p.fail(ks, "knowledge_space", "lower and upper must be non-empty and of equal length");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!(lower[i] < upper[i])) {
        p.fail(ks["lower"], "knowledge_space.lower[" + std::to_string(i) + "]",
               "must be < knowledge_space.upper[" + std::to_string(i) + "]");
      }
    }
    cfg.knowledge_space.emplace(lower, upper);
  } else if (cfg.model.name == "illustrative") {
    cfg.knowledge_space = illustrative::knowledge_space();
  } else {
    throw ConfigError(source + ": field 'knowledge_space': required");
  }

  // method
  const std::string method = root["method"] ? p.scalar<std::string>(root["method"], "method", "mc, ns or nominal") : "ns";
  if (method == "mc") {
    cfg.method = Method::mc;
  } else if (method == "ns") {
    cfg.method = Method::ns;
  } else if (method == "nominal") {
    cfg.method = Method::nominal;
  } else {
    p.fail(root["method"], "method", "expected mc, ns or nominal, got '" + method + "'");
  }

  // uncertainty
  if (const YAML::Node u = root["uncertainty"]) {
    p.check_keys(u, "uncertainty", {"normal", "file"});
    if (u["normal"] && u["file"]) p.fail(u, "uncertainty", "give exactly one of 'normal' or 'file'");
    if (const YAML::Node n = u["normal"]) {
      p.check_keys(n, "uncertainty.normal", {"mean", "covariance", "samples"});
      NormalSpec spec;
      if (!n["mean"]) p.fail(n, "uncertainty.normal.mean", "required");
      spec.mean = p.vector(n["mean"], "uncertainty.normal.mean");
      if (!n["covariance"]) p.fail(n, "uncertainty.normal.covariance", "required");
      const YAML::Node cov = n["covariance"];
      if (!cov.IsSequence()) p.fail(cov, "uncertainty.normal.covariance", "expected a list of rows");
      for (std::size_t i = 0; i < cov.size(); ++i) {
        spec.covariance.push_back(p.vector(cov[i], "uncertainty.normal.covariance[" + std::to_string(i) + "]"));
      }
      if (n["samples"]) spec.count = p.count(n["samples"], "uncertainty.normal.samples");
      if (spec.count == 0) p.fail(n["samples"], "uncertainty.normal.samples", "must be >= 1");
      if (spec.covariance.size() != spec.mean.size()) {
        p.fail(cov, "uncertainty.normal.covariance", "must be square with the dimension of 'mean'");
      }
      cfg.uncertainty.normal = spec;
    } else if (const YAML::Node f = u["file"]) {
      cfg.uncertainty.file = base_dir / p.scalar<std::string>(f, "uncertainty.file", "a path");
    } else {
      p.fail(u, "uncertainty", "give exactly one of 'normal' or 'file'");
    }
  } else if (cfg.method != Method::nominal) {
    throw ConfigError(source + ": field 'uncertainty': required for method " + method);
  }

  // method parameters
  if (const YAML::Node mc = root["mc"]) {
    p.check_keys(mc, "mc", {"samples", "sequence", "skip"});
    if (mc["samples"]) cfg.mc.n_d = p.count(mc["samples"], "mc.samples");
    if (cfg.mc.n_d == 0) p.fail(mc["samples"], "mc.samples", "must be >= 1");
    if (mc["sequence"]) {
      const auto seq = p.scalar<std::string>(mc["sequence"], "mc.sequence", "sobol or uniform");
      if (seq == "sobol") {
        cfg.mc.sequence = DesignSequence::sobol;
      } else if (seq == "uniform" || seq == "uniform-random") {
        cfg.mc.sequence = DesignSequence::uniform_random;
      } else {
        p.fail(mc["sequence"], "mc.sequence", "expected sobol or uniform, got '" + seq + "'");
      }
    }
    if (mc["skip"]) cfg.mc.sobol_skip = p.count(mc["skip"], "mc.skip");
  }
  if (const YAML::Node ns = root["ns"]) {
    p.check_keys(ns, "ns", {"alpha_star", "live_points", "proposals", "enlargement", "shrink_rate", "stall_window",
                            "stall_epsilon", "max_iterations", "accelerate"});
    auto& c = cfg.ns;
    if (ns["alpha_star"]) c.alpha_star = p.number(ns["alpha_star"], "ns.alpha_star");
    if (ns["live_points"]) c.live_points = p.count(ns["live_points"], "ns.live_points");
    if (ns["proposals"]) c.proposals_per_iteration = p.count(ns["proposals"], "ns.proposals");
    if (ns["enlargement"]) c.enlargement0 = p.number(ns["enlargement"], "ns.enlargement");
    if (ns["shrink_rate"]) c.shrink_rate = p.number(ns["shrink_rate"], "ns.shrink_rate");
    if (ns["stall_window"]) c.stall_window = p.count(ns["stall_window"], "ns.stall_window");
    if (ns["stall_epsilon"]) c.stall_epsilon = p.number(ns["stall_epsilon"], "ns.stall_epsilon");
    if (ns["max_iterations"]) c.max_iterations = p.count(ns["max_iterations"], "ns.max_iterations");
    if (ns["accelerate"]) c.accelerate = p.scalar<bool>(ns["accelerate"], "ns.accelerate", "true or false");
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      p.fail(ns, "ns", e.what());
    }
  }
  if (const YAML::Node nominal = root["nominal"]) {
    p.check_keys(nominal, "nominal", {"theta"});
    if (nominal["theta"]) cfg.nominal_theta = p.vector(nominal["theta"], "nominal.theta");
  }
  if (cfg.method == Method::nominal && cfg.nominal_theta.empty()) {
    if (cfg.model.name == "illustrative") {
      cfg.nominal_theta = {illustrative::kNominalTheta};
    } else if (cfg.uncertainty.normal) {
      cfg.nominal_theta = cfg.uncertainty.normal->mean;
    } else {
      throw ConfigError(source + ": field 'nominal.theta': required for method nominal");
    }
  }
  cfg.mc.seed = cfg.seed;
  cfg.ns.seed = cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path(), path.string());
}

}  // namespace dsc::cli
