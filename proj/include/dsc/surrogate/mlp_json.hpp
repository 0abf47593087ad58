#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsc/surrogate/mlp.hpp"

namespace dsc::surrogate {

inline constexpr const char* kMlpSchemaName = "dsc.feasibility_mlp";
inline constexpr int kMlpSchemaVersion = 1;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json nullable(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline double number_or_nan(const nlohmann::json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// Weight matrices are stored row-major, one object per layer (input side first).
inline nlohmann::json to_json(const FeasibilityMapMLP& net) {
  nlohmann::json j;
  j["schema"] = kMlpSchemaName;
  j["schema_version"] = kMlpSchemaVersion;
  j["input_dim"] = net.input_dim();
  j["hidden_layers"] = net.hidden_widths();
  j["hidden_activation"] = to_string(net.hidden_activation());
  j["output_activation"] = "sigmoid";
  j["normalization"] = {{"lower", net.domain().lower()}, {"upper", net.domain().upper()}};
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers()) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) w.push_back(layer.weights(r, c));
    }
    std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back({{"rows", layer.weights.rows()}, {"cols", layer.weights.cols()}, {"weights", w}, {"bias", b}});
  }
  j["layers"] = layers;
  const auto& t = net.training;
  j["training"] = {{"loss", "mse"},
                   {"train_mse", detail::nullable(t.train_mse)},
                   {"validation_mse", detail::nullable(t.validation_mse)},
                   {"epochs_run", t.epochs_run},
                   {"best_epoch", t.best_epoch},
                   {"train_size", t.train_size},
                   {"validation_size", t.validation_size}};
  return j;
}

inline FeasibilityMapMLP mlp_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", "") != kMlpSchemaName) {
    throw SchemaError("not a feasibility-map model document (schema field must be '" + std::string(kMlpSchemaName) + "')");
  }
  const int version = j.value("schema_version", -1);
  if (version != kMlpSchemaVersion) {
    throw SchemaError("unsupported model schema_version " + std::to_string(version) + " (expected " +
                      std::to_string(kMlpSchemaVersion) + ")");
  }
  try {
    KnowledgeSpace domain(j.at("normalization").at("lower").get<Vector>(), j.at("normalization").at("upper").get<Vector>());
    if (j.at("output_activation").get<std::string>() != "sigmoid") throw SchemaError("output_activation must be sigmoid");
    const Activation act = activation_from_string(j.at("hidden_activation").get<std::string>());
    std::vector<DenseLayer> layers;
    for (const auto& jl : j.at("layers")) {
      const auto rows = jl.at("rows").get<Eigen::Index>();
      const auto cols = jl.at("cols").get<Eigen::Index>();
      const auto w = jl.at("weights").get<std::vector<double>>();
      const auto b = jl.at("bias").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
        throw SchemaError("layer weight/bias sizes do not match rows/cols");
      }
      DenseLayer layer;
      layer.weights.resize(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      }
      layer.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
      layers.push_back(std::move(layer));
    }
    FeasibilityMapMLP net(std::move(domain), std::move(layers), act);
    if (j.contains("training")) {
      const auto& t = j["training"];
      net.training.train_mse = detail::number_or_nan(t.value("train_mse", nlohmann::json()));
      net.training.validation_mse = detail::number_or_nan(t.value("validation_mse", nlohmann::json()));
      net.training.epochs_run = t.value("epochs_run", std::size_t{0});
      net.training.best_epoch = t.value("best_epoch", std::size_t{0});
      net.training.train_size = t.value("train_size", std::size_t{0});
      net.training.validation_size = t.value("validation_size", std::size_t{0});
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  }
}

inline void save_mlp(const FeasibilityMapMLP& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
  out << to_json(net).dump(2) << '\n';
}

inline FeasibilityMapMLP load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("cannot parse model file '" + path + "': " + e.what());
  }
  return mlp_from_json(j);
}

}  // namespace dsc::surrogate
