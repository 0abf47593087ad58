#pragma once

#include <concepts>
#include <cstddef>
#include <span>

#include "dsc/core/types.hpp"

namespace dsc {

/// A black-box process model G(d, theta) returning the constraint vector;
/// the design is feasible for a scenario when every entry is <= 0.
/// evaluate must be deterministic and reentrant for fixed (d, theta).
template <class M>
concept ProcessModel = requires(const M& m, std::span<const double> d, std::span<const double> theta) {
  { m.constraint_count() } -> std::convertible_to<std::size_t>;
  { m.evaluate(d, theta) } -> std::convertible_to<Vector>;
};

/// Runtime-polymorphic model, used where the model is chosen at run time.
class ProcessModelBase {
 public:
  virtual ~ProcessModelBase() = default;
  virtual std::size_t constraint_count() const = 0;
  virtual Vector evaluate(std::span<const double> d, std::span<const double> theta) const = 0;
};

static_assert(ProcessModel<ProcessModelBase>);

/// Adapts any ProcessModel value to ProcessModelBase.
template <ProcessModel M>
class ModelAdapter final : public ProcessModelBase {
 public:
  explicit ModelAdapter(M model) : model_(std::move(model)) {}
  std::size_t constraint_count() const override { return model_.constraint_count(); }
  Vector evaluate(std::span<const double> d, std::span<const double> theta) const override {
    return model_.evaluate(d, theta);
  }
  const M& model() const noexcept { return model_; }

 private:
  M model_;
};

}  // namespace dsc
