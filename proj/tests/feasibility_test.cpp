#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dsc/benchmark/illustrative.hpp"
#include "dsc/core/feasibility.hpp"
#include "dsc/core/normal_generator.hpp"
#include "test_support.hpp"

using namespace dsc;
using dsc::test::ConstantModel;
using dsc::test::CountingModel;
using dsc::test::ThresholdModel;

TEST(Indicator, BoundaryCountsAsSatisfied) {
  EXPECT_EQ(indicator(Vector{-1.0, 0.0}), 1);
  EXPECT_EQ(indicator(Vector{0.001, -5.0}), 0);
  EXPECT_EQ(indicator(Vector{-0.3}), 1);
}

TEST(Indicator, NonFiniteIsAnErrorNamingThePoint) {
  const Vector d{0.25, -1.0};
  const Vector theta{2.0};
  try {
    indicator(Vector{-1.0, std::numeric_limits<double>::quiet_NaN()}, d, theta);
    FAIL() << "expected NonFiniteConstraintError";
  } catch (const NonFiniteConstraintError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("non-finite constraint value"), std::string::npos);
    EXPECT_NE(msg.find("d=(0.25, -1)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("theta=(2)"), std::string::npos) << msg;
  }
  EXPECT_THROW(indicator(Vector{std::numeric_limits<double>::infinity()}), NonFiniteConstraintError);
  EXPECT_THROW(indicator(Vector{}), ModelError);
}

TEST(FeasibilityProbability, TwoScenarioWeightedSum) {
  const illustrative::Model model;
  const UncertaintySet set({{{0.0}, 0.5}, {{2.0}, 0.5}});
  EXPECT_EQ(feasibility_probability(model, Vector{1.0, 0.3}, set), 0.5);
}

TEST(FeasibilityProbability, ParameterFreePointIsCertain) {
  const illustrative::Model model;
  const UncertaintySet set = sample_normal({{0.0}, {{1.0}}, 50}, 7);
  EXPECT_EQ(feasibility_probability(model, Vector{0.0, 0.5}, set), 1.0);
}

TEST(FeasibilityProbability, MatchesClosedFormWithMillionDraws) {
  const illustrative::Model model;
  const UncertaintySet set = sample_normal({{0.0}, {{1.0}}, 1000000}, 11);
  const double p = feasibility_probability(model, Vector{1.0, 0.475}, set);
  EXPECT_NEAR(p, 0.21668376169278963, 0.002);
}

TEST(FeasibilityProbability, EvaluatesEveryScenarioOnce) {
  CountingModel<ThresholdModel> model{ThresholdModel{}};
  const UncertaintySet set = sample_normal({{0.0}, {{1.0}}, 37}, 3);
  feasibility_probability(model, Vector{0.1}, set);
  EXPECT_EQ(model.calls(), 37u);
}

TEST(FeasibilityProbability, WrongConstraintCountIsAModelError) {
  const ConstantModel model{{-1.0}};
  struct Liar {
    std::size_t constraint_count() const { return 2; }
    Vector evaluate(std::span<const double>, std::span<const double>) const { return {-1.0}; }
  };
  EXPECT_THROW(feasibility_probability(Liar{}, Vector{0.0}, UncertaintySet::single({0.0})), ModelError);
  EXPECT_EQ(feasibility_probability(model, Vector{0.0}, UncertaintySet::single({0.0})), 1.0);
}

namespace {

// 100 equal-weight scenarios; the first `feasible_head` are feasible, the
// remainder of the first 50 infeasible and the last 50 feasible iff
// `tail_feasible`.
UncertaintySet interrupt_fixture(int feasible_head, bool tail_feasible) {
  std::vector<Vector> thetas;
  for (int j = 0; j < 100; ++j) {
    bool ok = j < 50 ? j < feasible_head : tail_feasible;
    thetas.push_back({ok ? 0.0 : 1.0});
  }
  return UncertaintySet::equal_weights(thetas);
}

}  // namespace

TEST(BoundedFeasibility, InterruptsWhenCeilingDropsBelowFloor) {
  CountingModel<ThresholdModel> model{ThresholdModel{}};
  const auto set = interrupt_fixture(9, false);
  const auto r = feasibility_probability_bounded(model, Vector{0.5}, set, 0.6);
  EXPECT_TRUE(r.rejected());
  EXPECT_LE(r.evaluations, 51u);
  EXPECT_EQ(r.evaluations, model.calls());
}

TEST(BoundedFeasibility, ContinuesWhenCeilingEqualsFloor) {
  const ThresholdModel model;
  const auto set = interrupt_fixture(10, true);
  const auto r = feasibility_probability_bounded(model, Vector{0.5}, set, 0.6);
  ASSERT_FALSE(r.rejected());
  EXPECT_EQ(r.evaluations, 100u);
  EXPECT_EQ(*r.value, feasibility_probability(model, Vector{0.5}, set));
  EXPECT_NEAR(*r.value, 0.6, 1e-12);
}

TEST(BoundedFeasibility, ZeroFloorNeverInterrupts) {
  const ThresholdModel model;
  const UncertaintySet set = sample_normal({{0.0}, {{1.0}}, 200}, 5);
  for (double d : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
    const auto r = feasibility_probability_bounded(model, Vector{d}, set, 0.0);
    ASSERT_FALSE(r.rejected());
    EXPECT_EQ(r.evaluations, 200u);
    EXPECT_EQ(*r.value, feasibility_probability(model, Vector{d}, set));
  }
}

TEST(BoundedFeasibility, RejectsInvalidFloor) {
  const ThresholdModel model;
  EXPECT_THROW(feasibility_probability_bounded(model, Vector{0.0}, UncertaintySet::single({0.0}), 1.5),
               std::invalid_argument);
}

// Property sweeps over random weighted sets.

TEST(FeasibilityProperties, SoundnessAndBitIdentity) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ThresholdModel model;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 60;
    std::vector<ThetaSample> samples;
    for (std::size_t j = 0; j < n; ++j) samples.push_back({{u(gen) * 2.0 - 1.0}, 0.05 + u(gen)});
    const UncertaintySet set(samples);
    const Vector d{u(gen) * 2.0 - 1.0};
    const double full = feasibility_probability(model, d, set);
    ASSERT_GE(full, 0.0);
    ASSERT_LE(full, 1.0);
    for (double floor : {0.0, u(gen), full, std::nextafter(full, 2.0), 1.0}) {
      floor = std::clamp(floor, 0.0, 1.0);
      const auto r = feasibility_probability_bounded(model, d, set, floor);
      ASSERT_LE(r.evaluations, n);
      if (r.rejected()) {
        ASSERT_LT(full, floor);
      } else {
        ASSERT_EQ(*r.value, full);
      }
    }
  }
}

TEST(FeasibilityProperties, ExactFeasibleMassWithDyadicWeights) {
  std::mt19937_64 gen(99);
  const ThresholdModel model;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ThetaSample> samples;
    double expected_num = 0.0;
    double total = 0.0;
    const double d = 0.0;
    for (int j = 0; j < 16; ++j) {
      const double w = static_cast<double>(1 + gen() % 8);
      const double theta = (gen() % 2 == 0) ? -1.0 : 1.0;
      samples.push_back({{theta}, w});
      total += w;
      if (theta <= d) expected_num += w;
    }
    // Pad to a power-of-two total so that normalization is exact.
    const double target = std::exp2(std::ceil(std::log2(total)));
    if (target > total) samples.push_back({{1.0}, target - total});
    const UncertaintySet set(samples);
    EXPECT_EQ(feasibility_probability(model, Vector{d}, set), expected_num / target);
  }
}

TEST(FeasibilityProperties, PermutationInvariance) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const illustrative::Model model;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ThetaSample> samples;
    for (int j = 0; j < 40; ++j) samples.push_back({{u(gen) * 3.0 - 1.0}, (j % 3 == 0) ? 0.5 : u(gen) + 0.01});
    const Vector d{u(gen) * 2.0 - 1.0, u(gen) * 2.0 - 1.0};
    const double base = feasibility_probability(model, d, UncertaintySet(samples));
    std::shuffle(samples.begin(), samples.end(), gen);
    EXPECT_EQ(feasibility_probability(model, d, UncertaintySet(samples)), base);
  }
}

TEST(UncertaintySet, NormalizesWeights) {
  const UncertaintySet set({{{1.0}, 2.0}, {{2.0}, 6.0}});
  EXPECT_EQ(set[0].weight, 0.25);
  EXPECT_EQ(set[1].weight, 0.75);
  EXPECT_EQ(set.evaluation_order()[0], 1u);
  EXPECT_EQ(set.tail_mass(0), 1.0);
  EXPECT_EQ(set.tail_mass(2), 0.0);
}

TEST(UncertaintySet, OrderBreaksTiesByIndex) {
  const UncertaintySet set({{{1.0}, 1.0}, {{2.0}, 2.0}, {{3.0}, 1.0}, {{4.0}, 2.0}});
  const std::vector<std::size_t> order(set.evaluation_order().begin(), set.evaluation_order().end());
  EXPECT_EQ(order, (std::vector<std::size_t>{1, 3, 0, 2}));
}

TEST(UncertaintySet, RejectsMalformedInput) {
  EXPECT_THROW(UncertaintySet({}), std::invalid_argument);
  EXPECT_THROW(UncertaintySet({{{1.0}, 0.0}}), std::invalid_argument);
  EXPECT_THROW(UncertaintySet({{{1.0}, -1.0}}), std::invalid_argument);
  EXPECT_THROW(UncertaintySet({{{1.0}, 1.0}, {{1.0, 2.0}, 1.0}}), std::invalid_argument);
  EXPECT_THROW(UncertaintySet({{{}, 1.0}}), std::invalid_argument);
  EXPECT_THROW(UncertaintySet({{{std::nan("")}, 1.0}}), std::invalid_argument);
}

TEST(KnowledgeSpace, Validation) {
  EXPECT_THROW(KnowledgeSpace({}, {}), std::invalid_argument);
  EXPECT_THROW(KnowledgeSpace({0.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(KnowledgeSpace({1.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(KnowledgeSpace({0.0}, {1.0, 2.0}), std::invalid_argument);
  const KnowledgeSpace k({-1.0, 0.0}, {1.0, 4.0});
  EXPECT_TRUE(k.contains(Vector{1.0, 0.0}));
  EXPECT_FALSE(k.contains(Vector{1.0 + 1e-12, 0.0}));
  EXPECT_EQ(k.from_unit(Vector{0.5, 0.25}), (Vector{0.0, 1.0}));
}

TEST(NormalGenerator, MomentsAndDeterminism) {
  const NormalSpec spec{{1.0, -2.0}, {{0.3, 0.1}, {0.1, 0.2}}, 20000};
  const auto a = sample_normal(spec, 42);
  const auto b = sample_normal(spec, 42);
  ASSERT_EQ(a.size(), 20000u);
  double m0 = 0, m1 = 0, c01 = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    ASSERT_EQ(a[j].theta, b[j].theta);
    m0 += a[j].theta[0];
    m1 += a[j].theta[1];
  }
  m0 /= 20000.0;
  m1 /= 20000.0;
  for (const auto& s : a.samples()) c01 += (s.theta[0] - m0) * (s.theta[1] - m1);
  c01 /= 20000.0;
  EXPECT_NEAR(m0, 1.0, 0.02);
  EXPECT_NEAR(m1, -2.0, 0.02);
  EXPECT_NEAR(c01, 0.1, 0.01);
  EXPECT_THROW(sample_normal({{0.0}, {{-1.0}}, 10}, 1), std::invalid_argument);
}
