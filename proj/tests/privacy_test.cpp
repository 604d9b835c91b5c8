//
// Copyright 2026 The dpfusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#include "dpfusion/privacy.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dpfusion/error.hpp"
#include "dpfusion/fusion.hpp"
#include "dpfusion/simulation.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace dpfusion {
namespace {

Matrix Scalar(double v) { return Matrix::Constant(1, 1, v); }

constexpr double kOxygenDelta2 = 0.25869686 - 0.24347218;

TEST(SensitivityProfileTest, SingleSensor) {
  const SensitivityProfile sp =
      ComputeSensitivityProfile(std::vector<Matrix>{Scalar(0.3)});
  EXPECT_EQ(sp.delta2, 0.0);
  EXPECT_EQ(sp.p_min, 0.3);
  EXPECT_EQ(sp.p_max, 0.3);
}

TEST(SensitivityProfileTest, Oxygen) {
  const SensitivityProfile sp =
      ComputeSensitivityProfile(AssembleEnsemble(OxygenModel()));
  EXPECT_NEAR(sp.delta2, 0.0152, 1e-4);
  EXPECT_NEAR(sp.delta2, kOxygenDelta2, 1e-7);
  EXPECT_NEAR(sp.p_min, 0.2435, 1e-4);
  EXPECT_NEAR(sp.p_max, 0.2587, 1e-4);
}

TEST(SensitivityProfileTest, Tracking) {
  const SensitivityProfile sp =
      ComputeSensitivityProfile(AssembleEnsemble(TrackingModel()));
  EXPECT_NEAR(sp.delta2, 0.07857272, 1e-7);
  EXPECT_NEAR(sp.p_min, 0.13903882, 1e-7);
  EXPECT_NEAR(sp.p_max, 0.21071002, 1e-7);
}

TEST(SensitivityProfileTest, IdenticalSensorsHaveZeroSensitivity) {
  const Matrix p = gen::Source(1).Spd(3);
  EXPECT_EQ(ComputeSensitivityProfile({p, p, p}).delta2, 0.0);
}

TEST(SensitivityProfileTest, ReverseTriangleProperty) {
  gen::Source src(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = src.Int(1, 4);
    std::vector<Matrix> covs;
    for (int i = 0, l = src.Int(1, 4); i < l; ++i) covs.push_back(src.Spd(n));
    const SensitivityProfile sp = ComputeSensitivityProfile(covs);
    EXPECT_GE(sp.delta2 + 1e-12, sp.p_max - sp.p_min);
    EXPECT_LE(sp.p_min, sp.p_max);
  }
}

TEST(ZetaBoundTest, Arithmetic) {
  EXPECT_NEAR(ZetaBound({0.9, 0.2}, 2), std::sqrt(7.72) / 0.4, 1e-12);
  EXPECT_NEAR(ZetaBound({0.9, 0.2}, 2), 6.9462, 1e-4);
  EXPECT_NEAR(ZetaBound({0.8, 0.2}, 1), std::sqrt(2.72) / 0.4, 1e-12);
}

TEST(IntrinsicThresholdTest, ZeroSensitivity) {
  EXPECT_EQ(IntrinsicThreshold({0.0, 1.0, 1.0}, {0.5, 0.1}, 3), 0.0);
}

TEST(IntrinsicThresholdTest, ScalarOxygenBudget) {
  const SensitivityProfile sp{0.0152, 0.2435, 0.2587};
  const double t = IntrinsicThreshold(sp, {0.8, 0.2}, 1);
  EXPECT_NEAR(t, std::sqrt(2.72) / 0.32 * 0.0152, 1e-12);
  EXPECT_NEAR(t, 0.0783, 1e-4);
}

TEST(IntrinsicThresholdTest, HighDimensionalUnitSensitivity) {
  const SensitivityProfile sp{1.0, 1.0, 2.0};
  EXPECT_NEAR(IntrinsicThreshold(sp, {0.9, 0.2}, 2), std::sqrt(7.72) / 0.36,
              1e-12);
  EXPECT_NEAR(IntrinsicThreshold(sp, {0.9, 0.2}, 2), 7.7180, 1e-4);
}

TEST(IntrinsicThresholdTest, BudgetRanges) {
  const SensitivityProfile sp{0.1, 1.0, 1.1};
  EXPECT_THROW(IntrinsicThreshold(sp, {1.0, 0.2}, 2), BudgetOutOfRange);
  EXPECT_THROW(IntrinsicThreshold(sp, {1.5, 0.2}, 2), BudgetOutOfRange);
  EXPECT_NO_THROW(IntrinsicThreshold(sp, {1.5, 0.2}, 1));
  EXPECT_THROW(IntrinsicThreshold(sp, {0.0, 0.2}, 1), BudgetOutOfRange);
  EXPECT_THROW(IntrinsicThreshold(sp, {0.5, 0.0}, 1), BudgetOutOfRange);
  EXPECT_THROW(IntrinsicThreshold(sp, {0.5, 1.0}, 1), BudgetOutOfRange);
}

TEST(IntrinsicThresholdTest, HighDimensionalFormReducesAtOne) {
  const SensitivityProfile sp{0.3, 1.0, 1.3};
  EXPECT_EQ(IntrinsicThresholdForDim(sp, {0.5, 0.1}, 1),
            IntrinsicThreshold(sp, {0.5, 0.1}, 1));
}

TEST(IntrinsicThresholdTest, MonotonicityGridProperty) {
  const double eps[] = {0.05, 0.2, 0.5, 0.8, 0.95};
  const double del[] = {0.01, 0.05, 0.2, 0.5, 0.9};
  const double d2[] = {0.01, 0.1, 1.0, 5.0};
  for (int n : {1, 2, 4}) {
    for (double e : eps) {
      for (double d : del) {
        for (std::size_t k = 0; k + 1 < std::size(d2); ++k) {
          EXPECT_LT(IntrinsicThreshold({d2[k], 1, 1}, {e, d}, n),
                    IntrinsicThreshold({d2[k + 1], 1, 1}, {e, d}, n));
        }
      }
      for (std::size_t k = 0; k + 1 < std::size(del); ++k) {
        EXPECT_GT(IntrinsicThreshold({1.0, 1, 1}, {e, del[k]}, n),
                  IntrinsicThreshold({1.0, 1, 1}, {e, del[k + 1]}, n));
      }
    }
    for (double d : del) {
      for (std::size_t k = 0; k + 1 < std::size(eps); ++k) {
        EXPECT_GT(IntrinsicThreshold({1.0, 1, 1}, {eps[k], d}, n),
                  IntrinsicThreshold({1.0, 1, 1}, {eps[k + 1], d}, n));
      }
    }
  }
}

TEST(PlanMechanismTest, OxygenIsIntrinsic) {
  const SensitivityProfile sp =
      ComputeSensitivityProfile(AssembleEnsemble(OxygenModel()));
  const MechanismPlan plan = PlanMechanism(sp, {0.8, 0.2}, 1);
  EXPECT_EQ(plan.kind, MechanismKind::kIntrinsic);
  EXPECT_EQ(plan.q_a, 0.0);
  EXPECT_LT(plan.threshold, sp.p_min);
  EXPECT_NEAR(plan.threshold, 0.0785, 1e-4);
}

TEST(PlanMechanismTest, TrackingIsGaussianAtTheBound) {
  const SensitivityProfile sp =
      ComputeSensitivityProfile(AssembleEnsemble(TrackingModel()));
  const MechanismPlan plan = PlanMechanism(sp, {0.9, 0.2}, 2);
  EXPECT_EQ(plan.kind, MechanismKind::kGaussian);
  EXPECT_GE(plan.threshold, sp.p_min);
  EXPECT_EQ(plan.zeta, plan.zeta_bound);
  EXPECT_NEAR(plan.zeta, 6.946221995, 1e-8);
  EXPECT_NEAR(plan.q_a, plan.zeta * sp.delta2 / 0.9 - sp.p_min, 1e-12);
  EXPECT_NEAR(plan.q_a, 0.46738738, 1e-7);
}

TEST(PlanMechanismTest, MarginScalesZeta) {
  const SensitivityProfile sp{0.1, 0.1, 0.2};
  const MechanismPlan plan = PlanMechanism(sp, {0.5, 0.2}, 2, 0.1);
  EXPECT_NEAR(plan.zeta, 1.1 * plan.zeta_bound, 1e-12);
  EXPECT_THROW(PlanMechanism(sp, {0.5, 0.2}, 2, -0.1), InvalidInput);
}

TEST(PlanMechanismTest, ZeroSensitivity) {
  EXPECT_EQ(PlanMechanism({0.0, 0.5, 0.5}, {0.3, 0.01}, 3).kind,
            MechanismKind::kIntrinsic);
  EXPECT_THROW(PlanMechanism({0.0, 0.0, 0.0}, {0.3, 0.01}, 1), InvalidInput);
}

TEST(PlanMechanismTest, TrackingOutOfRangeBudget) {
  const SensitivityProfile sp =
      ComputeSensitivityProfile(AssembleEnsemble(TrackingModel()));
  EXPECT_THROW(PlanMechanism(sp, {1.5, 0.2}, 2), BudgetOutOfRange);
}

TEST(PlanMechanismTest, CalibrationSufficiencyProperty) {
  gen::Source src(52);
  int gaussian = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = src.Int(1, 3);
    std::vector<Matrix> covs;
    for (int i = 0, l = src.Int(2, 3); i < l; ++i) {
      covs.push_back(src.Spd(n, 0.05, 2.0));
    }
    const PrivacyBudget b{src.Uniform(0.2, 0.95), src.Uniform(0.05, 0.5)};
    const SensitivityProfile sp = ComputeSensitivityProfile(covs);
    const MechanismPlan plan = PlanMechanism(sp, b, n);
    if (plan.kind != MechanismKind::kGaussian) continue;
    ++gaussian;
    std::vector<Matrix> perturbed;
    for (const Matrix& p : covs) {
      perturbed.push_back(p + plan.q_a * Matrix::Identity(n, n));
    }
    const SensitivityProfile after = ComputeSensitivityProfile(perturbed);
    EXPECT_NEAR(after.delta2, sp.delta2, 1e-9);
    EXPECT_NEAR(after.p_min, sp.p_min + plan.q_a, 1e-9);
    EXPECT_GE(after.p_min + 1e-12, plan.zeta * sp.delta2 / b.epsilon);
    const PrivacyReport r =
        EmpiricalPrivacyCheck(perturbed, b, 10000, RandomStream(trial));
    EXPECT_TRUE(r.pass) << "trial " << trial << " max " << r.max_fraction;
  }
  EXPECT_GT(gaussian, 10);
}

TEST(PerturbEstimateTest, ZeroNoiseIsIdentityAndDrawsNothing) {
  RandomStream rng(3);
  RandomStream untouched(3);
  const Vector x = Vector::LinSpaced(3, -1.0, 1.0);
  EXPECT_EQ(PerturbEstimate(x, 0.0, rng), x);
  EXPECT_EQ(rng(), untouched());
  EXPECT_THROW(PerturbEstimate(x, -1.0, rng), InvalidInput);
}

TEST(PerturbEstimateTest, ReproducibleAndCorrectCovariance) {
  RandomStream a(5);
  RandomStream b(5);
  const Vector x = Vector::Zero(2);
  const double q_a = 0.4674;
  const int n = 100000;
  Matrix acc = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector y = PerturbEstimate(x, q_a, a);
    ASSERT_EQ(y, PerturbEstimate(x, q_a, b));
    acc += y * y.transpose();
  }
  acc /= n;
  const Matrix expected = q_a * Matrix::Identity(2, 2);
  EXPECT_LT((acc - expected).norm() / expected.norm(), 0.03);
}

TEST(PrivacyLossTest, EqualCovariancesGiveZero) {
  gen::Source src(53);
  const Matrix p = src.Spd(3);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(PrivacyLoss(src.Gaussian(3, 1), Vector::Zero(3), p, p), 0.0);
  }
}

TEST(PrivacyLossTest, ScalarExamples) {
  const Vector zero = Vector::Zero(1);
  EXPECT_NEAR(PrivacyLoss(zero, zero, Scalar(1.0), Scalar(std::exp(2.0))), 1.0,
              1e-14);
  const Vector one = Vector::Ones(1);
  EXPECT_NEAR(PrivacyLoss(one, zero, Scalar(0.2435), Scalar(0.2587)), 0.0904,
              1e-4);
  EXPECT_NEAR(PrivacyLoss(one, zero, Scalar(0.2435), Scalar(0.2587)),
              oracle::ScalarPrivacyLoss(1.0, 0.2435, 0.2587), 1e-13);
}

TEST(PrivacyLossTest, MatchesDensityRatio) {
  gen::Source src(54);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = src.Int(1, 4);
    const Matrix pi = src.Spd(n);
    const Matrix pj = src.Spd(n);
    const Vector x = src.Gaussian(n, 1);
    const Vector big_x = src.Gaussian(n, 1);
    const Vector d = big_x - x;
    const double li = -0.5 * std::log(pi.determinant()) -
                      0.5 * d.dot(pi.inverse() * d);
    const double lj = -0.5 * std::log(pj.determinant()) -
                      0.5 * d.dot(pj.inverse() * d);
    EXPECT_NEAR(PrivacyLoss(big_x, x, pi, pj), std::fabs(li - lj), 1e-9);
  }
}

TEST(PrivacyLossTest, SymmetryProperty) {
  gen::Source src(55);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = src.Int(1, 4);
    const Matrix pi = src.Spd(n);
    const Matrix pj = src.Spd(n);
    const Vector big_x = src.Gaussian(n, 1);
    const Vector x = src.Gaussian(n, 1);
    EXPECT_NEAR(PrivacyLoss(big_x, x, pi, pj), PrivacyLoss(big_x, x, pj, pi),
                1e-12);
  }
}

TEST(PrivacyLossTest, RejectsNonPositiveDefinite) {
  const Vector z = Vector::Zero(2);
  Matrix bad(2, 2);
  bad << 1.0, 0.0, 0.0, 0.0;
  EXPECT_THROW(PrivacyLoss(z, z, Matrix::Identity(2, 2), bad), InvalidInput);
  EXPECT_THROW(PrivacyLoss(Vector::Zero(1), Vector::Zero(1), Scalar(-1.0),
                           Scalar(1.0)),
               InvalidInput);
}

TEST(ExceedanceRegionTest, EqualVariancesAreEmpty) {
  EXPECT_TRUE(ExceedanceRegion1d(0.5, 0.5, 0.1).empty());
}

TEST(ExceedanceRegionTest, OxygenPair) {
  const std::vector<Interval> r = ExceedanceRegion1d(0.2435, 0.2587, 0.8);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(std::isinf(r[0].lower));
  EXPECT_TRUE(std::isinf(r[1].upper));
  EXPECT_NEAR(r[1].lower, 2.6233, 5e-4);
  EXPECT_EQ(r[0].upper, -r[1].lower);
}

TEST(ExceedanceRegionTest, LargeRatioCoversOrigin) {
  // P_j / P_i > e^{2 eps} puts the loss above eps at d = 0.
  const std::vector<Interval> r = ExceedanceRegion1d(1.0, 4.0, 0.5);
  bool covers_zero = false;
  for (const Interval& iv : r) covers_zero |= iv.lower < 0.0 && iv.upper > 0.0;
  EXPECT_TRUE(covers_zero);
  EXPECT_GT(oracle::ScalarPrivacyLoss(0.0, 1.0, 4.0), 0.5);
}

TEST(ExceedanceRegionTest, AgreesWithGridScanProperty) {
  gen::Source src(56);
  for (int trial = 0; trial < 100; ++trial) {
    const double pi = src.Uniform(0.05, 2.0);
    const double pj = src.Uniform(0.05, 2.0);
    const double eps = src.Uniform(0.05, 1.5);
    const double span = 10.0 * std::sqrt(std::max(pi, pj));
    const int cells = 10000;
    const double cell = 2.0 * span / cells;
    std::vector<double> bounds;
    for (const Interval& iv : ExceedanceRegion1d(pi, pj, eps)) {
      if (std::isfinite(iv.lower) && std::fabs(iv.lower) < span) {
        bounds.push_back(iv.lower);
      }
      if (std::isfinite(iv.upper) && std::fabs(iv.upper) < span) {
        bounds.push_back(iv.upper);
      }
    }
    const std::vector<double> scanned =
        oracle::ScanExceedanceBoundaries(pi, pj, eps, span, cells);
    ASSERT_EQ(bounds.size(), scanned.size()) << pi << " " << pj << " " << eps;
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      EXPECT_LE(std::fabs(bounds[k] - scanned[k]), cell);
    }
  }
}

TEST(GaussianMassTest, TailOracle) {
  const std::vector<Interval> r = ExceedanceRegion1d(0.2435, 0.2587, 0.8);
  const double z = r[1].lower / std::sqrt(0.2435);
  EXPECT_NEAR(z, 5.316, 1e-3);
  EXPECT_NEAR(GaussianMass1d(r, 0.2435), oracle::TwoSidedNormalTail(z),
              1e-20);
  EXPECT_NEAR(GaussianMass1d({{-1.0, 1.0}}, 1.0),
              1.0 - oracle::TwoSidedNormalTail(1.0), 1e-15);
}

TEST(EmpiricalPrivacyCheckTest, IdenticalCovariancesNeverExceed) {
  const Matrix p = gen::Source(5).Spd(2);
  const PrivacyReport r =
      EmpiricalPrivacyCheck({p, p}, {0.5, 0.1}, 10000, RandomStream(1));
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.max_fraction, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(EmpiricalPrivacyCheckTest, OxygenIntrinsicPasses) {
  const auto covs = OutputCovariances(AssembleEnsemble(OxygenModel()), 0.0);
  const PrivacyReport r =
      EmpiricalPrivacyCheck(covs, {0.8, 0.2}, 100000, RandomStream(42));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_fraction, 1e-4);
  EXPECT_NEAR(r.limit, 0.2 + 3 * std::sqrt(0.2 * 0.8 / 1e5), 1e-15);
}

TEST(EmpiricalPrivacyCheckTest, TrackingCalibratedPasses) {
  const Calibration cal = Calibrate(TrackingModel(), {0.9, 0.2}, {}, 0.0);
  const PrivacyReport r = EmpiricalPrivacyCheck(
      OutputCovariances(cal.ensemble, cal.applied_q_a), {0.9, 0.2}, 100000,
      RandomStream(42));
  EXPECT_TRUE(r.pass);
}

TEST(EmpiricalPrivacyCheckTest, MatchesAnalyticFraction) {
  // A pair with substantial exceedance mass: compare against the exact
  // interval probability.
  const double pi = 1.0;
  const double pj = 2.0;
  const double eps = 0.2;
  const PrivacyReport r = EmpiricalPrivacyCheck({Scalar(pi), Scalar(pj)},
                                                {eps, 0.3}, 100000,
                                                RandomStream(17));
  const double exact = GaussianMass1d(ExceedanceRegion1d(pi, pj, eps), pi);
  const double se = std::sqrt(exact * (1 - exact) / 1e5);
  EXPECT_NEAR(r.pairs[0].fraction, exact, 4 * se);
}

TEST(EmpiricalPrivacyCheckTest, ThreadCountDoesNotChangeResult) {
  const Calibration cal = Calibrate(TrackingModel(), {0.9, 0.2}, {}, 0.0);
  const auto covs = OutputCovariances(cal.ensemble, 0.0);
  const PrivacyReport one =
      EmpiricalPrivacyCheck(covs, {0.9, 0.2}, 50000, RandomStream(9), 1);
  const PrivacyReport four =
      EmpiricalPrivacyCheck(covs, {0.9, 0.2}, 50000, RandomStream(9), 4);
  ASSERT_EQ(one.pairs.size(), four.pairs.size());
  for (std::size_t k = 0; k < one.pairs.size(); ++k) {
    EXPECT_EQ(one.pairs[k].exceedances, four.pairs[k].exceedances);
  }
}

TEST(EmpiricalPrivacyCheckTest, RejectsTooFewSamples) {
  EXPECT_THROW(EmpiricalPrivacyCheck({Scalar(1), Scalar(2)}, {0.5, 0.1}, 100,
                                     RandomStream(1)),
               InvalidInput);
}

TEST(PostProcessingTest, FusionWeightMapsDoNotIncreaseExceedance) {
  for (const Scenario& s : {BuildOxygenScenario(), BuildTrackingScenario()}) {
    const Calibration cal =
        Calibrate(s.model, s.budget, s.solver, s.zeta_margin);
    const auto covs = OutputCovariances(cal.ensemble, cal.applied_q_a);
    const std::int64_t samples = 100000;
    const PrivacyReport before =
        EmpiricalPrivacyCheck(covs, s.budget, samples, RandomStream(1));
    const double tol = 3.0 * std::sqrt(s.budget.delta *
                                       (1.0 - s.budget.delta) / samples);
    for (const Matrix& w : cal.perturbed_weights.blocks) {
      const PrivacyReport after = EmpiricalPrivacyCheck(
          LinearPostProcess(covs, w), s.budget, samples, RandomStream(2));
      EXPECT_LE(after.max_fraction, before.max_fraction + tol) << s.name;
    }
  }
}

TEST(PostProcessingTest, RandomLinearMapsProperty) {
  gen::Source src(57);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = src.Int(1, 3);
    std::vector<Matrix> covs = {src.Spd(n, 0.5, 1.0), src.Spd(n, 0.5, 1.0)};
    const PrivacyBudget b{0.3, 0.2};
    const std::int64_t samples = 20000;
    const PrivacyReport before =
        EmpiricalPrivacyCheck(covs, b, samples, RandomStream(trial));
    const PrivacyReport after = EmpiricalPrivacyCheck(
        LinearPostProcess(covs, src.Invertible(n)), b, samples,
        RandomStream(100 + trial));
    const double tol = 4.0 * std::sqrt(0.25 / samples);
    EXPECT_LE(after.max_fraction, before.max_fraction + tol);
  }
}

TEST(ChebyshevTest, ScalarUnitVariance) {
  const ChebyshevCheck c =
      ChebyshevBoundCheck(Matrix::Identity(1, 1), 1.0, 100000, RandomStream(1));
  EXPECT_DOUBLE_EQ(c.bound, 1.0);
  EXPECT_NEAR(c.empirical, oracle::TwoSidedNormalTail(1.0), 0.005);
  EXPECT_NEAR(c.empirical, 0.3173, 0.005);
}

TEST(ChebyshevTest, TwoDimensionalChiSquareTail) {
  const ChebyshevCheck c = ChebyshevBoundCheck(
      Matrix::Identity(2, 2), std::sqrt(10.0), 100000, RandomStream(2));
  EXPECT_NEAR(c.bound, 0.2, 1e-15);
  EXPECT_NEAR(c.empirical, std::exp(-5.0), 0.0015);
  EXPECT_LE(c.empirical, c.bound);
}

TEST(ChebyshevTest, LargeThresholdVanishes) {
  const ChebyshevCheck c =
      ChebyshevBoundCheck(gen::Source(3).Spd(3), 1e3, 10000, RandomStream(3));
  EXPECT_EQ(c.empirical, 0.0);
  EXPECT_LT(c.bound, 1e-5);
}

TEST(ChebyshevTest, BoundHoldsProperty) {
  gen::Source src(58);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix p = src.Spd(src.Int(1, 3));
    const double t = src.Uniform(0.5, 4.0);
    const ChebyshevCheck c =
        ChebyshevBoundCheck(p, t, 20000, RandomStream(trial));
    EXPECT_LE(c.empirical, c.bound + 0.02);
  }
}

}  // namespace
}  // namespace dpfusion
