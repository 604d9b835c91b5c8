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


#include "dpfusion/fusion.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dpfusion/error.hpp"
#include "dpfusion/log.hpp"
#include "dpfusion/simulation.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace dpfusion {
namespace {

Matrix Stacked2(double p11, double p22, double p12) {
  Matrix m(2, 2);
  m << p11, p12, p12, p22;
  return m;
}

Matrix BlockSum(const FusionWeights& w) {
  Matrix sum = Matrix::Zero(w.blocks[0].rows(), w.blocks[0].cols());
  for (const Matrix& b : w.blocks) sum += b;
  return sum;
}

// Captures warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture()
      : previous_(SetWarningSink(
            [this](std::string_view m) { messages_.emplace_back(m); })) {}
  ~WarningCapture() { SetWarningSink(previous_); }
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

TEST(FusionWeightsTest, IdenticalIndependentBlocksAverage) {
  const Matrix p = gen::Source(1).Spd(2);
  const int l = 3;
  Matrix stacked = Matrix::Zero(2 * l, 2 * l);
  for (int i = 0; i < l; ++i) stacked.block(2 * i, 2 * i, 2, 2) = p;
  const FusionWeights w = ComputeFusionWeights(stacked, 2, l);
  for (const Matrix& b : w.blocks) {
    EXPECT_LE((b - Matrix::Identity(2, 2) / l).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FusionWeightsTest, InverseVarianceClosedForm) {
  const FusionWeights w = ComputeFusionWeights(Stacked2(1, 2, 0), 1, 2);
  EXPECT_NEAR(w.blocks[0](0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(w.blocks[1](0, 0), 1.0 / 3.0, 1e-15);
}

TEST(FusionWeightsTest, CorrelatedClosedForm) {
  const FusionWeights w = ComputeFusionWeights(Stacked2(1, 2, 0.5), 1, 2);
  EXPECT_NEAR(w.blocks[0](0, 0), 0.75, 1e-15);
  EXPECT_NEAR(w.blocks[1](0, 0), 0.25, 1e-15);
}

TEST(FusionWeightsTest, ScalarClosedFormProperty) {
  gen::Source src(61);
  for (int trial = 0; trial < 100; ++trial) {
    const double p11 = src.Uniform(0.05, 2.0);
    const double p22 = src.Uniform(0.05, 2.0);
    const double p12 =
        src.Uniform(-0.9, 0.9) * std::sqrt(p11 * p22);
    const FusionWeights w = ComputeFusionWeights(Stacked2(p11, p22, p12), 1, 2);
    EXPECT_NEAR(w.blocks[0](0, 0), oracle::ScalarFusionWeight(p11, p22, p12),
                1e-9);
    EXPECT_NEAR(FusedCovariance(w, Stacked2(p11, p22, p12))(0, 0),
                oracle::ScalarFusedVariance(p11, p22, p12), 1e-9);
  }
}

TEST(FusionWeightsTest, OxygenScalarSystemsProperty) {
  // Riccati-derived ensembles of random scalar two-sensor systems.
  gen::Source src(62);
  for (int trial = 0; trial < 100; ++trial) {
    SystemModel m;
    m.a = Matrix::Constant(1, 1, src.Uniform(-0.99, 0.99));
    m.b = Matrix::Identity(1, 1);
    m.q_w = Matrix::Constant(1, 1, src.Uniform(0.05, 2.0));
    for (int i = 0; i < 2; ++i) {
      m.sensors.push_back({Matrix::Constant(1, 1, src.Uniform(0.3, 2.0)),
                           Matrix::Identity(1, 1),
                           Matrix::Constant(1, 1, src.Uniform(0.05, 2.0))});
    }
    const CovarianceEnsemble ens = AssembleEnsemble(m);
    const FusionWeights w = ComputeFusionWeights(ens.stacked, 1, 2);
    EXPECT_NEAR(w.blocks[0](0, 0),
                oracle::ScalarFusionWeight(ens.stacked(0, 0),
                                           ens.stacked(1, 1),
                                           ens.stacked(0, 1)),
                1e-9);
  }
}

TEST(FusionWeightsTest, BlocksSumToIdentityProperty) {
  gen::Source src(63);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = src.Int(1, 3);
    const int l = src.Int(1, 4);
    const Matrix stacked = src.Spd(n * l, 0.05, 3.0);
    const FusionWeights w = ComputeFusionWeights(stacked, n, l);
    EXPECT_LE((BlockSum(w) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(),
              1e-9);
  }
}

TEST(FusionWeightsTest, OptimalityProperty) {
  gen::Source src(64);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = src.Int(1, 3);
    const int l = src.Int(2, 3);
    const Matrix stacked = src.Spd(n * l, 0.05, 3.0);
    const FusionWeights w = ComputeFusionWeights(stacked, n, l);
    const double best = FusedCovariance(w, stacked).trace();
    for (int i = 0; i < l; ++i) {
      EXPECT_LE(best, stacked.block(i * n, i * n, n, n).trace() + 1e-12);
    }
    for (int k = 0; k < 1000; ++k) {
      // Feasible perturbation: blocks that sum to zero.
      FusionWeights alt = w;
      Matrix total = Matrix::Zero(n, n);
      const double scale = src.Uniform(1e-3, 1.0);
      for (int i = 0; i + 1 < l; ++i) {
        const Matrix d = scale * src.Gaussian(n, n);
        alt.blocks[i] += d;
        total += d;
      }
      alt.blocks[l - 1] -= total;
      EXPECT_LE(best, FusedCovariance(alt, stacked).trace() + 1e-12);
    }
  }
}

TEST(FusionWeightsTest, FirstOrderStationarity) {
  gen::Source src(65);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = src.Int(1, 3);
    const int l = src.Int(2, 3);
    const Matrix stacked = src.Spd(n * l, 0.2, 2.0);
    const FusionWeights w = ComputeFusionWeights(stacked, n, l);
    const double base = FusedCovariance(w, stacked).trace();
    const Matrix d = src.Gaussian(n, n);
    for (double h : {1e-4, 2e-4}) {
      FusionWeights plus = w;
      FusionWeights minus = w;
      plus.blocks[0] += h * d;
      plus.blocks[1] -= h * d;
      minus.blocks[0] -= h * d;
      minus.blocks[1] += h * d;
      const double up = FusedCovariance(plus, stacked).trace() - base;
      const double down = FusedCovariance(minus, stacked).trace() - base;
      // A vanishing gradient makes the change symmetric and O(h^2).
      EXPECT_NEAR(up, down, 1e-12);
      EXPECT_LE(up, 50.0 * h * h * d.squaredNorm() * stacked.norm());
    }
  }
}

TEST(FusionWeightsTest, DuplicatedSensorsJitterWithWarning) {
  const Matrix p = gen::Source(2).Spd(2);
  Matrix stacked(4, 4);
  stacked << p, p, p, p;
  WarningCapture capture;
  const FusionWeights w = ComputeFusionWeights(stacked, 2, 2);
  EXPECT_TRUE(w.jittered);
  ASSERT_EQ(capture.messages().size(), 1u);
  EXPECT_NE(capture.messages()[0].find("jitter"), std::string::npos);
  EXPECT_LE((BlockSum(w) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(),
            1e-9);
  EXPECT_LE((FusedCovariance(w, stacked) - p).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FusionWeightsTest, SingularAfterJitterThrows) {
  WarningCapture capture;
  EXPECT_THROW(ComputeFusionWeights(Matrix::Zero(2, 2), 1, 2), SingularMatrix);
}

TEST(FusionWeightsTest, BadShapes) {
  EXPECT_THROW(ComputeFusionWeights(Matrix::Identity(3, 3), 2, 2),
               InvalidInput);
  EXPECT_THROW(ComputeFusionWeights(Matrix::Identity(2, 2), 0, 2),
               InvalidInput);
}

TEST(PerturbedStackedCovTest, Examples) {
  const CovarianceEnsemble ens = AssembleEnsemble(OxygenModel());
  EXPECT_EQ(PerturbedStackedCov(ens, 0.0), ens.stacked);
  const Matrix p = PerturbedStackedCov(ens, 0.1);
  EXPECT_NEAR(p(0, 0), 0.3435, 1e-4);
  EXPECT_NEAR(p(1, 1), 0.3587, 1e-4);
  EXPECT_EQ(p(0, 1), ens.stacked(0, 1));
  EXPECT_THROW(PerturbedStackedCov(ens, -0.1), InvalidInput);
}

TEST(PerturbedStackedCovTest, StaysSymmetricPsdProperty) {
  gen::Source src(66);
  for (int trial = 0; trial < 30; ++trial) {
    const CovarianceEnsemble ens =
        AssembleEnsemble(src.StableModel(src.Int(1, 3), src.Int(1, 3)));
    const Matrix p = PerturbedStackedCov(ens, src.Uniform(0.0, 2.0));
    EXPECT_TRUE(IsSymmetric(p));
    EXPECT_GE(SymEigExtremes(p).lambda_min, -1e-8);
  }
}

TEST(FuseTest, EqualEstimatesPassThrough) {
  gen::Source src(67);
  const FusionWeights w = ComputeFusionWeights(src.Spd(6), 2, 3);
  const Vector v = Vector::LinSpaced(2, -3.0, 5.0);
  EXPECT_LE((Fuse(w, {v, v, v}) - v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FuseTest, Arithmetic) {
  const FusionWeights w = ComputeFusionWeights(Stacked2(1, 2, 0), 1, 2);
  EXPECT_NEAR(Fuse(w, {Vector::Constant(1, 3.0), Vector::Zero(1)})(0), 2.0,
              1e-15);
}

TEST(FuseTest, PermutationConsistency) {
  gen::Source src(68);
  const int n = 2;
  const Matrix stacked = src.Spd(3 * n);
  const FusionWeights w = ComputeFusionWeights(stacked, n, 3);
  const std::vector<Vector> est = {src.Gaussian(n, 1), src.Gaussian(n, 1),
                                   src.Gaussian(n, 1)};
  // Sensor order (2, 0, 1).
  const int perm[] = {2, 0, 1};
  Matrix permuted(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      permuted.block(i * n, j * n, n, n) =
          stacked.block(perm[i] * n, perm[j] * n, n, n);
    }
  }
  const FusionWeights wp = ComputeFusionWeights(permuted, n, 3);
  const std::vector<Vector> est_p = {est[2], est[0], est[1]};
  EXPECT_LE((Fuse(w, est) - Fuse(wp, est_p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FuseTest, CountMismatch) {
  const FusionWeights w = ComputeFusionWeights(Stacked2(1, 2, 0), 1, 2);
  EXPECT_THROW(Fuse(w, {Vector::Zero(1)}), InvalidInput);
}

TEST(FusedCovarianceTest, SingleSensorIsItsPosterior) {
  const Matrix p = gen::Source(3).Spd(2);
  const FusionWeights w = ComputeFusionWeights(p, 2, 1);
  EXPECT_LE((FusedCovariance(w, p) - p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FusedCovarianceTest, IndependentScalars) {
  const FusionWeights w = ComputeFusionWeights(Stacked2(1, 2, 0), 1, 2);
  EXPECT_NEAR(FusedCovariance(w, Stacked2(1, 2, 0))(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(FusedCovarianceTest, OxygenBeatsBestLocal) {
  const CovarianceEnsemble ens = AssembleEnsemble(OxygenModel());
  const FusionWeights w = ComputeFusionWeights(ens.stacked, 1, 2);
  EXPECT_LE(FusedCovariance(w, ens.stacked).trace(), 0.2435);
}

}  // namespace
}  // namespace dpfusion
