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

#ifndef DPFUSION_PRIVACY_HPP_
#define DPFUSION_PRIVACY_HPP_

#include <cstdint>
#include <vector>

#include "dpfusion/local_estimator.hpp"
#include "dpfusion/matrix_core.hpp"
#include "dpfusion/random.hpp"

namespace dpfusion {

// (epsilon, delta) budget of the local privacy guarantee. Valid when
// epsilon > 0 and 0 < delta < 1; for state dimension above one the
// high-dimensional conditions additionally need epsilon < 1.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Throws BudgetOutOfRange naming the violated range.
void ValidateBudget(const PrivacyBudget& b, int state_dim);

// l2-sensitivity and extreme norms of the steady estimation covariances.
struct SensitivityProfile {
  double delta2 = 0.0;  // max_{i,j} ||P_ii - P_jj||_2
  double p_min = 0.0;   // min_i ||P_ii||_2
  double p_max = 0.0;   // max_i ||P_ii||_2
};

SensitivityProfile ComputeSensitivityProfile(const std::vector<Matrix>& covs);
SensitivityProfile ComputeSensitivityProfile(const CovarianceEnsemble& ens);

// sqrt((delta + n)^2 + 8 n epsilon delta) / (2 delta). With n = 1 this is the
// one-dimensional bound; the dispatching functions below pick n = 1 for scalar
// states and n = state_dim otherwise, which coincide at n = 1.
double ZetaBoundForDim(const PrivacyBudget& b, int n);
// Delta_2 * ZetaBoundForDim(b, n) / epsilon.
double IntrinsicThresholdForDim(const SensitivityProfile& sp,
                                const PrivacyBudget& b, int n);

// Budget-validated entry points; n_x > 1 with epsilon >= 1 throws
// BudgetOutOfRange.
double ZetaBound(const PrivacyBudget& b, int state_dim);
double IntrinsicThreshold(const SensitivityProfile& sp, const PrivacyBudget& b,
                          int state_dim);

enum class MechanismKind { kIntrinsic, kGaussian };

const char* MechanismKindName(MechanismKind kind);

struct MechanismPlan {
  MechanismKind kind = MechanismKind::kIntrinsic;
  double q_a = 0.0;         // injected isotropic noise variance
  double zeta = 0.0;        // zeta actually used (Gaussian only)
  double zeta_bound = 0.0;  // lower bound zeta must exceed
  double threshold = 0.0;   // right-hand side of the intrinsic condition
};

// Intrinsic when p_min exceeds the intrinsic threshold. Otherwise Gaussian
// with zeta = (1 + zeta_margin) * ZetaBound and
// q_a = max(0, zeta * Delta_2 / epsilon - p_min).
//
// A zero-sensitivity profile with p_min == 0 describes a deterministic system
// and is rejected with InvalidInput.
MechanismPlan PlanMechanism(const SensitivityProfile& sp,
                            const PrivacyBudget& b, int state_dim,
                            double zeta_margin = 0.0);

// x_hat + a with a ~ N(0, q_a I). q_a == 0 returns the input unchanged and
// consumes no randomness.
Vector PerturbEstimate(const Vector& x_hat, double q_a, RandomStream& rng);

// Absolute log ratio of N(X; x, P_i) and N(X; x, P_j), with the Gaussian
// factors cached for repeated evaluation.
class PrivacyLossEvaluator {
 public:
  PrivacyLossEvaluator(const Matrix& p_i, const Matrix& p_j);

  // Loss at offset d = X - x.
  double operator()(const Vector& d) const;

 private:
  Eigen::LLT<Matrix> chol_i_;
  Eigen::LLT<Matrix> chol_j_;
  double half_log_det_ratio_ = 0.0;  // 0.5 * ln(|P_j| / |P_i|)
};

// |0.5 ln(|P_j|/|P_i|) - 0.5 (X - x)^T (P_i^-1 - P_j^-1) (X - x)|.
// Throws InvalidInput unless both covariances are positive definite and
// dimensions agree.
double PrivacyLoss(const Vector& big_x, const Vector& x, const Matrix& p_i,
                   const Matrix& p_j);

// Open interval (lower, upper) of X - x; bounds may be infinite.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Offsets X - x where the scalar privacy loss exceeds eps, as disjoint
// intervals sorted by lower bound. Empty when p_i == p_j.
std::vector<Interval> ExceedanceRegion1d(double p_i, double p_j, double eps);

// Probability that N(0, p) falls in the given intervals.
double GaussianMass1d(const std::vector<Interval>& region, double p);

struct PairExceedance {
  int i = 0;
  int j = 0;
  std::int64_t samples = 0;
  std::int64_t exceedances = 0;
  double fraction = 0.0;
};

struct PrivacyReport {
  std::vector<PairExceedance> pairs;  // ordered pairs i != j
  double max_fraction = 0.0;
  double limit = 0.0;  // delta + 3 sqrt(delta (1 - delta) / samples)
  bool pass = false;
};

inline constexpr std::int64_t kMinPrivacySamples = 10000;

// For every ordered pair (i, j) draws X - x ~ N(0, covs[i]) and counts the
// draws whose loss against covs[j] exceeds epsilon. Samples are sharded onto
// independent substreams and merged in shard order, so the result does not
// depend on `threads`.
PrivacyReport EmpiricalPrivacyCheck(const std::vector<Matrix>& covs,
                                    const PrivacyBudget& b,
                                    std::int64_t samples,
                                    const RandomStream& rng, int threads = 1);

// Diagonal blocks of the ensemble, each shifted by q_a I.
std::vector<Matrix> OutputCovariances(const CovarianceEnsemble& ens,
                                      double q_a);

// F P F^T for every covariance: the output law after the linear map F.
std::vector<Matrix> LinearPostProcess(const std::vector<Matrix>& covs,
                                      const Matrix& map);

struct ChebyshevCheck {
  double empirical = 0.0;  // fraction of draws with ||x - mu||^2 > t^2
  double bound = 0.0;      // tr(P) / t^2
};

ChebyshevCheck ChebyshevBoundCheck(const Matrix& p, double t,
                                   std::int64_t samples,
                                   const RandomStream& rng);

}  // namespace dpfusion

#endif  // DPFUSION_PRIVACY_HPP_
