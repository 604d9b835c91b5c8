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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "dpfusion/error.hpp"

namespace dpfusion {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kShardSize = 8192;

void RequireBasicBudget(const PrivacyBudget& b) {
  if (!(b.epsilon > 0.0) || !std::isfinite(b.epsilon)) {
    throw BudgetOutOfRange("epsilon must be > 0 (got " +
                           std::to_string(b.epsilon) + ")");
  }
  if (!(b.delta > 0.0 && b.delta < 1.0)) {
    throw BudgetOutOfRange("delta must lie in (0, 1) (got " +
                           std::to_string(b.delta) + ")");
  }
}

// {t >= 0 : a + slope * t > level} for slope != 0, as [lo, hi) in t.
void AppendAbove(double a, double slope, double level,
                 std::vector<Interval>* out) {
  const double root = (level - a) / slope;
  if (slope > 0.0) {
    out->push_back({std::max(0.0, root), kInf});
  } else if (root > 0.0) {
    out->push_back({0.0, root});
  }
}

// Upper tail mass of N(0, 1) above z, accurate far into the tail.
double UpperTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

void ValidateBudget(const PrivacyBudget& b, int state_dim) {
  RequireBasicBudget(b);
  if (state_dim > 1 && !(b.epsilon < 1.0)) {
    throw BudgetOutOfRange(
        "epsilon must be < 1 when the state dimension exceeds one (got "
        "epsilon = " + std::to_string(b.epsilon) + ", n_x = " +
        std::to_string(state_dim) + ")");
  }
}

SensitivityProfile ComputeSensitivityProfile(const std::vector<Matrix>& covs) {
  if (covs.empty()) throw InvalidInput("sensitivity needs at least one sensor");
  SensitivityProfile sp;
  std::vector<double> norms;
  for (const Matrix& p : covs) norms.push_back(SpectralNorm(p));
  sp.p_min = *std::min_element(norms.begin(), norms.end());
  sp.p_max = *std::max_element(norms.begin(), norms.end());
  for (std::size_t i = 0; i < covs.size(); ++i) {
    for (std::size_t j = i + 1; j < covs.size(); ++j) {
      sp.delta2 = std::max(sp.delta2, SpectralNorm(Symmetrize(covs[i] - covs[j])));
    }
  }
  // Reverse triangle inequality; the slack absorbs eigensolver round-off.
  const double slack = 1e-12 * std::max(1.0, sp.p_max);
  if (sp.delta2 + slack < sp.p_max - sp.p_min) {
    throw InvalidInput("sensitivity profile violates Delta_2 >= p_max - p_min");
  }
  return sp;
}

SensitivityProfile ComputeSensitivityProfile(const CovarianceEnsemble& ens) {
  return ComputeSensitivityProfile(OutputCovariances(ens, 0.0));
}

double ZetaBoundForDim(const PrivacyBudget& b, int n) {
  RequireBasicBudget(b);
  if (n < 1) throw InvalidInput("dimension must be >= 1");
  const double e = b.epsilon;
  const double d = b.delta;
  return std::sqrt((d + n) * (d + n) + 8.0 * n * e * d) / (2.0 * d);
}

double IntrinsicThresholdForDim(const SensitivityProfile& sp,
                                const PrivacyBudget& b, int n) {
  return sp.delta2 * ZetaBoundForDim(b, n) / b.epsilon;
}

double ZetaBound(const PrivacyBudget& b, int state_dim) {
  ValidateBudget(b, state_dim);
  return ZetaBoundForDim(b, state_dim == 1 ? 1 : state_dim);
}

double IntrinsicThreshold(const SensitivityProfile& sp, const PrivacyBudget& b,
                          int state_dim) {
  ValidateBudget(b, state_dim);
  return IntrinsicThresholdForDim(sp, b, state_dim == 1 ? 1 : state_dim);
}

const char* MechanismKindName(MechanismKind kind) {
  return kind == MechanismKind::kIntrinsic ? "intrinsic" : "gaussian";
}

MechanismPlan PlanMechanism(const SensitivityProfile& sp,
                            const PrivacyBudget& b, int state_dim,
                            double zeta_margin) {
  if (!(zeta_margin >= 0.0)) throw InvalidInput("zeta_margin must be >= 0");
  MechanismPlan plan;
  plan.threshold = IntrinsicThreshold(sp, b, state_dim);
  plan.zeta_bound = ZetaBound(b, state_dim);
  if (sp.delta2 == 0.0 && sp.p_min == 0.0) {
    throw InvalidInput(
        "degenerate system: zero sensitivity and zero estimation covariance");
  }
  if (sp.p_min > plan.threshold) {
    plan.kind = MechanismKind::kIntrinsic;
    return plan;
  }
  plan.kind = MechanismKind::kGaussian;
  plan.zeta = (1.0 + zeta_margin) * plan.zeta_bound;
  plan.q_a = std::max(0.0, plan.zeta * sp.delta2 / b.epsilon - sp.p_min);
  return plan;
}

Vector PerturbEstimate(const Vector& x_hat, double q_a, RandomStream& rng) {
  if (!(q_a >= 0.0)) throw InvalidInput("q_a must be >= 0");
  if (q_a == 0.0) return x_hat;
  const double sd = std::sqrt(q_a);
  Vector out = x_hat;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += sd * rng.StandardNormal();
  return out;
}

PrivacyLossEvaluator::PrivacyLossEvaluator(const Matrix& p_i,
                                           const Matrix& p_j) {
  if (p_i.rows() != p_j.rows() || p_i.cols() != p_j.cols()) {
    throw InvalidInput("privacy loss: covariance dimensions differ");
  }
  RequirePositiveDefinite(p_i, "privacy loss P_i");
  RequirePositiveDefinite(p_j, "privacy loss P_j");
  chol_i_.compute(Symmetrize(p_i));
  chol_j_.compute(Symmetrize(p_j));
  half_log_det_ratio_ = 0.5 * (LogDetSpd(p_j) - LogDetSpd(p_i));
}

double PrivacyLossEvaluator::operator()(const Vector& d) const {
  const double qi = d.dot(chol_i_.solve(d));
  const double qj = d.dot(chol_j_.solve(d));
  return std::abs(half_log_det_ratio_ - 0.5 * (qi - qj));
}

double PrivacyLoss(const Vector& big_x, const Vector& x, const Matrix& p_i,
                   const Matrix& p_j) {
  if (big_x.size() != x.size() || x.size() != p_i.rows()) {
    throw InvalidInput("privacy loss: vector and covariance dimensions differ");
  }
  return PrivacyLossEvaluator(p_i, p_j)(big_x - x);
}

std::vector<Interval> ExceedanceRegion1d(double p_i, double p_j, double eps) {
  if (!(p_i > 0.0) || !(p_j > 0.0)) {
    throw InvalidInput("exceedance region: variances must be > 0");
  }
  if (!(eps > 0.0)) throw InvalidInput("exceedance region: eps must be > 0");
  if (p_i == p_j) return {};

  // loss(t) = |a + b t| with t = (X - x)^2.
  const double a = 0.5 * std::log(p_j / p_i);
  const double b = (p_j - p_i) / (-2.0 * p_i * p_j);
  std::vector<Interval> t_sets;
  AppendAbove(a, b, eps, &t_sets);     // a + b t > eps
  AppendAbove(-a, -b, eps, &t_sets);   // a + b t < -eps

  std::vector<Interval> out;
  for (const Interval& t : t_sets) {
    const double lo = std::sqrt(t.lower);
    const double hi = std::isinf(t.upper) ? kInf : std::sqrt(t.upper);
    if (lo == 0.0) {
      out.push_back({-hi, hi});
    } else {
      out.push_back({-hi, -lo});
      out.push_back({lo, hi});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Interval& l, const Interval& r) { return l.lower < r.lower; });
  return out;
}

double GaussianMass1d(const std::vector<Interval>& region, double p) {
  if (!(p > 0.0)) throw InvalidInput("variance must be > 0");
  const double sd = std::sqrt(p);
  double mass = 0.0;
  for (const Interval& iv : region) {
    double lo = iv.lower / sd;
    double hi = iv.upper / sd;
    if (hi <= 0.0) {  // mirror into the upper half for tail accuracy
      std::swap(lo, hi);
      lo = -lo;
      hi = -hi;
    }
    mass += lo >= 0.0 ? UpperTail(lo) - UpperTail(hi)
                      : 1.0 - UpperTail(-lo) - UpperTail(hi);
  }
  return mass;
}

std::vector<Matrix> OutputCovariances(const CovarianceEnsemble& ens,
                                      double q_a) {
  if (!(q_a >= 0.0)) throw InvalidInput("q_a must be >= 0");
  std::vector<Matrix> out;
  for (int i = 0; i < ens.num_sensors(); ++i) {
    const Matrix& p = ens.Block(i, i);
    out.push_back(p + q_a * Matrix::Identity(p.rows(), p.cols()));
  }
  return out;
}

std::vector<Matrix> LinearPostProcess(const std::vector<Matrix>& covs,
                                      const Matrix& map) {
  std::vector<Matrix> out;
  for (const Matrix& p : covs) {
    if (map.cols() != p.rows()) {
      throw InvalidInput("post-processing map does not match covariance size");
    }
    out.push_back(Symmetrize(map * p * map.transpose()));
  }
  return out;
}

PrivacyReport EmpiricalPrivacyCheck(const std::vector<Matrix>& covs,
                                    const PrivacyBudget& b,
                                    std::int64_t samples,
                                    const RandomStream& rng, int threads) {
  RequireBasicBudget(b);
  if (samples < kMinPrivacySamples) {
    throw InvalidInput("privacy check needs at least " +
                       std::to_string(kMinPrivacySamples) + " samples");
  }
  if (covs.empty()) throw InvalidInput("privacy check needs covariances");

  struct Task {
    int pair;
    std::int64_t shard;
  };
  std::vector<PairExceedance> pairs;
  std::vector<PrivacyLossEvaluator> evaluators;
  std::vector<GaussianSampler> samplers;
  for (std::size_t i = 0; i < covs.size(); ++i) {
    samplers.emplace_back(covs[i]);
  }
  for (int i = 0; i < static_cast<int>(covs.size()); ++i) {
    for (int j = 0; j < static_cast<int>(covs.size()); ++j) {
      if (i == j) continue;
      pairs.push_back({i, j, samples, 0, 0.0});
      evaluators.emplace_back(covs[i], covs[j]);
    }
  }

  const std::int64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<Task> tasks;
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
    for (std::int64_t s = 0; s < shards; ++s) tasks.push_back({p, s});
  }
  std::vector<std::int64_t> counts(tasks.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      const PairExceedance& pair = pairs[task.pair];
      RandomStream stream = rng.Split(static_cast<std::uint64_t>(task.pair))
                                .Split(static_cast<std::uint64_t>(task.shard));
      const std::int64_t begin = task.shard * kShardSize;
      const std::int64_t end = std::min(samples, begin + kShardSize);
      std::int64_t hits = 0;
      for (std::int64_t n = begin; n < end; ++n) {
        const Vector d = samplers[pair.i].Draw(stream);
        if (evaluators[task.pair](d) > b.epsilon) ++hits;
      }
      counts[t] = hits;
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    pairs[tasks[t].pair].exceedances += counts[t];
  }
  PrivacyReport report;
  report.limit = b.delta + 3.0 * std::sqrt(b.delta * (1.0 - b.delta) /
                                           static_cast<double>(samples));
  report.pass = true;
  for (PairExceedance& pair : pairs) {
    pair.fraction =
        static_cast<double>(pair.exceedances) / static_cast<double>(samples);
    report.max_fraction = std::max(report.max_fraction, pair.fraction);
    report.pass = report.pass && pair.fraction <= report.limit;
  }
  report.pairs = std::move(pairs);
  return report;
}

ChebyshevCheck ChebyshevBoundCheck(const Matrix& p, double t,
                                   std::int64_t samples,
                                   const RandomStream& rng) {
  if (!(t > 0.0)) throw InvalidInput("chebyshev check: t must be > 0");
  if (samples <= 0) throw InvalidInput("chebyshev check: samples must be > 0");
  const GaussianSampler sampler(p);
  RandomStream stream = rng;
  std::int64_t hits = 0;
  for (std::int64_t n = 0; n < samples; ++n) {
    if (sampler.Draw(stream).squaredNorm() > t * t) ++hits;
  }
  return {static_cast<double>(hits) / static_cast<double>(samples),
          p.trace() / (t * t)};
}

}  // namespace dpfusion
