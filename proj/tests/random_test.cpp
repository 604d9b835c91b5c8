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


#include "dpfusion/random.hpp"

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dpfusion/error.hpp"

namespace dpfusion {
namespace {

TEST(RandomStreamTest, SameKeySameSequence) {
  RandomStream a(42);
  RandomStream b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RandomStreamTest, SplitIsAPureFunctionOfKeyAndIndex) {
  const RandomStream root(7);
  RandomStream consumed(7);
  for (int i = 0; i < 10; ++i) consumed();
  EXPECT_EQ(root.Split(3).key(), consumed.Split(3).key());
  EXPECT_NE(root.Split(3).key(), root.Split(4).key());
  EXPECT_NE(root.Split(0).key(), root.key());
}

TEST(RandomStreamTest, ChildKeysAreDistinct) {
  std::set<std::uint64_t> keys;
  const RandomStream root(1);
  for (std::uint64_t i = 0; i < 10000; ++i) keys.insert(root.Split(i).key());
  EXPECT_EQ(keys.size(), 10000u);
}

TEST(RandomStreamTest, StandardNormalMoments) {
  RandomStream rng(99);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.StandardNormal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RandomStreamTest, SiblingStreamsAreUncorrelated) {
  const RandomStream root(5);
  RandomStream a = root.Split(0);
  RandomStream b = root.Split(1);
  const int n = 100000;
  double cross = 0.0;
  for (int i = 0; i < n; ++i) cross += a.StandardNormal() * b.StandardNormal();
  EXPECT_LT(std::fabs(cross / n), 0.02);
}

TEST(GaussianSamplerTest, EmpiricalCovarianceWithinThreePercent) {
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 0.5;
  const GaussianSampler s(cov);
  RandomStream rng(3);
  const int n = 100000;
  Matrix acc = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Vector x = s.Draw(rng);
    acc += x * x.transpose();
  }
  acc /= n;
  EXPECT_LT((acc - cov).norm() / cov.norm(), 0.03);
}

TEST(GaussianSamplerTest, SingularCovarianceStaysInRange) {
  Matrix cov(2, 2);
  cov << 1.0, 1.0, 1.0, 1.0;
  const GaussianSampler s(cov);
  RandomStream rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vector x = s.Draw(rng);
    EXPECT_NEAR(x(0), x(1), 1e-12);
  }
}

TEST(GaussianSamplerTest, ZeroCovarianceConsumesRandomness) {
  const GaussianSampler zero(Matrix::Zero(2, 2));
  EXPECT_TRUE(zero.is_zero());
  RandomStream a(8);
  RandomStream b(8);
  EXPECT_TRUE(zero.Draw(a).isZero());
  b.StandardNormal();
  b.StandardNormal();
  EXPECT_EQ(a.StandardNormal(), b.StandardNormal());
}

TEST(GaussianSamplerTest, RejectsIndefinite) {
  Matrix cov(2, 2);
  cov << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussianSampler{cov}, InvalidInput);
}

}  // namespace
}  // namespace dpfusion
