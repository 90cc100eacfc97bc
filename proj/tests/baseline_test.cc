/*
 * Copyright 2026 The Coldstart Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "coldstart/baseline.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "coldstart/errors.h"
#include "coldstart/random.h"

namespace coldstart {
namespace {

using Matrix = std::vector<std::vector<mpq_class>>;

// Laplace expansion; fine for the d <= 4 used here.
mpq_class Determinant(const Matrix& m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  mpq_class det = 0;
  for (size_t c = 0; c < n; ++c) {
    Matrix minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<mpq_class> row;
      for (size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    const mpq_class term = m[0][c] * Determinant(minor);
    det += (c % 2 == 0) ? term : mpq_class(-term);
  }
  return det;
}

// Cramer's rule on the normal equations.
RationalVector CramerOracle(const PlaintextInstance& inst) {
  const size_t d = inst.dim();
  Matrix gram(d, std::vector<mpq_class>(d, 0));
  std::vector<mpq_class> rhs(d, 0);
  for (size_t k = 0; k < inst.columns.size(); ++k) {
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = 0; j < d; ++j) {
        gram[i][j] += mpq_class(inst.columns[k][i]) * inst.columns[k][j];
      }
      rhs[i] += mpq_class(inst.columns[k][i]) * inst.ratings[k];
    }
  }
  const mpq_class det = Determinant(gram);
  RationalVector u(d);
  for (size_t c = 0; c < d; ++c) {
    Matrix replaced = gram;
    for (size_t r = 0; r < d; ++r) replaced[r][c] = rhs[r];
    u[c] = Determinant(replaced) / det;
  }
  return u;
}

mpq_class Objective(const PlaintextInstance& inst, const RationalVector& u) {
  mpq_class total = 0;
  for (size_t k = 0; k < inst.columns.size(); ++k) {
    mpq_class residual = inst.ratings[k];
    for (size_t i = 0; i < u.size(); ++i) {
      residual -= u[i] * inst.columns[k][i];
    }
    total += residual * residual;
  }
  return total;
}

PlaintextInstance RandomInstance(RandomSource& rng, size_t d, size_t s,
                                 int64_t bound_v, int64_t bound_r) {
  PlaintextInstance inst;
  for (size_t k = 0; k < s; ++k) {
    std::vector<int64_t> column(d);
    for (int64_t& x : column) x = rng.UniformInt(-bound_v, bound_v);
    inst.columns.push_back(column);
    inst.ratings.push_back(rng.UniformInt(-bound_r, bound_r));
  }
  return inst;
}

TEST(LsqExactTest, OneDimension) {
  const PlaintextInstance inst{{{2}}, {4}, 0};
  EXPECT_EQ(LsqExact(inst), (RationalVector{2}));
}

TEST(LsqExactTest, IdentityDesignReturnsRatings) {
  const PlaintextInstance inst{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {-3, 7, 2}, 0};
  EXPECT_EQ(LsqExact(inst), (RationalVector{-3, 7, 2}));
}

TEST(LsqExactTest, OverdeterminedTwoByThree) {
  // Normal equations [[2,1],[1,2]] u = (4,5).
  const PlaintextInstance inst{{{1, 0}, {0, 1}, {1, 1}}, {1, 2, 3}, 0};
  EXPECT_EQ(LsqExact(inst), (RationalVector{1, 2}));
}

TEST(LsqExactTest, NonIntegerSolution) {
  // Normal equation 5u = 7.
  const PlaintextInstance inst{{{1}, {2}}, {1, 3}, 0};
  EXPECT_EQ(LsqExact(inst), (RationalVector{mpq_class(7, 5)}));
}

TEST(LsqExactTest, SingularDesignRaisesRankError) {
  const PlaintextInstance rank_one{{{1, 2}, {2, 4}, {-1, -2}}, {1, 2, 3}, 0};
  EXPECT_THROW(LsqExact(rank_one), RankError);
  const PlaintextInstance zeros{{{0, 0}, {0, 0}}, {1, 2}, 0};
  EXPECT_THROW(LsqExact(zeros), RankError);
  EXPECT_THROW(LsqFloat(rank_one), RankError);
}

TEST(LsqExactTest, AgreesWithCramerOracle) {
  SeededRandom rng = SeededRandom::FromU64(41);
  int solved = 0;
  while (solved < 300) {
    const size_t d = 1 + rng.UniformU64Below(4);
    const size_t s = d + rng.UniformU64Below(4);
    const PlaintextInstance inst = RandomInstance(rng, d, s, 16, 8);
    RationalVector u;
    try {
      u = LsqExact(inst);
    } catch (const RankError&) {
      continue;
    }
    ASSERT_EQ(u, CramerOracle(inst));
    ++solved;
  }
}

TEST(LsqExactTest, FirstOrderOptimality) {
  SeededRandom rng = SeededRandom::FromU64(42);
  const mpq_class step(1, 1024);
  int checked = 0;
  while (checked < 200) {
    const size_t d = 1 + rng.UniformU64Below(4);
    const size_t s = d + rng.UniformU64Below(4);
    const PlaintextInstance inst = RandomInstance(rng, d, s, 16, 8);
    RationalVector u;
    try {
      u = LsqExact(inst);
    } catch (const RankError&) {
      continue;
    }
    const mpq_class best = Objective(inst, u);
    for (size_t i = 0; i < d; ++i) {
      for (int sign : {-1, 1}) {
        RationalVector moved = u;
        moved[i] += sign * step;
        ASSERT_GE(Objective(inst, moved), best);
      }
    }
    ++checked;
  }
}

TEST(LsqExactTest, FixedPointScalingCancels) {
  SeededRandom rng = SeededRandom::FromU64(43);
  int checked = 0;
  while (checked < 100) {
    const PlaintextInstance inst = RandomInstance(rng, 3, 5, 16, 8);
    RationalVector u;
    try {
      u = LsqExact(inst);
    } catch (const RankError&) {
      continue;
    }
    for (unsigned scale : {1u, 10u, 20u}) {
      PlaintextInstance scaled = inst;
      for (auto& column : scaled.columns) {
        for (int64_t& x : column) x *= int64_t{1} << scale;
      }
      for (int64_t& r : scaled.ratings) r *= int64_t{1} << scale;
      ASSERT_EQ(LsqExact(scaled), u);
    }
    ++checked;
  }
}

TEST(LsqFloatTest, MirrorsExactExamples) {
  const PlaintextInstance one{{{2}}, {4}, 0};
  EXPECT_NEAR(LsqFloat(one)[0], 2.0, 1e-9);
  const PlaintextInstance identity{{{1, 0}, {0, 1}}, {-3, 7}, 0};
  const std::vector<double> u = LsqFloat(identity);
  EXPECT_NEAR(u[0], -3.0, 1e-9);
  EXPECT_NEAR(u[1], 7.0, 1e-9);
  const PlaintextInstance two{{{1, 0}, {0, 1}, {1, 1}}, {1, 2, 3}, 0};
  const std::vector<double> w = LsqFloat(two);
  EXPECT_NEAR(w[0], 1.0, 1e-9);
  EXPECT_NEAR(w[1], 2.0, 1e-9);
}

TEST(LsqFloatTest, AgreesWithExactOnWellConditionedInstances) {
  SeededRandom rng = SeededRandom::FromU64(44);
  int checked = 0;
  while (checked < 200) {
    const size_t d = 1 + rng.UniformU64Below(4);
    const PlaintextInstance inst = RandomInstance(rng, d, d + 4, 16, 8);
    RationalVector exact;
    try {
      exact = LsqExact(inst);
    } catch (const RankError&) {
      continue;
    }
    const std::vector<double> approx = LsqFloat(inst);
    for (size_t i = 0; i < d; ++i) {
      const double truth = exact[i].get_d();
      ASSERT_LE(std::fabs(approx[i] - truth), 1e-6 * std::max(1.0, std::fabs(truth)));
    }
    ++checked;
  }
}

TEST(InstanceTest, BatchSelectsColumnsAndRejectsUnknownItems) {
  ItemDatabase db;
  db.dim = 2;
  db.bound_v = 5;
  db.profiles = {{0, 0}, {1, 2}, {3, 4}};
  const PlaintextInstance inst =
      InstanceFromBatch(db, RatingBatch::Pad(std::vector<Rating>{{2, 7}}, 2), 3);
  EXPECT_EQ(inst.columns, (std::vector<std::vector<int64_t>>{{3, 4}, {0, 0}}));
  EXPECT_EQ(inst.ratings, (std::vector<int64_t>{7, 0}));
  EXPECT_EQ(inst.scale_bits, 3u);
  EXPECT_THROW(
      InstanceFromBatch(db, RatingBatch::Pad(std::vector<Rating>{{3, 1}}, 1)),
      RangeError);
}

TEST(GenerateProfilesTest, TinyDatabase) {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const ItemDatabase db = GenerateProfiles(2, 1, 1, seed);
    ASSERT_EQ(db.profiles.size(), 2u);
    EXPECT_EQ(db.profiles[0], (std::vector<int64_t>{0}));
    EXPECT_TRUE(db.profiles[1][0] == 1 || db.profiles[1][0] == -1);
  }
}

TEST(GenerateProfilesTest, DeterministicPerSeed) {
  EXPECT_EQ(GenerateProfiles(30, 4, 100, 5), GenerateProfiles(30, 4, 100, 5));
  EXPECT_NE(GenerateProfiles(30, 4, 100, 5), GenerateProfiles(30, 4, 100, 6));
}

TEST(GenerateProfilesTest, ReferenceSizedDatabase) {
  const uint64_t bound = uint64_t{1} << 20;
  const ItemDatabase db = GenerateProfiles(100, 8, bound, 1);
  EXPECT_NO_THROW(db.Validate());
  EXPECT_EQ(db.items(), 100u);
  EXPECT_EQ(db.dim, 8u);
  for (const auto& v : db.profiles) {
    for (int64_t x : v) EXPECT_LE(static_cast<uint64_t>(std::llabs(x)), bound);
  }
  const std::vector<std::vector<int64_t>> real(db.profiles.begin() + 1,
                                               db.profiles.end());
  EXPECT_EQ(IntegerRank(real), 8u);
}

TEST(GenerateProfilesTest, RejectsTooFewItems) {
  EXPECT_THROW(GenerateProfiles(1, 1, 1, 0), InvalidArgumentError);
  EXPECT_THROW(GenerateProfiles(3, 3, 1, 0), InvalidArgumentError);
}

TEST(IntegerRankTest, KnownRanks) {
  EXPECT_EQ(IntegerRank({{1, 2}, {2, 4}}), 1u);
  EXPECT_EQ(IntegerRank({{1, 2}, {2, 5}}), 2u);
  EXPECT_EQ(IntegerRank({{0, 0, 0}}), 0u);
  EXPECT_EQ(IntegerRank({{0, 1, 0}, {0, 0, 1}, {0, 1, 1}}), 2u);
  EXPECT_EQ(IntegerRank({}), 0u);
}

}  // namespace
}  // namespace coldstart
