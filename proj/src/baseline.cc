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

#include <cmath>
#include <limits>
#include <utility>

#include "coldstart/errors.h"
#include "coldstart/random.h"

namespace coldstart {

namespace {

mpz_class Z(int64_t v) {
  mpz_class out;
  mpz_set_si(out.get_mpz_t(), v);
  return out;
}

void CheckInstance(const PlaintextInstance& instance) {
  if (instance.columns.empty()) {
    throw InvalidArgumentError("instance has no ratings");
  }
  if (instance.columns.size() != instance.ratings.size()) {
    throw InvalidArgumentError("one rating per column is required");
  }
  const size_t d = instance.dim();
  if (d == 0) throw InvalidArgumentError("profiles have dimension 0");
  for (const auto& column : instance.columns) {
    if (column.size() != d) {
      throw InvalidArgumentError("profile columns differ in length");
    }
  }
}

}  // namespace

PlaintextInstance InstanceFromBatch(const ItemDatabase& db,
                                    const RatingBatch& batch,
                                    uint32_t scale_bits) {
  PlaintextInstance instance;
  instance.scale_bits = scale_bits;
  for (const Rating& rating : batch.entries) {
    if (rating.item >= db.items()) {
      throw RangeError("rated item " + std::to_string(rating.item) +
                       " is not in the database");
    }
    instance.columns.push_back(db.profiles[rating.item]);
    instance.ratings.push_back(rating.value);
  }
  return instance;
}

RationalVector LsqExact(const PlaintextInstance& instance) {
  CheckInstance(instance);
  const size_t d = instance.dim();
  // Augmented normal equations [G | V r].
  std::vector<std::vector<mpz_class>> m(d, std::vector<mpz_class>(d + 1));
  for (size_t k = 0; k < instance.columns.size(); ++k) {
    const auto& v = instance.columns[k];
    const mpz_class r = Z(instance.ratings[k]);
    for (size_t i = 0; i < d; ++i) {
      const mpz_class vi = Z(v[i]);
      for (size_t j = 0; j < d; ++j) m[i][j] += vi * Z(v[j]);
      m[i][d] += vi * r;
    }
  }

  mpz_class previous_pivot = 1;
  for (size_t k = 0; k < d; ++k) {
    if (m[k][k] == 0) {
      size_t swap_row = k + 1;
      while (swap_row < d && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == d) throw RankError("Gram matrix V_S V_S^T is singular");
      std::swap(m[k], m[swap_row]);
    }
    for (size_t i = k + 1; i < d; ++i) {
      for (size_t j = k + 1; j <= d; ++j) {
        mpz_class value = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(value.get_mpz_t(), value.get_mpz_t(),
                     previous_pivot.get_mpz_t());
        m[i][j] = std::move(value);
      }
      m[i][k] = 0;
    }
    previous_pivot = m[k][k];
  }

  RationalVector u(d);
  for (size_t i = d; i-- > 0;) {
    mpq_class acc(m[i][d]);
    for (size_t j = i + 1; j < d; ++j) acc -= mpq_class(m[i][j]) * u[j];
    u[i] = acc / mpq_class(m[i][i]);
    u[i].canonicalize();
  }
  return u;
}

std::vector<double> LsqFloat(const PlaintextInstance& instance) {
  CheckInstance(instance);
  const size_t d = instance.dim();
  std::vector<std::vector<double>> m(d, std::vector<double>(d + 1, 0.0));
  double scale = 0.0;
  for (size_t k = 0; k < instance.columns.size(); ++k) {
    const auto& v = instance.columns[k];
    const double r = static_cast<double>(instance.ratings[k]);
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = 0; j < d; ++j) {
        m[i][j] += static_cast<double>(v[i]) * static_cast<double>(v[j]);
      }
      m[i][d] += static_cast<double>(v[i]) * r;
    }
  }
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < d; ++j) scale = std::max(scale, std::fabs(m[i][j]));
  }
  const double tolerance =
      scale * static_cast<double>(d) * std::numeric_limits<double>::epsilon();
  for (size_t k = 0; k < d; ++k) {
    size_t pivot = k;
    for (size_t i = k + 1; i < d; ++i) {
      if (std::fabs(m[i][k]) > std::fabs(m[pivot][k])) pivot = i;
    }
    if (std::fabs(m[pivot][k]) <= tolerance) {
      throw RankError("Gram matrix V_S V_S^T is numerically singular");
    }
    std::swap(m[k], m[pivot]);
    for (size_t i = k + 1; i < d; ++i) {
      const double factor = m[i][k] / m[k][k];
      for (size_t j = k; j <= d; ++j) m[i][j] -= factor * m[k][j];
    }
  }
  std::vector<double> u(d);
  for (size_t i = d; i-- > 0;) {
    double acc = m[i][d];
    for (size_t j = i + 1; j < d; ++j) acc -= m[i][j] * u[j];
    u[i] = acc / m[i][i];
  }
  return u;
}

size_t IntegerRank(const std::vector<std::vector<int64_t>>& rows) {
  if (rows.empty()) return 0;
  const size_t cols = rows.front().size();
  std::vector<std::vector<mpz_class>> m;
  for (const auto& row : rows) {
    std::vector<mpz_class> converted;
    for (int64_t v : row) converted.push_back(Z(v));
    m.push_back(std::move(converted));
  }
  size_t rank = 0;
  for (size_t col = 0; col < cols && rank < m.size(); ++col) {
    size_t pivot = rank;
    while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (size_t i = rank + 1; i < m.size(); ++i) {
      if (m[i][col] == 0) continue;
      const mpz_class a = m[rank][col];
      const mpz_class b = m[i][col];
      for (size_t j = col; j < cols; ++j) {
        m[i][j] = m[i][j] * a - m[rank][j] * b;
      }
    }
    ++rank;
  }
  return rank;
}

ItemDatabase GenerateProfiles(uint32_t items, uint32_t dim, uint64_t bound_v,
                              uint64_t seed) {
  if (items < 2) {
    throw InvalidArgumentError("need the fake item plus at least one item");
  }
  if (dim == 0) throw InvalidArgumentError("dimension must be >= 1");
  if (items - 1 < dim) {
    throw InvalidArgumentError("fewer real items than the dimension");
  }
  if (bound_v == 0 || bound_v > static_cast<uint64_t>(INT64_MAX)) {
    throw InvalidArgumentError("B_V must lie in [1, 2^63)");
  }
  SeededRandom rng = SeededRandom::FromU64(seed);
  const auto bound = static_cast<int64_t>(bound_v);
  ItemDatabase db;
  db.dim = dim;
  db.bound_v = bound_v;
  db.profiles.assign(items, std::vector<int64_t>(dim, 0));
  do {
    for (uint32_t j = 1; j < items; ++j) {
      for (uint32_t i = 0; i < dim; ++i) {
        db.profiles[j][i] = rng.UniformInt(-bound, bound);
      }
    }
  } while (IntegerRank({db.profiles.begin() + 1, db.profiles.end()}) < dim);
  return db;
}

}  // namespace coldstart
