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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// criteria pass. Every expected value is recomputed here from first
// principles rather than taken from the library.

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coldstart/baseline.h"
#include "coldstart/bigint.h"
#include "coldstart/ec_group.h"
#include "coldstart/errors.h"
#include "coldstart/item_database.h"
#include "coldstart/numeric.h"
#include "coldstart/ot.h"
#include "coldstart/paillier.h"
#include "coldstart/protocol.h"
#include "coldstart/random.h"
#include "coldstart/session.h"
#include "coldstart/wire.h"
#include "stats.h"

namespace coldstart {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// s distinct real items spanning Q^d, ratings uniform in [-B_r, B_r].
std::vector<Rating> RandomRatings(const ItemDatabase& db, uint32_t count,
                                  uint64_t bound_r, RandomSource& rng) {
  while (true) {
    std::set<uint32_t> chosen;
    while (chosen.size() < count) {
      chosen.insert(1 + static_cast<uint32_t>(rng.UniformU64Below(db.items() - 1)));
    }
    std::vector<std::vector<int64_t>> rows;
    for (uint32_t j : chosen) rows.push_back(db.profiles[j]);
    if (IntegerRank(rows) < db.dim) continue;
    std::vector<Rating> out;
    const auto b = static_cast<int64_t>(bound_r);
    for (uint32_t j : chosen) out.push_back({j, rng.UniformInt(-b, b)});
    return out;
  }
}

// Normal equations solved by Cramer's rule over Q, independent of LsqExact.
RationalVector CramerSolve(const ItemDatabase& db,
                           const std::vector<Rating>& ratings) {
  const size_t d = db.dim;
  std::vector<std::vector<mpq_class>> g(d, std::vector<mpq_class>(d, 0));
  std::vector<mpq_class> b(d, 0);
  for (const Rating& r : ratings) {
    const auto& v = db.profiles[r.item];
    for (size_t i = 0; i < d; ++i) {
      b[i] += mpq_class(v[i]) * r.value;
      for (size_t k = 0; k < d; ++k) g[i][k] += mpq_class(v[i]) * v[k];
    }
  }
  // Determinant by cofactor expansion; d <= 4 keeps this cheap.
  std::function<mpq_class(const std::vector<std::vector<mpq_class>>&)> det =
      [&](const std::vector<std::vector<mpq_class>>& m) -> mpq_class {
    if (m.size() == 1) return m[0][0];
    mpq_class total = 0;
    for (size_t c = 0; c < m.size(); ++c) {
      std::vector<std::vector<mpq_class>> minor;
      for (size_t r = 1; r < m.size(); ++r) {
        std::vector<mpq_class> row;
        for (size_t k = 0; k < m.size(); ++k) {
          if (k != c) row.push_back(m[r][k]);
        }
        minor.push_back(row);
      }
      const mpq_class term = m[0][c] * det(minor);
      total += (c % 2 == 0) ? term : mpq_class(-term);
    }
    return total;
  };
  const mpq_class denominator = det(g);
  RationalVector u(d);
  for (size_t i = 0; i < d; ++i) {
    auto replaced = g;
    for (size_t r = 0; r < d; ++r) replaced[r][i] = b[r];
    u[i] = det(replaced) / denominator;
    u[i].canonicalize();
  }
  return u;
}

Verdict OracleEquivalence() {
  SeededRandom rng = SeededRandom::FromLabel("acceptance-1");
  int matches = 0;
  int failures = 0;
  unsigned max_bits = 0;
  std::string first_failure;
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = static_cast<uint32_t>(rng.UniformInt(1, 4));
    const auto s = static_cast<uint32_t>(rng.UniformInt(d, d + 3));
    const auto bound_v = static_cast<uint64_t>(rng.UniformInt(1, 16));
    const auto bound_r = static_cast<uint64_t>(rng.UniformInt(1, 8));
    const auto batch = static_cast<uint32_t>(s + rng.UniformInt(0, 2));
    const auto items = static_cast<uint32_t>(rng.UniformInt(batch + 1, batch + 8));
    const ItemDatabase db =
        GenerateProfiles(items, d, bound_v, rng.UniformU64Below(1u << 30));
    const std::vector<Rating> ratings = RandomRatings(db, s, bound_r, rng);
    const Announcement ann{
        ProtocolParams::Make(d, items, batch, bound_v, bound_r), CurveId::kP256};
    UserSessionConfig config;
    config.variant = trial % 2 == 0 ? Variant::kFused : Variant::kGeneric;
    auto user_rng = rng.Fork();
    auto analyst_rng = rng.Fork();
    try {
      const InProcessReport report =
          RunInProcess(db, ann, ratings, config, *user_rng, *analyst_rng);
      max_bits = std::max(max_bits, report.user.modulus_bits);
      const RationalVector oracle = CramerSolve(db, ratings);
      if (report.user.profile == oracle &&
          report.user.modulus_bits == DefaultModulusBits(ann.params)) {
        ++matches;
        continue;
      }
      if (first_failure.empty()) first_failure = "mismatch";
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
    if (first_failure.size() < 200) {
      first_failure += " [trial " + std::to_string(trial) + " d=" +
                       std::to_string(d) + " s=" + std::to_string(s) + "]";
    }
    ++failures;
  }
  std::ostringstream detail;
  detail << matches << "/500 exact matches, largest modulus " << max_bits
         << " bits";
  if (failures) detail << "; first failure: " << first_failure;
  return {failures == 0, detail.str()};
}

// 2 ceil(d^{d+1/2}) s^{2d+1} B_V^{4d+1} B_r from first principles.
mpz_class IndependentBound(unsigned long d, unsigned long s,
                           unsigned long bound_v, unsigned long bound_r) {
  mpz_class square, root, power;
  mpz_ui_pow_ui(square.get_mpz_t(), d, 2 * d + 1);
  mpz_sqrt(root.get_mpz_t(), square.get_mpz_t());
  if (root * root != square) root += 1;
  mpz_class result = 2 * root;
  mpz_ui_pow_ui(power.get_mpz_t(), s, 2 * d + 1);
  result *= power;
  mpz_ui_pow_ui(power.get_mpz_t(), bound_v, 4 * d + 1);
  result *= power;
  return result * bound_r;
}

Verdict ReferenceBound(const PaillierKeyPair& keys1024) {
  const mpz_class bound = IndependentBound(8, 10, 1ul << 20, 4);
  // Smallest k with 2^{k-1} > bound is the bit length of bound plus one.
  const unsigned oracle_bits = mpz_sizeinbase(bound.get_mpz_t(), 2) + 1;
  const unsigned bits = BoundBits(8, 10, 1ul << 20, 4);
  const ProtocolParams params =
      ProtocolParams::Make(8, 100, 10, 1ul << 20, 4);
  bool precondition_ok = true;
  try {
    SeededRandom rng = SeededRandom::FromLabel("acceptance-2");
    const ItemDatabase db = GenerateProfiles(100, 8, 1ul << 20, 1);
    UserRound1({params, CurveId::kP256},
               RatingBatch::Pad(RandomRatings(db, 10, 4, rng), 10),
               Variant::kFused, keys1024, rng);
  } catch (const RangeError&) {
    precondition_ok = false;
  }
  bool refused_64 = false;
  try {
    SeededRandom rng = SeededRandom::FromLabel("acceptance-2b");
    UserRound1({params, CurveId::kP256},
               RatingBatch::Pad(std::vector<Rating>{}, 10), Variant::kFused,
               GeneratePaillierKeyPair(64, rng), rng);
  } catch (const RangeError&) {
    refused_64 = true;
  }
  std::ostringstream detail;
  detail << "bound_bits = " << bits << " (independent " << oracle_bits
         << ", published 806); 1024-bit key "
         << (precondition_ok ? "accepted" : "REJECTED") << "; 64-bit key "
         << (refused_64 ? "refused" : "ACCEPTED");
  return {bits == oracle_bits && bits <= 806 &&
              params.min_modulus_bits == bits && precondition_ok && refused_64,
          detail.str()};
}

struct ReferenceRun {
  InProcessReport report;
  bool oracle_match = false;
  double seconds = 0;
};

ReferenceRun RunReferenceInstance(uint32_t items, const PaillierKeyPair& keys) {
  SeededRandom rng = SeededRandom::FromLabel("acceptance-reference");
  const ItemDatabase db = GenerateProfiles(items, 8, 1ul << 20, 1);
  const std::vector<Rating> ratings = RandomRatings(db, 10, 4, rng);
  const Announcement ann{ProtocolParams::Make(8, items, 10, 1ul << 20, 4),
                         CurveId::kP256};
  UserSessionConfig config;
  config.variant = Variant::kFused;
  config.keys = keys;
  auto user_rng = rng.Fork();
  auto analyst_rng = rng.Fork();
  const auto start = std::chrono::steady_clock::now();
  ReferenceRun run;
  run.report = RunInProcess(db, ann, ratings, config, *user_rng, *analyst_rng);
  run.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  run.oracle_match = run.report.user.profile == CramerSolve(db, ratings);
  return run;
}

Verdict ExponentiationCount(const ReferenceRun& run) {
  const uint64_t expected = uint64_t{100} * (8 * 8 + 8) * 10;
  const uint64_t got = run.report.analyst.stats.exponentiations.scalar;
  std::ostringstream detail;
  detail << got << " scalar exponentiations, expected M(d^2+d)s = "
         << expected << "; oracle " << (run.oracle_match ? "match" : "MISMATCH");
  return {got == expected && expected == 72000 && run.oracle_match,
          detail.str()};
}

Verdict Communication(const ReferenceRun& m100, const ReferenceRun& m400) {
  const size_t total100 = m100.report.transcript.TotalBytes();
  const size_t total400 = m400.report.transcript.TotalBytes();
  const double ratio =
      static_cast<double>(total400) / static_cast<double>(total100);
  std::ostringstream detail;
  detail << "M=100: " << total100 << " bytes ("
         << m100.report.transcript.BytesFrom(Direction::kUserToAnalyst)
         << " user->analyst, "
         << m100.report.transcript.BytesFrom(Direction::kAnalystToUser)
         << " analyst->user); M=400: " << total400 << " bytes; ratio " << ratio
         << "; wall clock " << m100.seconds << " s / " << m400.seconds
         << " s (round 2: " << m100.report.analyst.round2_seconds << " s / "
         << m400.report.analyst.round2_seconds << " s)";
  return {total100 < 2000000 && ratio >= 1.5 && ratio <= 2.5 &&
              m400.oracle_match,
          detail.str()};
}

Verdict OtCorrectness(const PaillierKeyPair& keys) {
  SeededRandom rng = SeededRandom::FromLabel("acceptance-5");
  const EcGroup group(CurveId::kP256);
  const mpz_class& n = keys.public_key.n();
  int cases = 0;
  int correct = 0;
  for (uint32_t items : {1u, 4u, 9u, 16u}) {
    constexpr uint32_t kChunks = 3;
    const OtLayout layout = OtLayout::For(items, kChunks);
    std::vector<std::vector<mpz_class>> records(items);
    for (auto& record : records) {
      for (uint32_t t = 0; t < kChunks; ++t) record.push_back(rng.UniformBelow(n));
    }
    for (uint32_t j = 0; j < items; ++j) {
      auto [receiver, query] =
          OtReceiver::Start(keys.public_key, group, layout, j, 1, rng);
      const OtResponse response =
          OtRespond(keys.public_key, group, layout, query, records, rng);
      ++cases;
      if (receiver.Finish(keys.secret_key, group, response) == records[j]) {
        ++correct;
      }
    }
  }
  return {correct == cases, std::to_string(correct) + "/" +
                                std::to_string(cases) +
                                " transfers equal the plaintext lookup"};
}

// True if some |p| <= P, 0 < q <= Q has p = q c (mod n).
bool HasRepresentative(const mpz_class& c, const mpz_class& n,
                       const mpz_class& p_bound, const mpz_class& q_bound) {
  for (mpz_class q = 1; q <= q_bound; ++q) {
    mpz_class p = (c * q) % n;
    if (p > n / 2) p -= n;
    if (abs(p) <= p_bound) return true;
  }
  return false;
}

Verdict Reconstruction() {
  SeededRandom rng = SeededRandom::FromLabel("acceptance-6");
  // Round trips at a 512-bit modulus with 2PQ < n.
  const mpz_class n_big = GeneratePaillierKeyPair(512, rng).public_key.n();
  const mpz_class p_big = CeilSqrt(n_big) / 4;
  const mpz_class q_big = (n_big - 1) / (2 * p_big);
  int round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    mpz_class p, q, g;
    do {
      p = rng.UniformInRange(-p_big, p_big);
      q = rng.UniformInRange(1, q_big);
      mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    } while (g != 1);
    mpz_class q_inv;
    mpz_invert(q_inv.get_mpz_t(), q.get_mpz_t(), n_big.get_mpz_t());
    const mpz_class c = (((p * q_inv) % n_big) + n_big) % n_big;
    if (RationalReconstruct(c, n_big, p_big, q_big) == mpq_class(p, q)) {
      ++round_trips;
    }
  }
  // Adversarial residues at a 40-bit modulus: q > Q and a brute-force search
  // confirms no fraction within (P, Q) maps to c.
  const mpz_class n_small = GeneratePaillierKeyPair(40, rng).public_key.n();
  const mpz_class bound_small = CeilSqrt(n_small / 2) - 1;  // P = Q
  int adversarial = 0;
  int clean_failures = 0;
  while (adversarial < 100) {
    const mpz_class q = rng.UniformInRange(bound_small + 1, n_small - 1);
    const mpz_class p = rng.UniformInRange(-bound_small, bound_small);
    mpz_class q_inv;
    if (!mpz_invert(q_inv.get_mpz_t(), q.get_mpz_t(), n_small.get_mpz_t())) {
      continue;
    }
    const mpz_class c = (((p * q_inv) % n_small) + n_small) % n_small;
    if (HasRepresentative(c, n_small, bound_small, bound_small)) continue;
    ++adversarial;
    try {
      RationalReconstruct(c, n_small, bound_small, bound_small);
    } catch (const ReconstructionError&) {
      ++clean_failures;
    }
  }
  std::ostringstream detail;
  detail << round_trips << "/1000 round trips at 512 bits; " << clean_failures
         << "/100 adversarial residues rejected with ReconstructionError";
  return {round_trips == 1000 && clean_failures == 100, detail.str()};
}

Verdict MaskStatistics() {
  SeededRandom rng = SeededRandom::FromLabel("acceptance-7");
  const mpz_class n = 5;
  const std::vector<int64_t> v = {2};
  std::vector<uint64_t> counts(5, 0);
  int zero_sum = 0;
  constexpr int kSessions = 5000;
  for (int i = 0; i < kSessions; ++i) {
    const MaskSet masks = SampleMasks(1, 2, n, rng);
    mpz_class r_sum = 0, rho_sum = 0;
    for (const ModMatrix& r : masks.r) r_sum += r(0, 0);
    for (const ModVector& rho : masks.rho) rho_sum += rho[0];
    if (r_sum % n == 0 && rho_sum % n == 0) ++zero_sum;
    const ModMatrix a = MaskedGram(masks, 0, v, n);
    ++counts[a(0, 0).get_ui()];
  }
  const double statistic = testing::ChiSquareUniform(counts);
  const double critical = testing::ChiSquareCritical(4, 0.01);
  std::ostringstream detail;
  detail << "chi-square " << statistic << " <= " << critical
         << " (df 4, 1%); zero sums on " << zero_sum << "/" << kSessions
         << " mask sets";
  return {statistic <= critical && zero_sum == kSessions, detail.str()};
}

Verdict TranscriptLengths() {
  SeededRandom rng = SeededRandom::FromLabel("acceptance-8");
  const ItemDatabase db = GenerateProfiles(30, 3, 16, 8);
  const Announcement ann{ProtocolParams::Make(3, 30, 6, 16, 8), CurveId::kP256};
  const unsigned bits = DefaultModulusBits(ann.params);
  std::string detail;
  bool pass = true;
  for (Variant variant : {Variant::kFused, Variant::kGeneric}) {
    std::vector<size_t> sizes[2];
    for (int session = 0; session < 2; ++session) {
      // Different keys of equal size, ratings, indices and real counts.
      UserSessionConfig config;
      config.variant = variant;
      config.modulus_bits = bits;
      const std::vector<Rating> ratings =
          RandomRatings(db, session == 0 ? 3 : 6, 8, rng);
      auto user_rng = rng.Fork();
      auto analyst_rng = rng.Fork();
      const InProcessReport report =
          RunInProcess(db, ann, ratings, config, *user_rng, *analyst_rng);
      for (const auto& e : report.transcript.entries) sizes[session].push_back(e.bytes);
    }
    pass = pass && sizes[0] == sizes[1] && sizes[0].size() == 3;
    detail += std::string(VariantName(variant)) + ":";
    for (size_t b : sizes[0]) detail += " " + std::to_string(b);
    detail += sizes[0] == sizes[1] ? " (equal) " : " (DIFFER) ";
  }
  return {pass, detail + "bytes per message"};
}

Verdict KnownAnswerPaillier() {
  const PaillierKeyPair keys = PaillierKeyPairFromPrimes(5, 7);
  const mpz_class n = 35, n2 = 1225, lambda = 12, mu = 3;
  bool pass = keys.secret_key.lambda == lambda && keys.secret_key.mu == mu;
  int checked = 0;
  for (long x = 0; x < 35; ++x) {
    for (long rho = 1; rho < 35; ++rho) {
      if (std::gcd(rho, 35l) != 1) continue;
      // c = (1 + x n) rho^n mod n^2.
      mpz_class rho_n;
      mpz_powm(rho_n.get_mpz_t(), mpz_class(rho).get_mpz_t(), n.get_mpz_t(),
               n2.get_mpz_t());
      const mpz_class expected = ((1 + x * n) * rho_n) % n2;
      const Ciphertext c = EncryptWithRandomness(keys.public_key, x, rho);
      // x = L(c^lambda mod n^2) mu mod n.
      mpz_class c_lambda;
      mpz_powm(c_lambda.get_mpz_t(), expected.get_mpz_t(), lambda.get_mpz_t(),
               n2.get_mpz_t());
      const mpz_class decrypted = ((c_lambda - 1) / n * mu) % n;
      pass = pass && c.value == expected && decrypted == x &&
             Decrypt(keys.secret_key, c) == x;
      ++checked;
    }
  }
  // Homomorphic addition over every plaintext pair.
  SeededRandom rng = SeededRandom::FromLabel("acceptance-9");
  for (long x = 0; x < 35; ++x) {
    for (long y = 0; y < 35; ++y) {
      const Ciphertext sum = HomAdd(keys.public_key, Encrypt(keys.public_key, x, rng),
                                    Encrypt(keys.public_key, y, rng), rng);
      pass = pass && Decrypt(keys.secret_key, sum) == (x + y) % 35;
    }
  }
  return {pass, "lambda = 12, mu = 3; " + std::to_string(checked) +
                    " (x, rho) encryptions and 1225 additions over Z_35"};
}

void Report(int number, const std::string& title,
            const std::function<Verdict()>& body, bool& all_pass) {
  Verdict verdict;
  try {
    verdict = body();
  } catch (const std::exception& e) {
    verdict = {false, std::string("exception: ") + e.what()};
  }
  all_pass = all_pass && verdict.pass;
  std::printf("%s criterion %d: %s -- %s\n", verdict.pass ? "PASS" : "FAIL",
              number, title.c_str(), verdict.detail.c_str());
  std::fflush(stdout);
}

int Main() {
  bool all_pass = true;
  SeededRandom key_rng = SeededRandom::FromLabel("acceptance-1024");
  const PaillierKeyPair keys1024 = GeneratePaillierKeyPair(1024, key_rng);
  SeededRandom small_key_rng = SeededRandom::FromLabel("acceptance-256");
  const PaillierKeyPair keys256 = GeneratePaillierKeyPair(256, small_key_rng);

  Report(1, "oracle equivalence on 500 random instances", OracleEquivalence,
         all_pass);
  Report(2, "correctness bound check", [&] { return ReferenceBound(keys1024); },
         all_pass);
  ReferenceRun m100;
  ReferenceRun m400;
  bool runs_ok = true;
  std::string run_error;
  try {
    m100 = RunReferenceInstance(100, keys1024);
    m400 = RunReferenceInstance(400, keys1024);
  } catch (const std::exception& e) {
    runs_ok = false;
    run_error = e.what();
  }
  auto need_runs = [&](auto body) {
    return [&, body]() -> Verdict {
      if (!runs_ok) return {false, "reference instance failed: " + run_error};
      return body();
    };
  };
  Report(3, "exponentiation count",
         need_runs([&] { return ExponentiationCount(m100); }), all_pass);
  Report(4, "communication",
         need_runs([&] { return Communication(m100, m400); }), all_pass);
  Report(5, "OT correctness", [&] { return OtCorrectness(keys256); }, all_pass);
  Report(6, "reconstruction round trip", Reconstruction, all_pass);
  Report(7, "mask statistics", MaskStatistics, all_pass);
  Report(8, "transcript length independence", TranscriptLengths, all_pass);
  Report(9, "known-answer Paillier", KnownAnswerPaillier, all_pass);
  std::printf("%s\n", all_pass ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all_pass ? 0 : 1;
}

}  // namespace
}  // namespace coldstart

int main() { return coldstart::Main(); }
