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


// coldstart: operator entry points for the private cold-start protocol.
//
//   gen-db   synthetic item database
//   import-db / export-db   text form of a database, one item per line
//   keygen   Paillier key file
//   oracle   plaintext least squares on a ratings file
//   run      user role, in-process or against a serving analyst
//   serve    analyst role for a single session
//   bench    reference-size instantiation with a JSON report

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coldstart/baseline.h"
#include "coldstart/channel.h"
#include "coldstart/ec_group.h"
#include "coldstart/errors.h"
#include "coldstart/item_database.h"
#include "coldstart/paillier.h"
#include "coldstart/protocol.h"
#include "coldstart/random.h"
#include "coldstart/session.h"
#include "coldstart/wire.h"

namespace coldstart {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;

// Flags shared by the roles that build an announcement from a database.
struct AnnounceFlags {
  uint32_t batch_size = 0;  // 0: max(#ratings, d)
  uint64_t bound_r = 4;
  uint32_t scale_bits = 0;
  std::string curve = "P-256";
};

void AddAnnounceFlags(CLI::App* cmd, AnnounceFlags& flags) {
  cmd->add_option("--batch-size", flags.batch_size,
                  "Ratings per session after padding (S)");
  cmd->add_option("--bound-r", flags.bound_r, "Bound on |ratings| (B_r)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--scale-bits", flags.scale_bits,
                  "Fixed-point shift of the integer encoding");
  cmd->add_option("--curve", flags.curve, "Base-OT group: P-256 or secp256k1");
}

Announcement MakeAnnouncement(const ItemDatabase& db, const AnnounceFlags& flags,
                              size_t rating_count) {
  uint32_t batch = flags.batch_size;
  if (batch == 0) {
    batch = std::max<uint32_t>(static_cast<uint32_t>(rating_count), db.dim);
  }
  return {ProtocolParams::Make(db.dim, db.items(), batch, db.bound_v,
                               flags.bound_r, flags.scale_bits),
          CurveFromName(flags.curve)};
}

std::unique_ptr<RandomSource> MakeRandom(const std::optional<uint64_t>& seed) {
  if (seed) return std::make_unique<SeededRandom>(SeededRandom::FromU64(*seed));
  return std::make_unique<SystemRandom>();
}

std::vector<Rating> ReadRatings(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return ParseRatingsText(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string Hex(std::span<const uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

// `run` and `oracle` share this rendering byte for byte.
void PrintProfile(const RationalVector& u, const ItemDatabase* db,
                  const std::vector<uint32_t>& predict, uint32_t scale_bits) {
  for (size_t i = 0; i < u.size(); ++i) {
    std::cout << "u[" << i << "] = " << u[i].get_str() << "\n";
  }
  for (uint32_t item : predict) {
    if (db == nullptr || item >= db->items()) {
      throw InvalidArgumentError("--predict item " + std::to_string(item) +
                                 " is not in the database");
    }
    const std::vector<int64_t>& v = db->profiles[item];
    char approx[64];
    std::snprintf(approx, sizeof(approx), "%.9g",
                  PredictRating(u, v, scale_bits));
    std::cout << "rating[" << item
              << "] = " << PredictRatingExact(u, v, scale_bits).get_str()
              << " ~ " << approx << "\n";
  }
  std::cout.flush();
}

// ---- gen-db ---------------------------------------------------------------

struct GenDbFlags {
  uint32_t items = 100;
  uint32_t dim = 8;
  uint64_t bound_v = uint64_t{1} << 20;
  uint64_t seed = 1;
  std::string out;
};

int GenDb(const GenDbFlags& f) {
  const ItemDatabase db = GenerateProfiles(f.items, f.dim, f.bound_v, f.seed);
  WriteFileBytes(f.out, EncodeItemDatabase(db));
  std::cerr << "wrote " << f.out << ": M=" << db.items() << " d=" << db.dim
            << " B_V=" << db.bound_v << "\n";
  return kExitOk;
}

// ---- import-db / export-db ------------------------------------------------

struct ImportDbFlags {
  std::string text;
  uint64_t bound_v = 0;  // 0: largest |entry|
  std::string out;
};

// Lines of d integers are items 1..M-1; the fake item is prepended.
int ImportDb(const ImportDbFlags& f) {
  const std::vector<uint8_t> bytes = ReadFileBytes(f.text);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  ItemDatabase db;
  std::string line;
  uint64_t largest = 1;
  while (std::getline(in, line)) {
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::vector<int64_t> row;
    int64_t v;
    while (fields >> v) {
      row.push_back(v);
      largest = std::max(largest, v < 0 ? 0 - static_cast<uint64_t>(v)
                                         : static_cast<uint64_t>(v));
    }
    if (!fields.eof()) throw ParseError("bad integer in '" + line + "'", 0);
    if (row.empty()) continue;
    if (db.profiles.empty()) {
      db.dim = static_cast<uint32_t>(row.size());
      db.profiles.push_back(std::vector<int64_t>(db.dim, 0));
    }
    db.profiles.push_back(std::move(row));
  }
  db.bound_v = f.bound_v == 0 ? largest : f.bound_v;
  WriteFileBytes(f.out, EncodeItemDatabase(db));
  return kExitOk;
}

int ExportDb(const std::string& path) {
  const ItemDatabase db = DecodeItemDatabase(ReadFileBytes(path));
  std::cout << "# d=" << db.dim << " M=" << db.items() << " B_V=" << db.bound_v
            << "\n";
  for (size_t j = 1; j < db.profiles.size(); ++j) {
    for (size_t i = 0; i < db.dim; ++i) {
      std::cout << (i ? " " : "") << db.profiles[j][i];
    }
    std::cout << "\n";
  }
  return kExitOk;
}

// ---- keygen ---------------------------------------------------------------

struct KeygenFlags {
  unsigned bits = 1024;
  std::optional<uint64_t> seed;
  std::string out;
};

int Keygen(const KeygenFlags& f) {
  auto rng = MakeRandom(f.seed);
  const PaillierKeyPair keys = GeneratePaillierKeyPair(f.bits, *rng);
  WriteFileBytes(f.out, EncodeKeyPair(keys));
  std::cerr << "wrote " << f.out << ": " << keys.public_key.modulus_bits()
            << "-bit modulus\n";
  return kExitOk;
}

// ---- oracle ---------------------------------------------------------------

struct OracleFlags {
  std::string db;
  std::string ratings;
  uint32_t scale_bits = 0;
  std::vector<uint32_t> predict;
};

int Oracle(const OracleFlags& f) {
  const ItemDatabase db = DecodeItemDatabase(ReadFileBytes(f.db));
  const std::vector<Rating> ratings = ReadRatings(f.ratings);
  const RatingBatch batch =
      RatingBatch::Pad(ratings, static_cast<uint32_t>(ratings.size()));
  const RationalVector u = LsqExact(InstanceFromBatch(db, batch, f.scale_bits));
  PrintProfile(u, &db, f.predict, f.scale_bits);
  return kExitOk;
}

// ---- run ------------------------------------------------------------------

struct RunFlags {
  std::string db;
  std::string ratings;
  std::string variant = "fused";
  unsigned paillier_bits = 0;
  std::string key;
  bool in_process = false;
  std::string connect;
  std::vector<uint32_t> predict;
  bool force = false;
  std::optional<uint64_t> seed;
  unsigned workers = 1;
  AnnounceFlags announce;
};

int Run(const RunFlags& f) {
  const std::vector<Rating> ratings = ReadRatings(f.ratings);
  std::optional<ItemDatabase> db;
  if (!f.db.empty()) db = DecodeItemDatabase(ReadFileBytes(f.db));

  UserSessionConfig config;
  config.variant = VariantFromName(f.variant);
  config.modulus_bits = f.paillier_bits;
  config.options.skip_bound_check = f.force;
  if (!f.key.empty()) config.keys = DecodeKeyPair(ReadFileBytes(f.key));

  auto rng = MakeRandom(f.seed);
  auto user_rng = rng->Fork();
  UserSessionReport report;
  if (f.connect.empty()) {
    if (!db) throw InvalidArgumentError("--in-process needs --db");
    const Announcement ann = MakeAnnouncement(*db, f.announce, ratings.size());
    auto analyst_rng = rng->Fork();
    AnalystOptions analyst_options;
    analyst_options.workers = f.workers;
    InProcessReport full = RunInProcess(*db, ann, ratings, config, *user_rng,
                                        *analyst_rng, analyst_options);
    report = std::move(full.user);
    std::cerr << "transcript: " << full.transcript.TotalBytes() << " bytes, sha256 "
              << Hex(full.transcript_sha256) << "\n";
  } else {
    auto channel = SocketChannel::Connect(f.connect);
    report = RunUserSession(*channel, ratings, config, *user_rng);
  }
  std::cerr << "modulus: " << report.modulus_bits << " bits (minimum "
            << report.announcement.params.min_modulus_bits << ")\n";
  PrintProfile(report.profile, db ? &*db : nullptr, f.predict,
               report.announcement.params.scale_bits);
  return kExitOk;
}

// ---- serve ----------------------------------------------------------------

struct ServeFlags {
  std::string db;
  std::string listen = "127.0.0.1:0";
  std::optional<uint64_t> seed;
  unsigned workers = 1;
  AnnounceFlags announce;
};

int Serve(const ServeFlags& f) {
  const ItemDatabase db = DecodeItemDatabase(ReadFileBytes(f.db));
  if (f.announce.batch_size == 0) {
    throw InvalidArgumentError("serve needs --batch-size");
  }
  const Announcement ann = MakeAnnouncement(db, f.announce, 0);
  SocketListener listener(f.listen);
  std::cout << "listening on port " << listener.port() << std::endl;
  auto channel = listener.Accept();
  auto rng = MakeRandom(f.seed);
  AnalystOptions options;
  options.workers = f.workers;
  const AnalystSessionReport report =
      ServeAnalystSession(*channel, db, ann, *rng, options);
  std::cerr << "round 2: " << report.round2_seconds << " s, "
            << report.stats.exponentiations.scalar
            << " scalar exponentiations\n";
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchFlags {
  uint32_t items = 100;
  uint32_t dim = 8;
  uint32_t ratings = 10;
  unsigned paillier_bits = 1024;
  unsigned workers = 1;
  std::string report;
  uint64_t seed = 1;
  uint64_t bound_v = uint64_t{1} << 20;
  std::string variant = "fused";
  AnnounceFlags announce;
};

// s distinct real items whose profiles span Q^d, with ratings in [-B_r, B_r].
std::vector<Rating> BenchRatings(const ItemDatabase& db, uint32_t count,
                                 uint64_t bound_r, RandomSource& rng) {
  if (count < db.dim || count > db.items() - 1) {
    throw InvalidArgumentError("--ratings must lie in [d, M-1]");
  }
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

int Bench(const BenchFlags& f) {
  const ItemDatabase db = GenerateProfiles(f.items, f.dim, f.bound_v, f.seed);
  SeededRandom master = SeededRandom::FromU64(f.seed);
  auto workload_rng = master.Fork();
  auto user_rng = master.Fork();
  auto analyst_rng = master.Fork();
  const std::vector<Rating> ratings =
      BenchRatings(db, f.ratings, f.announce.bound_r, *workload_rng);
  const Announcement ann = MakeAnnouncement(db, f.announce, ratings.size());

  UserSessionConfig config;
  config.variant = VariantFromName(f.variant);
  config.modulus_bits = f.paillier_bits;
  AnalystOptions analyst_options;
  analyst_options.workers = f.workers;
  const InProcessReport run = RunInProcess(db, ann, ratings, config, *user_rng,
                                           *analyst_rng, analyst_options);
  const RationalVector oracle = LsqExact(
      InstanceFromBatch(db, RatingBatch::Pad(ratings, ann.params.batch_size),
                        ann.params.scale_bits));

  using nlohmann::ordered_json;
  const uint64_t d = f.dim;
  ordered_json messages = ordered_json::array();
  for (const TranscriptEntry& e : run.transcript.entries) {
    messages.push_back(
        {{"type", MessageTypeName(e.type)},
         {"direction", e.direction == Direction::kAnalystToUser
                           ? "analyst_to_user"
                           : "user_to_analyst"},
         {"bytes", e.bytes}});
  }
  ordered_json exps = {
      {"analyst_scalar", run.analyst.stats.exponentiations.scalar},
      {"analyst_randomizer", run.analyst.stats.exponentiations.randomizer},
      {"analyst_decryption", run.analyst.stats.exponentiations.decryption},
  };
  if (config.variant == Variant::kFused) {
    exps["expected_scalar"] =
        uint64_t{ann.params.items} * (d * d + d) * ann.params.batch_size;
  }
  ordered_json report = {
      {"parameters",
       {{"items", ann.params.items},
        {"dim", ann.params.dim},
        {"ratings", ratings.size()},
        {"batch_size", ann.params.batch_size},
        {"bound_v", ann.params.bound_v},
        {"bound_r", ann.params.bound_r},
        {"scale_bits", ann.params.scale_bits},
        {"min_modulus_bits", ann.params.min_modulus_bits},
        {"paillier_bits", run.user.modulus_bits},
        {"curve", CurveName(ann.curve)},
        {"variant", VariantName(config.variant)},
        {"workers", f.workers},
        {"seed", f.seed}}},
      {"timings_seconds",
       {{"keygen", run.user.keygen_seconds},
        {"user_round1", run.user.round1_seconds},
        {"analyst_round2", run.analyst.round2_seconds},
        {"user_finalize", run.user.finalize_seconds}}},
      {"published_seconds",
       {{"user_round1", 0.4}, {"analyst_round2", 150.0}, {"user_finalize", 1.4}}},
      {"exponentiations", exps},
      {"bytes",
       {{"total", run.transcript.TotalBytes()},
        {"analyst_to_user", run.transcript.BytesFrom(Direction::kAnalystToUser)},
        {"user_to_analyst", run.transcript.BytesFrom(Direction::kUserToAnalyst)},
        {"messages", messages}}},
      {"transcript_sha256", Hex(run.transcript_sha256)},
      {"oracle_match", run.user.profile == oracle},
  };
  const std::string text = report.dump(2) + "\n";
  if (!f.report.empty()) {
    std::ofstream out(f.report, std::ios::trunc);
    out << text;
    if (!out) throw TransportError("cannot write " + f.report);
  }
  std::cout << text;
  return run.user.profile == oracle ? kExitOk : 1;
}

int ExitCodeFor(const std::exception& error) {
  if (dynamic_cast<const InvalidArgumentError*>(&error)) return kExitUsage;
  const auto code = static_cast<int>(AbortCodeFor(error));
  switch (code) {
    case 3: case 4: case 5: case 6:
      return code;
    default:
      return static_cast<int>(AbortCode::kInternal);
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Private cold-start recommendation: user profile from a batch "
               "of ratings without revealing them"};
  app.require_subcommand(1);
  std::function<int()> action;

  GenDbFlags gen_db;
  auto* gen_db_cmd = app.add_subcommand("gen-db", "Write a synthetic database");
  gen_db_cmd->add_option("--items", gen_db.items, "M, fake item included");
  gen_db_cmd->add_option("--dim", gen_db.dim, "Profile dimension d");
  gen_db_cmd->add_option("--bound-v", gen_db.bound_v, "Bound on |entries|");
  gen_db_cmd->add_option("--seed", gen_db.seed, "Generator seed");
  gen_db_cmd->add_option("--out", gen_db.out, "Output file")->required();
  gen_db_cmd->callback([&] { action = [&] { return GenDb(gen_db); }; });

  ImportDbFlags import_db;
  auto* import_cmd =
      app.add_subcommand("import-db", "Database file from a text file");
  import_cmd->add_option("--text", import_db.text, "One item per line")
      ->required();
  import_cmd->add_option("--bound-v", import_db.bound_v,
                         "Bound on |entries|; default the largest one");
  import_cmd->add_option("--out", import_db.out, "Output file")->required();
  import_cmd->callback([&] { action = [&] { return ImportDb(import_db); }; });

  std::string export_path;
  auto* export_cmd =
      app.add_subcommand("export-db", "Print a database as text");
  export_cmd->add_option("--db", export_path, "Database file")->required();
  export_cmd->callback([&] { action = [&] { return ExportDb(export_path); }; });

  KeygenFlags keygen;
  auto* keygen_cmd = app.add_subcommand("keygen", "Write a Paillier key file");
  keygen_cmd->add_option("--bits", keygen.bits, "Modulus size (even, >= 16)");
  keygen_cmd->add_option("--seed", keygen.seed, "Deterministic randomness");
  keygen_cmd->add_option("--out", keygen.out, "Output file")->required();
  keygen_cmd->callback([&] { action = [&] { return Keygen(keygen); }; });

  OracleFlags oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Plaintext least squares");
  oracle_cmd->add_option("--db", oracle.db, "Database file")->required();
  oracle_cmd->add_option("--ratings", oracle.ratings, "Ratings file")->required();
  oracle_cmd->add_option("--scale-bits", oracle.scale_bits,
                         "Fixed-point shift for predictions");
  oracle_cmd->add_option("--predict", oracle.predict, "Item to predict");
  oracle_cmd->callback([&] { action = [&] { return Oracle(oracle); }; });

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run the user role");
  run_cmd->add_option("--db", run.db, "Database file");
  run_cmd->add_option("--ratings", run.ratings, "Ratings file")->required();
  run_cmd->add_option("--variant", run.variant, "generic or fused")
      ->check(CLI::IsMember({"generic", "fused"}));
  run_cmd->add_option("--paillier-bits", run.paillier_bits,
                      "Key size; 0 picks the smallest admissible one");
  run_cmd->add_option("--key", run.key, "Key file instead of generating");
  auto* in_process =
      run_cmd->add_flag("--in-process", run.in_process, "Run both roles here");
  run_cmd->add_option("--connect", run.connect, "Analyst host:port")
      ->excludes(in_process);
  run_cmd->add_option("--predict", run.predict, "Item to predict");
  run_cmd->add_flag("--force", run.force, "Allow a key below the bound");
  run_cmd->add_option("--seed", run.seed, "Deterministic randomness");
  run_cmd->add_option("--workers", run.workers, "Analyst Round 2 threads")
      ->check(CLI::PositiveNumber);
  AddAnnounceFlags(run_cmd, run.announce);
  run_cmd->callback([&] { action = [&] { return Run(run); }; });

  ServeFlags serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve one analyst session");
  serve_cmd->add_option("--db", serve.db, "Database file")->required();
  serve_cmd->add_option("--listen", serve.listen, "host:port, port 0 picks one");
  serve_cmd->add_option("--seed", serve.seed, "Deterministic randomness");
  serve_cmd->add_option("--workers", serve.workers, "Round 2 threads")
      ->check(CLI::PositiveNumber);
  AddAnnounceFlags(serve_cmd, serve.announce);
  serve_cmd->callback([&] { action = [&] { return Serve(serve); }; });

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark one session");
  bench_cmd->add_option("--items", bench.items, "M, fake item included");
  bench_cmd->add_option("--dim", bench.dim, "Profile dimension d");
  bench_cmd->add_option("--ratings", bench.ratings, "Real ratings s");
  bench_cmd->add_option("--paillier-bits", bench.paillier_bits, "Key size");
  bench_cmd->add_option("--workers", bench.workers, "Round 2 threads")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", bench.report, "JSON report file");
  bench_cmd->add_option("--seed", bench.seed, "Workload and protocol seed");
  bench_cmd->add_option("--bound-v", bench.bound_v, "Bound on |entries|");
  bench_cmd->add_option("--variant", bench.variant, "generic or fused")
      ->check(CLI::IsMember({"generic", "fused"}));
  AddAnnounceFlags(bench_cmd, bench.announce);
  bench_cmd->callback([&] { action = [&] { return Bench(bench); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
}

}  // namespace
}  // namespace coldstart

int main(int argc, char** argv) { return coldstart::Main(argc, argv); }
