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

#include "coldstart/wire.h"

#include <charconv>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "coldstart/bigint.h"
#include "coldstart/errors.h"

namespace coldstart {

namespace {

constexpr std::array<uint8_t, 4> kKeyMagic = {'C', 'S', 'K', 'Y'};
constexpr std::array<uint8_t, 4> kDatabaseMagic = {'C', 'S', 'D', 'B'};
constexpr size_t kAnnouncementSize = 37;

class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U32(uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) U8((v >> shift) & 0xFF);
  }
  void U64(uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) U8((v >> shift) & 0xFF);
  }
  void Raw(std::span<const uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  void Bytes(std::span<const uint8_t> bytes) {
    U32(static_cast<uint32_t>(bytes.size()));
    Raw(bytes);
  }
  void Natural(const mpz_class& v) { Bytes(ToBigEndian(v)); }
  void FixedNatural(const mpz_class& v, size_t width) {
    Bytes(ToBigEndianFixed(v, width));
  }

  std::vector<uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> bytes, size_t base_offset = 0)
      : bytes_(bytes), base_(base_offset) {}

  size_t offset() const { return base_ + pos_; }
  size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(what, offset());
  }

  uint8_t U8() {
    Need(1, "u8");
    return bytes_[pos_++];
  }
  uint32_t U32() {
    Need(4, "u32");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  uint64_t U64() {
    Need(8, "u64");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  std::span<const uint8_t> Raw(size_t n, const char* what) {
    Need(n, what);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::span<const uint8_t> Bytes(const char* what) {
    const uint32_t length = U32();
    return Raw(length, what);
  }
  // Minimal big-endian encoding: no leading zero byte.
  mpz_class Natural(const char* what) {
    const size_t start = offset();
    auto bytes = Bytes(what);
    if (!bytes.empty() && bytes[0] == 0) {
      throw ParseError(std::string("non-canonical ") + what, start);
    }
    return FromBigEndian(bytes);
  }
  // Exactly `width` bytes, value in [1, bound).
  mpz_class FixedNatural(size_t width, const mpz_class& bound,
                         const char* what) {
    const size_t start = offset();
    const uint32_t length = U32();
    if (length != width) {
      throw ParseError(std::string(what) + " has width " +
                           std::to_string(length) + ", expected " +
                           std::to_string(width),
                       start);
    }
    mpz_class v = FromBigEndian(Raw(length, what));
    if (v <= 0 || v >= bound) {
      throw ParseError(std::string(what) + " out of range", start);
    }
    return v;
  }
  // Guards allocations driven by untrusted counts.
  void CheckCount(uint64_t count, size_t min_item_size, const char* what) {
    if (min_item_size > 0 && count > remaining() / min_item_size) {
      Fail(std::string("implausible ") + what + " count " +
           std::to_string(count));
    }
  }
  void ExpectMagic(std::span<const uint8_t> magic, const char* what) {
    const size_t start = offset();
    auto got = Raw(magic.size(), what);
    if (!std::equal(got.begin(), got.end(), magic.begin())) {
      throw ParseError(std::string("bad ") + what, start);
    }
  }
  void ExpectEnd() const {
    if (pos_ != bytes_.size()) Fail("trailing bytes");
  }

 private:
  void Need(size_t n, const char* what) const {
    if (remaining() < n) Fail(std::string("truncated ") + what);
  }

  std::span<const uint8_t> bytes_;
  size_t base_;
  size_t pos_ = 0;
};

void WriteCiphertext(ByteWriter& w, const Ciphertext& c,
                     const PaillierPublicKey& pk) {
  w.FixedNatural(c.value, pk.ciphertext_bytes());
}

Ciphertext ReadCiphertext(ByteReader& r, const PaillierPublicKey& pk) {
  return Ciphertext{
      r.FixedNatural(pk.ciphertext_bytes(), pk.n_squared(), "ciphertext")};
}

void WriteSigned(ByteWriter& w, int64_t v) {
  w.U8(v < 0 ? 1 : 0);
  const uint64_t magnitude =
      v < 0 ? 0 - static_cast<uint64_t>(v) : static_cast<uint64_t>(v);
  mpz_class m;
  mpz_import(m.get_mpz_t(), 1, 1, sizeof(magnitude), 0, 0, &magnitude);
  w.Natural(m);
}

int64_t ReadSigned(ByteReader& r) {
  const size_t start = r.offset();
  const uint8_t sign = r.U8();
  if (sign > 1) throw ParseError("bad sign byte", start);
  const mpz_class magnitude = r.Natural("integer magnitude");
  if (sign == 1 && magnitude == 0) {
    throw ParseError("negative zero is not canonical", start);
  }
  static_assert(sizeof(long) == sizeof(int64_t));
  const mpz_class value = sign == 1 ? mpz_class(-magnitude) : magnitude;
  if (!mpz_fits_slong_p(value.get_mpz_t())) {
    throw ParseError("integer exceeds 64 bits", start);
  }
  return mpz_get_si(value.get_mpz_t());
}

}  // namespace

std::string_view MessageTypeName(MessageType type) {
  switch (type) {
    case MessageType::kParamsAnnounce:
      return "ParamsAnnounce";
    case MessageType::kRound1:
      return "Round1";
    case MessageType::kRound2:
      return "Round2";
    case MessageType::kAbort:
      return "Abort";
  }
  return "Unknown";
}

std::vector<uint8_t> EncodeEnvelope(const Envelope& envelope) {
  if (envelope.body.size() > std::numeric_limits<uint32_t>::max()) {
    throw RangeError("message body too large");
  }
  ByteWriter w;
  w.Raw(kEnvelopeMagic);
  w.U8(kWireVersion);
  w.U8(static_cast<uint8_t>(envelope.type));
  w.Bytes(envelope.body);
  return w.Take();
}

EnvelopeHeader DecodeEnvelopeHeader(std::span<const uint8_t> header) {
  ByteReader r(header);
  r.ExpectMagic(kEnvelopeMagic, "envelope magic");
  const size_t version_offset = r.offset();
  if (r.U8() != kWireVersion) {
    throw ParseError("unsupported wire version", version_offset);
  }
  const size_t type_offset = r.offset();
  const uint8_t type = r.U8();
  if (type < 1 || type > 4) throw ParseError("unknown message type", type_offset);
  const uint32_t length = r.U32();
  return {static_cast<MessageType>(type), length};
}

Envelope DecodeEnvelope(std::span<const uint8_t> bytes) {
  if (bytes.size() < kEnvelopeHeaderSize) {
    throw ParseError("truncated envelope header", bytes.size());
  }
  const EnvelopeHeader header =
      DecodeEnvelopeHeader(bytes.first(kEnvelopeHeaderSize));
  const size_t available = bytes.size() - kEnvelopeHeaderSize;
  if (available != header.body_length) {
    throw ParseError("body length " + std::to_string(header.body_length) +
                         " does not match " + std::to_string(available) +
                         " available bytes",
                     kEnvelopeHeaderSize - 4);
  }
  Envelope out;
  out.type = header.type;
  out.body.assign(bytes.begin() + kEnvelopeHeaderSize, bytes.end());
  return out;
}

std::vector<uint8_t> EncodeAnnouncement(const Announcement& announcement) {
  const ProtocolParams& p = announcement.params;
  ByteWriter w;
  w.U32(p.dim);
  w.U32(p.items);
  w.U32(p.batch_size);
  w.U64(p.bound_v);
  w.U64(p.bound_r);
  w.U32(p.scale_bits);
  w.U32(p.min_modulus_bits);
  w.U8(static_cast<uint8_t>(announcement.curve));
  return w.Take();
}

Announcement DecodeAnnouncement(std::span<const uint8_t> body) {
  ByteReader r(body);
  Announcement a;
  a.params.dim = r.U32();
  a.params.items = r.U32();
  a.params.batch_size = r.U32();
  a.params.bound_v = r.U64();
  a.params.bound_r = r.U64();
  a.params.scale_bits = r.U32();
  a.params.min_modulus_bits = r.U32();
  const size_t curve_offset = r.offset();
  const uint8_t curve = r.U8();
  if (curve != static_cast<uint8_t>(CurveId::kP256) &&
      curve != static_cast<uint8_t>(CurveId::kSecp256k1)) {
    throw ParseError("unknown curve id", curve_offset);
  }
  a.curve = static_cast<CurveId>(curve);
  r.ExpectEnd();
  try {
    a.params.Validate();
  } catch (const Error& e) {
    throw ParseError(std::string("invalid parameters: ") + e.what(), 0);
  }
  static_assert(kAnnouncementSize == 37);
  return a;
}

std::vector<uint8_t> EncodeRound1(const Round1Message& message) {
  const PaillierPublicKey pk(message.modulus);
  ByteWriter w;
  w.U8(static_cast<uint8_t>(message.variant));
  w.Natural(message.modulus);
  w.U32(static_cast<uint32_t>(message.rating_ciphertexts.size()));
  for (const Ciphertext& c : message.rating_ciphertexts) WriteCiphertext(w, c, pk);
  w.U32(static_cast<uint32_t>(message.queries.size()));
  for (const OtQuery& q : message.queries) {
    w.U32(static_cast<uint32_t>(q.selection.size()));
    for (const Ciphertext& c : q.selection) WriteCiphertext(w, c, pk);
    w.Bytes(q.base_ot_message);
  }
  return w.Take();
}

Round1Message DecodeRound1(std::span<const uint8_t> body) {
  ByteReader r(body);
  Round1Message m;
  const size_t variant_offset = r.offset();
  const uint8_t variant = r.U8();
  if (variant > 1) throw ParseError("unknown variant", variant_offset);
  m.variant = static_cast<Variant>(variant);
  const size_t key_offset = r.offset();
  m.modulus = r.Natural("Paillier modulus");
  if (m.modulus < 3 || mpz_even_p(m.modulus.get_mpz_t())) {
    throw ParseError("Paillier modulus must be odd and >= 3", key_offset);
  }
  const PaillierPublicKey pk(m.modulus);
  const size_t ct_size = 4 + pk.ciphertext_bytes();
  const uint32_t ct_count = r.U32();
  r.CheckCount(ct_count, ct_size, "rating ciphertext");
  for (uint32_t i = 0; i < ct_count; ++i) {
    m.rating_ciphertexts.push_back(ReadCiphertext(r, pk));
  }
  const uint32_t query_count = r.U32();
  r.CheckCount(query_count, 8, "OT query");
  for (uint32_t i = 0; i < query_count; ++i) {
    OtQuery q;
    const uint32_t cols = r.U32();
    r.CheckCount(cols, ct_size, "PIR slot");
    for (uint32_t c = 0; c < cols; ++c) q.selection.push_back(ReadCiphertext(r, pk));
    auto base = r.Bytes("base OT message");
    q.base_ot_message.assign(base.begin(), base.end());
    m.queries.push_back(std::move(q));
  }
  r.ExpectEnd();
  return m;
}

std::vector<uint8_t> EncodeRound2(const Round2Message& message,
                                  const PaillierPublicKey& pk) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(message.responses.size()));
  for (const OtResponse& resp : message.responses) {
    w.U32(resp.rows);
    w.U32(resp.chunks);
    if (resp.cells.size() != static_cast<size_t>(resp.rows) * resp.chunks) {
      throw InvalidArgumentError("OT response cell count mismatch");
    }
    for (const Ciphertext& c : resp.cells) WriteCiphertext(w, c, pk);
    w.Bytes(resp.base_ot.sender_point);
    w.U32(static_cast<uint32_t>(resp.base_ot.masked_records.size()));
    for (const PadSeed& seed : resp.base_ot.masked_records) w.Bytes(seed);
  }
  return w.Take();
}

Round2Message DecodeRound2(std::span<const uint8_t> body,
                           const PaillierPublicKey& pk) {
  ByteReader r(body);
  Round2Message m;
  const size_t ct_size = 4 + pk.ciphertext_bytes();
  const uint32_t count = r.U32();
  r.CheckCount(count, 16, "OT response");
  for (uint32_t i = 0; i < count; ++i) {
    OtResponse resp;
    resp.rows = r.U32();
    resp.chunks = r.U32();
    const uint64_t cells = static_cast<uint64_t>(resp.rows) * resp.chunks;
    r.CheckCount(cells, ct_size, "OT response cell");
    resp.cells.reserve(cells);
    for (uint64_t c = 0; c < cells; ++c) resp.cells.push_back(ReadCiphertext(r, pk));
    auto point = r.Bytes("base OT sender point");
    resp.base_ot.sender_point.assign(point.begin(), point.end());
    const uint32_t records = r.U32();
    r.CheckCount(records, 4 + sizeof(PadSeed), "base OT record");
    for (uint32_t k = 0; k < records; ++k) {
      const size_t start = r.offset();
      auto bytes = r.Bytes("base OT record");
      if (bytes.size() != sizeof(PadSeed)) {
        throw ParseError("base OT record must be 32 bytes", start);
      }
      PadSeed seed;
      std::copy(bytes.begin(), bytes.end(), seed.begin());
      resp.base_ot.masked_records.push_back(seed);
    }
    m.responses.push_back(std::move(resp));
  }
  r.ExpectEnd();
  return m;
}

std::vector<uint8_t> EncodeAbort(const AbortMessage& message) {
  ByteWriter w;
  w.U8(message.code);
  w.Bytes(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(message.reason.data()),
      message.reason.size()));
  return w.Take();
}

AbortMessage DecodeAbort(std::span<const uint8_t> body) {
  ByteReader r(body);
  AbortMessage m;
  m.code = r.U8();
  auto reason = r.Bytes("abort reason");
  m.reason.assign(reason.begin(), reason.end());
  r.ExpectEnd();
  return m;
}

std::vector<uint8_t> EncodeKeyPair(const PaillierKeyPair& keys) {
  ByteWriter w;
  w.Raw(kKeyMagic);
  w.U8(kWireVersion);
  w.Natural(keys.secret_key.n);
  w.Natural(keys.secret_key.lambda);
  w.Natural(keys.secret_key.mu);
  return w.Take();
}

PaillierKeyPair DecodeKeyPair(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic(kKeyMagic, "key file magic");
  const size_t version_offset = r.offset();
  if (r.U8() != kWireVersion) {
    throw ParseError("unsupported key file version", version_offset);
  }
  PaillierSecretKey sk;
  sk.n = r.Natural("n");
  sk.lambda = r.Natural("lambda");
  sk.mu = r.Natural("mu");
  r.ExpectEnd();
  try {
    return PaillierKeyPairFromSecret(std::move(sk));
  } catch (const InvalidArgumentError& e) {
    throw ParseError(std::string("inconsistent key: ") + e.what(), 0);
  }
}

std::vector<uint8_t> EncodeItemDatabase(const ItemDatabase& db) {
  db.Validate();
  ByteWriter w;
  w.Raw(kDatabaseMagic);
  w.U8(kWireVersion);
  w.U32(db.dim);
  w.U32(db.items());
  w.U64(db.bound_v);
  for (const auto& profile : db.profiles) {
    for (int64_t v : profile) WriteSigned(w, v);
  }
  return w.Take();
}

ItemDatabase DecodeItemDatabase(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectMagic(kDatabaseMagic, "database magic");
  const size_t version_offset = r.offset();
  if (r.U8() != kWireVersion) {
    throw ParseError("unsupported database version", version_offset);
  }
  ItemDatabase db;
  db.dim = r.U32();
  const uint32_t items = r.U32();
  db.bound_v = r.U64();
  // Each entry takes at least a sign byte and a length prefix.
  r.CheckCount(static_cast<uint64_t>(items) * db.dim, 5, "profile entry");
  db.profiles.assign(items, std::vector<int64_t>(db.dim));
  for (auto& profile : db.profiles) {
    for (int64_t& v : profile) v = ReadSigned(r);
  }
  r.ExpectEnd();
  try {
    db.Validate();
  } catch (const Error& e) {
    throw ParseError(std::string("invalid database: ") + e.what(), 0);
  }
  return db;
}

std::vector<Rating> ParseRatingsText(std::string_view text) {
  std::vector<Rating> out;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_number = 0;
  size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t line_offset = offset;
    offset += line.size() + 1;
    if (const size_t hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream fields(line);
    std::string item_text, rating_text, extra;
    if (!(fields >> item_text)) continue;
    if (!(fields >> rating_text) || (fields >> extra)) {
      throw ParseError("line " + std::to_string(line_number) +
                           ": expected 'item rating'",
                       line_offset);
    }
    Rating rating;
    auto parse = [&](const std::string& s, auto& value) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line_number) +
                             ": bad integer '" + s + "'",
                         line_offset);
      }
    };
    parse(item_text, rating.item);
    parse(rating_text, rating.value);
    out.push_back(rating);
  }
  return out;
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TransportError("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TransportError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TransportError("short write to " + path);
}

void Transcript::Record(Direction direction, MessageType type, size_t bytes) {
  entries.push_back({direction, type, bytes});
}

size_t Transcript::TotalBytes() const {
  size_t total = 0;
  for (const auto& e : entries) total += e.bytes;
  return total;
}

size_t Transcript::BytesFrom(Direction direction) const {
  size_t total = 0;
  for (const auto& e : entries) {
    if (e.direction == direction) total += e.bytes;
  }
  return total;
}

}  // namespace coldstart
