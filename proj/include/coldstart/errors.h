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

#ifndef COLDSTART_ERRORS_H_
#define COLDSTART_ERRORS_H_

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace coldstart {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a published bound or a domain precondition.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Caller passed structurally invalid arguments (dimension mismatch etc.).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class DecryptionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// The plaintext Gram matrix V_S V_S^T is rank deficient.
class RankError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

// A non-zero, non-invertible residue was hit; it exposes a factor of n.
class FactorFoundError : public Error {
 public:
  explicit FactorFoundError(mpz_class factor)
      : Error("non-invertible residue exposes factor " + factor.get_str()),
        factor_(std::move(factor)) {}

  const mpz_class& factor() const { return factor_; }

 private:
  mpz_class factor_;
};

// No fraction within the (P, Q) bounds matches the residue.
class ReconstructionError : public Error {
 public:
  explicit ReconstructionError(const std::string& what,
                               std::optional<size_t> index = std::nullopt)
      : Error(index ? what + " (coordinate " + std::to_string(*index) + ")"
                    : what),
        index_(index) {}

  std::optional<size_t> index() const { return index_; }

 private:
  std::optional<size_t> index_;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace coldstart

#endif  // COLDSTART_ERRORS_H_
