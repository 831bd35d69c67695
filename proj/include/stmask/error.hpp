/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace stmask {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition on a mathematical operation violated (zero-norm vector,
// ratio out of range, T < 2 for spatio-temporal masking, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Tensor contents or shape are not acceptable (zero dims, NaN/Inf, shape
// mismatch between operands).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad magic, unknown version or unexpected rank in a tensor file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File payload shorter than its header promises.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Header dims whose element count does not fit in memory arithmetic.
class DimensionOverflowError : public Error {
 public:
  using Error::Error;
};

// Operating-system level I/O failure; the message carries path and errno text.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace stmask
