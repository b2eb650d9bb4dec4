// Copyright 2026 The sherec Authors
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

#ifndef SHEREC_ERROR_HPP_
#define SHEREC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sherec {

enum class ErrorCode {
  kDomain,                // argument outside the operation's domain
  kZeroPlaintext,         // a multiplicative plaintext (or product) is 0 mod N
  kDegenerateCiphertext,  // a ciphertext component is not a unit where one is required
  kKeyIntegrity,          // key material violates its invariants
  kGeneration,            // prime generation ran out of attempts
  kRetry,                 // transient non-invertible residue, caller may retry
  kRetryExhausted,
  kProtocolOrder,         // message or call arrived in the wrong stage/order
  kProtocol,              // malformed or unexpected message
  kAborted,               // peer sent ABORT
  kTransport,
  kOracleMismatch,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sherec

#endif  // SHEREC_ERROR_HPP_
