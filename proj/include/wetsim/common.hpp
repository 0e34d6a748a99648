// SPDX-License-Identifier: Apache-2.0
//
// wetsim - training design and link-level simulation for multi-antenna
// wireless energy transfer
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace wetsim {

/// Thrown when a caller violates a documented precondition.
class ContractViolation : public std::invalid_argument {
  public:
    explicit ContractViolation(const std::string &what) : std::invalid_argument(what) {}
};

/// Thrown when a numerical routine fails to meet its accuracy contract.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string &what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_ = 0.0;
};

/// Invalid or inconsistent user configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Filesystem problem reading or writing experiment data (CLI exit code 3).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// splitmix64 finalizer, used as the seed-mixing primitive everywhere.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derived-stream rule: stream k of a master seed is an mt19937_64 seeded
/// with splitmix64(master + (k+1) * golden_gamma). Streams with distinct
/// indices are independent for all practical purposes and reproducible
/// across runs and thread counts.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
    return std::mt19937_64(splitmix64(master_seed + (stream_index + 1) * golden_gamma));
}

inline constexpr const char *kVersion = "0.1.0";

} // namespace wetsim
