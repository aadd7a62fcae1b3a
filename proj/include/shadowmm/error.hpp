// Copyright 2026 The shadowmm Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace shadowmm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Input failed a structural check (non-Hermitian, not PSD, bad trace, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Coefficients were computed in one basis and used against another.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

class EffectOutsideSpan : public Error {
 public:
  EffectOutsideSpan(std::size_t index, double residual)
      : Error("effect " + std::to_string(index) + " lies outside the basis span (residual " +
              std::to_string(residual) + ")"),
        index_(index),
        residual_(residual) {}
  std::size_t index() const { return index_; }
  double residual() const { return residual_; }

 private:
  std::size_t index_;
  double residual_;
};

/// The observable has a component orthogonal to the POVM span; it cannot be
/// estimated unbiasedly from this measurement.
class ObservableOutsideSpan : public Error {
 public:
  explicit ObservableOutsideSpan(double residual)
      : Error("observable lies outside the POVM span (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class ZeroProbability : public Error {
 public:
  explicit ZeroProbability(std::vector<std::size_t> indices)
      : Error(describe(indices)), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  static std::string describe(const std::vector<std::size_t>& idx) {
    std::string s = "outcome probabilities at or below the floor at indices [";
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(idx[i]);
    }
    return s + "]";
  }
  std::vector<std::size_t> indices_;
};

class SingularKKT : public Error {
 public:
  using Error::Error;
};

class NotPseudoInverse : public Error {
 public:
  explicit NotPseudoInverse(double deviation)
      : Error("R^T L deviates from the identity by " + std::to_string(deviation)),
        deviation_(deviation) {}
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

/// A configured size limit (effect count, qubit count) would be exceeded.
class ResourceCap : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace shadowmm
