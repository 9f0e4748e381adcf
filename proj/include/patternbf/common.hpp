// SPDX-License-Identifier: Apache-2.0
//
// patternbf: pattern-driven beamformer synthesis for planar arrays
// Copyright (C) 2026 The patternbf authors
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

#ifndef PATTERNBF_COMMON_HPP
#define PATTERNBF_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace patternbf
{

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using cd = std::complex<double>;
using CVectorXd = CVector<double>;
using CMatrixXd = CMatrix<double>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Row-major real matrix; flattening a pattern yields the cell order i * W + j.
using PatternMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }

enum class ErrorKind
{
    InvalidArgument,
    DegenerateInput,
    GridMismatch,
    NonFinite,
    Parse,
    Io,
    Unsupported,
    Resource,
};

inline const char *error_kind_name(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::DegenerateInput: return "degenerate_input";
    case ErrorKind::GridMismatch: return "grid_mismatch";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Resource: return "resource";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error
{
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message)
{
    throw Error(kind, message);
}

} // namespace patternbf

#endif
