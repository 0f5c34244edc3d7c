// SPDX-License-Identifier: Apache-2.0
//
// cfisac: beamforming for cell-free integrated sensing and communication
// Copyright (C) 2026 The cfisac authors
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

#ifndef CFISAC_TYPES_HPP
#define CFISAC_TYPES_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfisac
{
    using cplx = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;

    // All randomness flows through explicitly seeded engines.
    using Rng = std::mt19937_64;

    // Argument outside the mathematical domain of an operation (zero distance, L = 0, ...)
    class DomainError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // A physical beamformer that exceeds the per-AP power budget.
    class InfeasibleInputError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // A retraction produced a zero column; the caller should shrink the step.
    class StepSizeError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Rank-deficient per-AP channel matrix handed to a zero-forcing design.
    class SingularChannelError : public std::runtime_error
    {
    public:
        SingularChannelError(int ap, const std::string &what)
            : std::runtime_error(what), ap_index(ap) {}
        int ap_index;
    };
}

#endif
