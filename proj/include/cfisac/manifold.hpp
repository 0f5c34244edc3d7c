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

#ifndef CFISAC_MANIFOLD_HPP
#define CFISAC_MANIFOLD_HPP

#include "cfisac/types.hpp"

// Complex oblique manifold: complex matrices whose columns all have unit Euclidean norm.
// Each column lives on its own sphere; tangent vectors, projections and transports act
// column by column. Tangent and ambient vectors are plain matrices of the point's shape.
namespace cfisac::manifold
{
    class ManifoldPoint
    {
    public:
        ManifoldPoint() = default;

        // Takes a matrix that is already on the manifold; throws DomainError if any column
        // norm differs from one by more than `tol`.
        static ManifoldPoint checked(CMatrix x, double tol = 1e-12);

        // Normalises each column. Throws StepSizeError if a column is zero.
        static ManifoldPoint normalized(CMatrix x);

        const CMatrix &matrix() const { return x_; }
        Eigen::Index rows() const { return x_.rows(); }
        Eigen::Index cols() const { return x_.cols(); }

    private:
        explicit ManifoldPoint(CMatrix x) : x_(std::move(x)) {}
        CMatrix x_;
    };

    ManifoldPoint random_point(Eigen::Index rows, Eigen::Index cols, Rng &rng);

    // Z_m = G_m - Re<X_m, G_m> X_m for every column
    CMatrix project_to_tangent(const ManifoldPoint &x, const CMatrix &g);

    // Real trace metric Re(sum conj(a) .* b)
    double inner(const CMatrix &a, const CMatrix &b);
    double norm(const CMatrix &z);

    // Column-wise normalisation of X + alpha * Z
    ManifoldPoint retract(const ManifoldPoint &x, const CMatrix &z, double alpha);

    // Projection-based transport of a tangent vector at `from` to the tangent space at `to`
    CMatrix transport(const ManifoldPoint &from, const ManifoldPoint &to, const CMatrix &z);

    // max_m | ||X_m||^2 - 1 |
    double max_column_deviation(const CMatrix &x);

    // max_m |Re<X_m, Z_m>|
    double max_tangency_error(const ManifoldPoint &x, const CMatrix &z);
}

#endif
