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

#include "cfisac/manifold.hpp"

#include <cmath>
#include <string>

namespace cfisac::manifold
{
    ManifoldPoint ManifoldPoint::checked(CMatrix x, double tol)
    {
        const double dev = max_column_deviation(x);
        if (!(dev <= tol))
            throw DomainError("ManifoldPoint: column norm deviates from 1 by " + std::to_string(dev));
        return ManifoldPoint(std::move(x));
    }

    ManifoldPoint ManifoldPoint::normalized(CMatrix x)
    {
        for (Eigen::Index m = 0; m < x.cols(); ++m)
        {
            const double nrm = x.col(m).norm();
            if (!(nrm > 0.0) || !std::isfinite(nrm))
                throw StepSizeError("retraction produced a degenerate column " + std::to_string(m));
            x.col(m) /= nrm;
        }
        return ManifoldPoint(std::move(x));
    }

    ManifoldPoint random_point(Eigen::Index rows, Eigen::Index cols, Rng &rng)
    {
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
        CMatrix x(rows, cols);
        // Column-major fill so the stream order is independent of Eigen internals
        for (Eigen::Index m = 0; m < cols; ++m)
            for (Eigen::Index r = 0; r < rows; ++r)
            {
                const double re = gauss(rng);
                const double im = gauss(rng);
                x(r, m) = cplx(re, im);
            }
        return ManifoldPoint::normalized(std::move(x));
    }

    CMatrix project_to_tangent(const ManifoldPoint &x, const CMatrix &g)
    {
        const CMatrix &X = x.matrix();
        CMatrix z = g;
        for (Eigen::Index m = 0; m < X.cols(); ++m)
            z.col(m) -= X.col(m).dot(g.col(m)).real() * X.col(m);
        return z;
    }

    double inner(const CMatrix &a, const CMatrix &b)
    {
        return a.cwiseProduct(b.conjugate()).sum().real();
    }

    double norm(const CMatrix &z) { return z.norm(); }

    ManifoldPoint retract(const ManifoldPoint &x, const CMatrix &z, double alpha)
    {
        if (alpha == 0.0)
            return x;
        return ManifoldPoint::normalized(x.matrix() + alpha * z);
    }

    CMatrix transport(const ManifoldPoint &, const ManifoldPoint &to, const CMatrix &z)
    {
        return project_to_tangent(to, z);
    }

    double max_column_deviation(const CMatrix &x)
    {
        double dev = 0.0;
        for (Eigen::Index m = 0; m < x.cols(); ++m)
            dev = std::max(dev, std::abs(x.col(m).squaredNorm() - 1.0));
        return dev;
    }

    double max_tangency_error(const ManifoldPoint &x, const CMatrix &z)
    {
        double err = 0.0;
        for (Eigen::Index m = 0; m < z.cols(); ++m)
            err = std::max(err, std::abs(x.matrix().col(m).dot(z.col(m)).real()));
        return err;
    }
}
