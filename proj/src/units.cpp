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

#include "cfisac/units.hpp"

#include <cmath>
#include <numbers>

namespace cfisac
{
    double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
    double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
    double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
    double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

    double wrap_broadside(double theta)
    {
        constexpr double pi = std::numbers::pi;
        // First bring theta into (-pi, pi]
        theta = std::remainder(theta, 2.0 * pi);
        if (theta <= -pi)
            theta += 2.0 * pi;

        // Mirror the back half-plane onto the front one: theta -> pi - theta keeps sin(theta)
        if (theta > pi / 2.0)
            theta = pi - theta;
        else if (theta < -pi / 2.0)
            theta = -pi - theta;
        return theta;
    }
}
