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

#ifndef CFISAC_UNITS_HPP
#define CFISAC_UNITS_HPP

namespace cfisac
{
    // Unit conversions. Everything inside the library is linear (Watts, linear gain);
    // logarithmic units only appear at config parsing and report formatting.
    double dbm_to_watts(double dbm);
    double watts_to_dbm(double watts);
    double db_to_linear(double db);
    double linear_to_db(double linear);
    double deg_to_rad(double deg);
    double rad_to_deg(double rad);

    // Maps an angle (radians) into [-pi/2, pi/2] while keeping sin(theta) unchanged.
    // A ULA cannot tell front from back, so the mirror image is the same direction.
    double wrap_broadside(double theta);
}

#endif
