// SPDX-License-Identifier: Apache-2.0
//
// risim - RIS-aided mmWave radar imaging simulator and reconstruction toolkit
// Copyright (C) 2026 The risim authors
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

#ifndef RISIM_GEOMETRY_HPP
#define RISIM_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace risim
{
    inline constexpr double speed_of_light = 299792458.0; // [m/s]

    inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

    // Point in the RIS frame [m]. The RIS lies in the YZ-plane, X is its normal, Z is vertical.
    struct CartesianPoint
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        friend constexpr CartesianPoint operator+(CartesianPoint a, CartesianPoint b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
        friend constexpr CartesianPoint operator-(CartesianPoint a, CartesianPoint b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
        friend constexpr CartesianPoint operator*(double s, CartesianPoint a) { return {s * a.x, s * a.y, s * a.z}; }
        friend constexpr bool operator==(CartesianPoint, CartesianPoint) = default;

        bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    inline double norm(CartesianPoint p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }
    inline double distance(CartesianPoint a, CartesianPoint b) { return norm(a - b); }

    // Spherical coordinates relative to the RIS origin.
    // phi is the signed azimuth in the XY-plane, theta the zenith angle from +Z. Both in degrees.
    struct SphericalPoint
    {
        double r = 0.0;     // [m]
        double phi = 0.0;   // (-180, 180]
        double theta = 0.0; // [0, 180]
    };

    // The origin maps to (0, 0, 0) by convention.
    inline SphericalPoint cart_to_sph(CartesianPoint p)
    {
        const double r = norm(p);
        if (r == 0.0)
            return {};
        const double cos_theta = std::clamp(p.z / r, -1.0, 1.0);
        double phi = rad2deg(std::atan2(p.y, p.x));
        if (phi == -180.0)
            phi = 180.0;
        return {r, phi, rad2deg(std::acos(cos_theta))};
    }

    inline CartesianPoint sph_to_cart(SphericalPoint s)
    {
        if (!(s.r >= 0.0))
            throw std::invalid_argument("sph_to_cart: negative radius");
        const double phi = deg2rad(s.phi), theta = deg2rad(s.theta);
        const double st = std::sin(theta);
        return {s.r * st * std::cos(phi), s.r * st * std::sin(phi), s.r * std::cos(theta)};
    }

    // Beam steering direction [deg].
    struct BeamDirection
    {
        double phi = 0.0;
        double theta = 90.0;

        friend constexpr bool operator==(BeamDirection, BeamDirection) = default;
    };

    // Regular N x M grid of reflecting elements in the YZ-plane.
    // Element (n, m) sits at y = (m - (M-1)/2) * pitch, z = (n - (N-1)/2) * pitch relative to the center.
    class RisArray
    {
    public:
        RisArray(std::size_t rows, std::size_t cols, double pitch, double design_frequency,
                 CartesianPoint center = {})
            : rows_(rows), cols_(cols), pitch_(pitch), design_frequency_(design_frequency), center_(center)
        {
            if (rows == 0 || cols == 0)
                throw std::invalid_argument("RisArray: rows and cols must be at least 1");
            if (!(pitch > 0.0))
                throw std::invalid_argument("RisArray: pitch must be positive");
            if (!(design_frequency > 0.0))
                throw std::invalid_argument("RisArray: design frequency must be positive");
            if (center.x != 0.0)
                throw std::invalid_argument("RisArray: array must lie in the YZ-plane (center.x == 0)");

            positions_.reserve(rows * cols);
            const double y0 = 0.5 * double(cols - 1), z0 = 0.5 * double(rows - 1);
            for (std::size_t n = 0; n < rows; ++n)
                for (std::size_t m = 0; m < cols; ++m)
                    positions_.push_back({0.0, center.y + (double(m) - y0) * pitch, center.z + (double(n) - z0) * pitch});
        }

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        std::size_t size() const { return positions_.size(); }
        double pitch() const { return pitch_; }
        double design_frequency() const { return design_frequency_; }
        double design_wavelength() const { return speed_of_light / design_frequency_; }
        CartesianPoint center() const { return center_; }

        // Row-major: index = n * cols + m
        const std::vector<CartesianPoint> &positions() const { return positions_; }
        CartesianPoint position(std::size_t n, std::size_t m) const { return positions_[n * cols_ + m]; }

    private:
        std::size_t rows_, cols_;
        double pitch_, design_frequency_;
        CartesianPoint center_;
        std::vector<CartesianPoint> positions_;
    };

    inline RisArray build_ris_array(std::size_t rows, std::size_t cols, double pitch, double design_frequency)
    {
        return RisArray(rows, cols, pitch, design_frequency);
    }

    struct Scatterer
    {
        CartesianPoint position;
        double reflectivity = 1.0; // amplitude, >= 0
    };

    struct Scene
    {
        std::vector<Scatterer> scatterers;
        CartesianPoint tx_position{0.6, 0.0, 0.0};
        CartesianPoint rx_position{0.6, 0.0, 0.0};

        // Throws std::invalid_argument on negative reflectivity, non-finite coordinates,
        // or an antenna coincident with a scatterer.
        void validate() const
        {
            if (!tx_position.is_finite() || !rx_position.is_finite())
                throw std::invalid_argument("Scene: antenna position is not finite");
            for (const auto &s : scatterers)
            {
                if (!s.position.is_finite())
                    throw std::invalid_argument("Scene: scatterer position is not finite");
                if (!(s.reflectivity >= 0.0))
                    throw std::invalid_argument("Scene: reflectivity must be nonnegative");
                if (s.position == tx_position || s.position == rx_position)
                    throw std::invalid_argument("Scene: scatterer coincides with an antenna");
            }
        }
    };
}

#endif
