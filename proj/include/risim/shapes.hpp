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

#ifndef RISIM_SHAPES_HPP
#define RISIM_SHAPES_HPP

#include "risim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace risim
{
    enum class ShapeKind
    {
        point,
        box,
        sphere,
        humanoid,
    };

    // Extended target sampled into isotropic point scatterers. Only surfaces facing the RIS are sampled.
    //   point:    single scatterer at anchor
    //   box:      axis-aligned, centered at anchor, edge lengths size
    //   sphere:   centered at anchor, radius
    //   humanoid: front silhouette of height x width, anchor at the front of the torso center
    struct TargetSpec
    {
        std::string name;
        ShapeKind shape = ShapeKind::point;
        CartesianPoint anchor;
        CartesianPoint size{0.5, 0.5, 0.5}; // box edge lengths [m]
        double radius = 0.15;               // sphere [m]
        double height = 1.8;                // humanoid [m]
        double width = 0.5;                 // humanoid [m]
        double spacing = 0.1;               // nominal point spacing [m]
        double reflectivity = 1.0;          // per point
    };

    inline constexpr double default_ground_z = -1.3; // floor plane in the RIS frame [m]

    namespace detail
    {
        struct Frame
        {
            CartesianPoint toward;  // horizontal unit vector from the target toward the RIS axis
            CartesianPoint lateral; // horizontal, perpendicular to `toward`
        };

        inline Frame facing_frame(CartesianPoint anchor)
        {
            const double h = std::hypot(anchor.x, anchor.y);
            if (h == 0.0)
                return {{-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
            const CartesianPoint t{-anchor.x / h, -anchor.y / h, 0.0};
            return {t, {-t.y, t.x, 0.0}};
        }

        // Jittered regular samples of [lo, hi], at least one.
        inline std::vector<double> axis_samples(double lo, double hi, double spacing, std::mt19937_64 &rng)
        {
            const double extent = hi - lo;
            const auto n = std::max<std::size_t>(1, std::size_t(std::lround(extent / spacing)));
            const double step = extent / double(n);
            std::uniform_real_distribution<double> jitter(-0.2 * step, 0.2 * step);
            std::vector<double> out;
            for (std::size_t i = 0; i < n; ++i)
                out.push_back(lo + (double(i) + 0.5) * step + jitter(rng));
            return out;
        }

        // Front of a vertical elliptic cylinder: lateral band [c - hw, c + hw], heights [v0, v1],
        // depth semi-axis depth_ratio * hw.
        inline void sample_limb(std::vector<Scatterer> &out, const TargetSpec &t, const Frame &f, double c, double hw,
                                double v0, double v1, std::mt19937_64 &rng, double depth_ratio = 1.0)
        {
            for (double v : axis_samples(v0, v1, t.spacing, rng))
                for (double a : axis_samples(c - hw, c + hw, t.spacing, rng))
                {
                    const double u = std::clamp(a - c, -hw, hw);
                    const double depth = depth_ratio * (hw - std::sqrt(hw * hw - u * u));
                    out.push_back({t.anchor + a * f.lateral + CartesianPoint{0.0, 0.0, v} + (-depth) * f.toward,
                                   t.reflectivity});
                }
        }
    }

    // Deterministic for a given spec and seed. Points below the floor plane are dropped.
    inline std::vector<Scatterer> sample_target(const TargetSpec &t, std::uint64_t seed,
                                                double ground_z = default_ground_z)
    {
        if (!(t.spacing > 0.0))
            throw std::invalid_argument("sample_target: spacing must be positive");
        if (!(t.reflectivity >= 0.0))
            throw std::invalid_argument("sample_target: reflectivity must be nonnegative");

        std::vector<Scatterer> out;
        std::mt19937_64 rng(seed);
        switch (t.shape)
        {
        case ShapeKind::point:
            out.push_back({t.anchor, t.reflectivity});
            break;

        case ShapeKind::sphere:
        {
            if (!(t.radius > 0.0))
                throw std::invalid_argument("sample_target: sphere radius must be positive");
            // Fibonacci lattice on the full sphere, keeping the half that faces the RIS origin.
            const double r = t.radius;
            const auto n = std::max<std::size_t>(2, std::size_t(std::lround(4.0 * std::numbers::pi * r * r / (t.spacing * t.spacing))));
            const double d = norm(t.anchor);
            const CartesianPoint toward = d > 0.0 ? (-1.0 / d) * t.anchor : CartesianPoint{-1.0, 0.0, 0.0};
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (std::size_t i = 0; i < n; ++i)
            {
                const double z = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
                const double rho = std::sqrt(1.0 - z * z);
                const CartesianPoint dir{rho * std::cos(golden * double(i)), rho * std::sin(golden * double(i)), z};
                if (dir.x * toward.x + dir.y * toward.y + dir.z * toward.z >= 0.0)
                    out.push_back({t.anchor + r * dir, t.reflectivity});
            }
            break;
        }

        case ShapeKind::box:
        {
            const auto s = t.size;
            if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0))
                throw std::invalid_argument("sample_target: box size must be positive");
            const CartesianPoint h = 0.5 * s;
            // (axis, sign) faces whose outward normal points toward the origin.
            for (int axis = 0; axis < 3; ++axis)
                for (int sign : {-1, 1})
                {
                    const double anchor_c = axis == 0 ? t.anchor.x : axis == 1 ? t.anchor.y : t.anchor.z;
                    const double half_c = axis == 0 ? h.x : axis == 1 ? h.y : h.z;
                    const double face = anchor_c + sign * half_c;
                    if (!(sign * (0.0 - face) > 0.0))
                        continue;
                    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
                    auto comp = [](CartesianPoint p, int ax)
                    { return ax == 0 ? p.x : ax == 1 ? p.y : p.z; };
                    for (double u : detail::axis_samples(comp(t.anchor, a1) - comp(h, a1), comp(t.anchor, a1) + comp(h, a1), t.spacing, rng))
                        for (double v : detail::axis_samples(comp(t.anchor, a2) - comp(h, a2), comp(t.anchor, a2) + comp(h, a2), t.spacing, rng))
                        {
                            double c[3];
                            c[axis] = face;
                            c[a1] = u;
                            c[a2] = v;
                            out.push_back({{c[0], c[1], c[2]}, t.reflectivity});
                        }
                }
            break;
        }

        case ShapeKind::humanoid:
        {
            if (!(t.height > 0.0 && t.width > 0.0))
                throw std::invalid_argument("sample_target: humanoid height and width must be positive");
            const auto f = detail::facing_frame(t.anchor);
            const double H = t.height, W = t.width;
            // Proportions relative to the torso center; the silhouette is not clipped at the floor.
            detail::sample_limb(out, t, f, 0.0, 0.36 * W, -0.17 * H, 0.17 * H, rng, 0.25); // torso
            detail::sample_limb(out, t, f, 0.0, 0.16 * W, 0.19 * H, 0.31 * H, rng);  // head
            for (double side : {-1.0, 1.0})
            {
                detail::sample_limb(out, t, f, side * 0.44 * W, 0.06 * W, -0.15 * H, 0.16 * H, rng); // arm
                detail::sample_limb(out, t, f, side * 0.14 * W, 0.10 * W, -0.60 * H, -0.17 * H, rng); // leg
            }
            break;
        }
        }
        std::erase_if(out, [&](const Scatterer &s)
                      { return s.position.z < ground_z; });
        return out;
    }
}

#endif
