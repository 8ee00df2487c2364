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

#ifndef RISIM_SPATIAL_INDEX_HPP
#define RISIM_SPATIAL_INDEX_HPP

#include "risim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace risim
{
    // Uniform bucket grid over a point set for fixed-radius nearest-neighbor queries.
    // Cells are slightly larger than the query radius, so every point within the radius of a
    // query lies in the 3x3x3 block of cells around it.
    class RadiusIndex
    {
    public:
        RadiusIndex(std::span<const CartesianPoint> points, double radius) : radius_(radius)
        {
            if (!(radius > 0.0))
                throw std::invalid_argument("RadiusIndex: radius must be positive");
            cell_ = radius * (1.0 + 1e-6);
            if (points.empty())
                return;

            lo_ = points.front();
            CartesianPoint hi = lo_;
            for (const auto &p : points)
            {
                lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y), std::min(lo_.z, p.z)};
                hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
            }
            nx_ = cell_index(hi.x - lo_.x) + 1;
            ny_ = cell_index(hi.y - lo_.y) + 1;
            nz_ = cell_index(hi.z - lo_.z) + 1;

            // Counting sort into CSR buckets; within a bucket points keep their input order.
            start_.assign(nx_ * ny_ * nz_ + 1, 0);
            std::vector<std::size_t> cell_of(points.size());
            for (std::size_t i = 0; i < points.size(); ++i)
            {
                const auto &p = points[i];
                cell_of[i] = flat(cell_index(p.x - lo_.x), cell_index(p.y - lo_.y), cell_index(p.z - lo_.z));
                ++start_[cell_of[i] + 1];
            }
            for (std::size_t c = 1; c < start_.size(); ++c)
                start_[c] += start_[c - 1];
            items_.resize(points.size());
            auto fill = start_;
            for (std::size_t i = 0; i < points.size(); ++i)
                items_[fill[cell_of[i]]++] = i;
        }

        double radius() const { return radius_; }

        // Calls visit(point_index) for every indexed point in the cells neighboring q.
        // Candidates may lie farther than the radius; callers filter by distance.
        template <typename Visit>
        void for_each_candidate(CartesianPoint q, Visit &&visit) const
        {
            if (items_.empty())
                return;
            const long cx = long(std::floor((q.x - lo_.x) / cell_));
            const long cy = long(std::floor((q.y - lo_.y) / cell_));
            const long cz = long(std::floor((q.z - lo_.z) / cell_));
            for (long z = std::max(cz - 1, 0L); z <= std::min(cz + 1, long(nz_) - 1); ++z)
                for (long y = std::max(cy - 1, 0L); y <= std::min(cy + 1, long(ny_) - 1); ++y)
                    for (long x = std::max(cx - 1, 0L); x <= std::min(cx + 1, long(nx_) - 1); ++x)
                    {
                        const auto c = flat(std::size_t(x), std::size_t(y), std::size_t(z));
                        for (std::size_t k = start_[c]; k < start_[c + 1]; ++k)
                            visit(items_[k]);
                    }
        }

    private:
        std::size_t cell_index(double offset) const { return std::size_t(std::floor(offset / cell_)); }
        std::size_t flat(std::size_t x, std::size_t y, std::size_t z) const { return (z * ny_ + y) * nx_ + x; }

        double radius_, cell_ = 0.0;
        CartesianPoint lo_;
        std::size_t nx_ = 0, ny_ = 0, nz_ = 0;
        std::vector<std::size_t> start_, items_;
    };
}

#endif
