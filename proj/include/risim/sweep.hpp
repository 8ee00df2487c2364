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

#ifndef RISIM_SWEEP_HPP
#define RISIM_SWEEP_HPP

#include "risim/geometry.hpp"

#include <cstddef>
#include <stdexcept>

namespace risim
{
    // Stepped-frequency plan: K tones f_k = f_start + k * df.
    // Derived quantities are computed on demand.
    class SweepConfig
    {
    public:
        SweepConfig(double f_start, double f_step, std::size_t points)
            : f_start_(f_start), f_step_(f_step), points_(points)
        {
            if (points < 2)
                throw std::invalid_argument("SweepConfig: at least 2 frequency points required");
            if (!(f_step > 0.0))
                throw std::invalid_argument("SweepConfig: frequency step must be positive");
            if (!(f_start > 0.0))
                throw std::invalid_argument("SweepConfig: start frequency must be positive");
        }

        // Band edges inclusive, e.g. 26.5-30.5 GHz with 256 points.
        static SweepConfig from_band(double f_start, double f_stop, std::size_t points)
        {
            if (points < 2)
                throw std::invalid_argument("SweepConfig: at least 2 frequency points required");
            if (!(f_stop > f_start))
                throw std::invalid_argument("SweepConfig: stop frequency must exceed start frequency");
            return SweepConfig(f_start, (f_stop - f_start) / double(points - 1), points);
        }

        double f_start() const { return f_start_; }
        double f_step() const { return f_step_; }
        std::size_t points() const { return points_; }

        double frequency(std::size_t k) const { return f_start_ + double(k) * f_step_; }
        double f_stop() const { return frequency(points_ - 1); }
        double center_frequency() const { return 0.5 * (f_start_ + f_stop()); }

        // B = df * (K - 1)
        double bandwidth() const { return f_step_ * double(points_ - 1); }

        // dR = c / (2B)
        double range_resolution() const { return speed_of_light / (2.0 * bandwidth()); }

        // c / (2 df): alias-free one-way range of the sampled response.
        double unambiguous_range() const { return speed_of_light / (2.0 * f_step_); }

        // K * dR, the observable-range figure used to size the sweep.
        double max_observable_range() const { return double(points_) * range_resolution(); }

        friend bool operator==(const SweepConfig &, const SweepConfig &) = default;

    private:
        double f_start_, f_step_;
        std::size_t points_;
    };

    // 26.5-30.5 GHz, 256 points.
    inline SweepConfig default_sweep() { return SweepConfig::from_band(26.5e9, 30.5e9, 256); }
}

#endif
