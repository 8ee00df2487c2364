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

#ifndef RISIM_TENSOR_HPP
#define RISIM_TENSOR_HPP

#include "risim/geometry.hpp"
#include "risim/matrix.hpp"
#include "risim/sweep.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace risim
{
    using cdouble = std::complex<double>;

    struct BeamInfo
    {
        BeamDirection direction;
        double focus_r = 0.0; // [m]

        friend bool operator==(const BeamInfo &, const BeamInfo &) = default;
    };

    enum class SampleDomain : std::uint32_t
    {
        frequency = 0, // rows are S21 sweeps, one column per tone
        range = 1,     // rows are range profiles, one column per IFFT bin
    };

    // Beam-indexed complex data: one row per beam. Frequency-domain rows hold K tones,
    // range-domain rows hold fft_len bins.
    struct MeasurementTensor
    {
        SweepConfig sweep = default_sweep();
        std::vector<BeamInfo> beams;
        Matrix<cdouble> data;
        SampleDomain domain = SampleDomain::frequency;
        std::size_t fft_len = 0;    // range domain only
        double range_offset = 0.0;  // [m] feed-to-RIS path removed when mapping bins to range
        double dwell_time = 0.0;    // [s] per-beam acquisition dwell, 0 when not modelled

        std::size_t beam_count() const { return beams.size(); }
        std::size_t row_length() const { return data.cols(); }

        void validate() const
        {
            if (data.rows() != beams.size())
                throw std::invalid_argument("MeasurementTensor: row count does not match beam count");
            if (domain == SampleDomain::frequency && !beams.empty() && data.cols() != sweep.points())
                throw std::invalid_argument("MeasurementTensor: row length does not match sweep points");
            if (domain == SampleDomain::range && !beams.empty() && data.cols() != fft_len)
                throw std::invalid_argument("MeasurementTensor: row length does not match fft_len");
        }

        friend bool operator==(const MeasurementTensor &, const MeasurementTensor &) = default;
    };
}

#endif
