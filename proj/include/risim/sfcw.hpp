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

#ifndef RISIM_SFCW_HPP
#define RISIM_SFCW_HPP

#include "risim/parallel.hpp"
#include "risim/sweep.hpp"
#include "risim/tensor.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace risim
{
    // Symmetric Hann window, w[k] = 0.5 * (1 - cos(2 pi k / (K - 1))). K = 1 gives [1].
    inline std::vector<double> hanning_window(std::size_t K)
    {
        if (K == 0)
            throw std::invalid_argument("hanning_window: K must be at least 1");
        if (K == 1)
            return {1.0};
        std::vector<double> w(K);
        for (std::size_t k = 0; k < K; ++k)
            w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(k) / double(K - 1)));
        return w;
    }

    enum class Window
    {
        hann,
        rectangular,
    };

    // Unnormalized inverse DFT of a fixed size, out[b] = sum_k in[k] exp(+j 2 pi k b / N).
    // Plans are created under a process-wide lock; execution is thread-safe.
    class InverseDft
    {
    public:
        explicit InverseDft(std::size_t n) : n_(n)
        {
            if (n == 0)
                throw std::invalid_argument("InverseDft: size must be positive");
            std::vector<cdouble> a(n), b(n);
            std::lock_guard lock(planner_mutex());
            plan_ = fftw_plan_dft_1d(int(n), reinterpret_cast<fftw_complex *>(a.data()),
                                     reinterpret_cast<fftw_complex *>(b.data()), FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!plan_)
                throw std::runtime_error("InverseDft: FFTW planning failed");
        }
        ~InverseDft()
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        InverseDft(const InverseDft &) = delete;
        InverseDft &operator=(const InverseDft &) = delete;

        std::size_t size() const { return n_; }

        void operator()(std::span<cdouble> in, std::span<cdouble> out) const
        {
            if (in.size() != n_ || out.size() != n_)
                throw std::invalid_argument("InverseDft: buffer size mismatch");
            fftw_execute_dft(plan_, reinterpret_cast<fftw_complex *>(in.data()),
                             reinterpret_cast<fftw_complex *>(out.data()));
        }

    private:
        static std::mutex &planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        std::size_t n_;
        fftw_plan plan_ = nullptr;
    };

    struct RangeProfile
    {
        std::vector<cdouble> samples; // length fft_len
        double bin_spacing = 0.0;     // [m] c / (2 fft_len df)
        double range_offset = 0.0;    // [m]
        BeamDirection direction;
        double focus_r = 0.0;

        // One-way range of a bin measured from the RIS.
        double range(std::size_t bin) const { return double(bin) * bin_spacing - range_offset; }
    };

    // Default zero-padded transform length.
    inline std::size_t default_fft_len(const SweepConfig &sweep) { return 4 * sweep.points(); }

    namespace detail
    {
        inline void range_profile_into(std::span<const cdouble> row, std::span<const double> window,
                                       const InverseDft &idft, std::span<cdouble> out)
        {
            std::vector<cdouble> buf(idft.size(), cdouble{});
            for (std::size_t k = 0; k < row.size(); ++k)
                buf[k] = window[k] * row[k];
            idft(buf, out);
            const double scale = 1.0 / double(idft.size());
            for (auto &v : out)
                v *= scale;
        }
    }

    // IFFT of the windowed, zero-padded sweep with 1/fft_len normalization.
    inline RangeProfile range_profile(std::span<const cdouble> row, const SweepConfig &sweep, std::size_t fft_len,
                                      Window window = Window::hann)
    {
        if (row.size() != sweep.points())
            throw std::invalid_argument("range_profile: row length does not match the sweep");
        if (fft_len < row.size())
            throw std::invalid_argument("range_profile: fft_len shorter than the sweep");
        const auto w = window == Window::hann ? hanning_window(row.size()) : std::vector<double>(row.size(), 1.0);
        InverseDft idft(fft_len);
        RangeProfile p;
        p.samples.resize(fft_len);
        p.bin_spacing = speed_of_light / (2.0 * double(fft_len) * sweep.f_step());
        detail::range_profile_into(row, w, idft, p.samples);
        return p;
    }

    struct RangeProfileSet
    {
        SweepConfig sweep = default_sweep();
        std::size_t fft_len = 0;
        double range_offset = 0.0;
        std::vector<RangeProfile> profiles;

        std::size_t size() const { return profiles.size(); }
        bool empty() const { return profiles.empty(); }
        double bin_spacing() const { return speed_of_light / (2.0 * double(fft_len) * sweep.f_step()); }
    };

    // fft_len = 0 selects default_fft_len().
    inline RangeProfileSet process_tensor(const MeasurementTensor &tensor, std::size_t fft_len = 0,
                                          Window window = Window::hann, unsigned threads = 1)
    {
        tensor.validate();
        if (tensor.domain != SampleDomain::frequency)
            throw std::invalid_argument("process_tensor: tensor is not frequency-domain data");
        if (fft_len == 0)
            fft_len = default_fft_len(tensor.sweep);
        if (fft_len < tensor.sweep.points())
            throw std::invalid_argument("process_tensor: fft_len shorter than the sweep");

        RangeProfileSet set;
        set.sweep = tensor.sweep;
        set.fft_len = fft_len;
        set.range_offset = tensor.range_offset;
        set.profiles.resize(tensor.beam_count());

        const auto w = window == Window::hann ? hanning_window(tensor.sweep.points())
                                              : std::vector<double>(tensor.sweep.points(), 1.0);
        const InverseDft idft(fft_len);
        const double spacing = set.bin_spacing();
        parallel_for(tensor.beam_count(), threads, [&](std::size_t b)
                     {
            auto &p = set.profiles[b];
            p.samples.resize(fft_len);
            p.bin_spacing = spacing;
            p.range_offset = tensor.range_offset;
            p.direction = tensor.beams[b].direction;
            p.focus_r = tensor.beams[b].focus_r;
            detail::range_profile_into(tensor.data.row(b), w, idft, p.samples); });
        return set;
    }

    // Range-domain tensor sharing the measurement container.
    inline MeasurementTensor to_tensor(const RangeProfileSet &set)
    {
        MeasurementTensor t;
        t.sweep = set.sweep;
        t.domain = SampleDomain::range;
        t.fft_len = set.fft_len;
        t.range_offset = set.range_offset;
        t.data = Matrix<cdouble>(set.size(), set.fft_len);
        for (std::size_t b = 0; b < set.size(); ++b)
        {
            const auto &p = set.profiles[b];
            if (p.samples.size() != set.fft_len)
                throw std::invalid_argument("to_tensor: profile length does not match fft_len");
            t.beams.push_back({p.direction, p.focus_r});
            std::copy(p.samples.begin(), p.samples.end(), t.data.row(b).begin());
        }
        return t;
    }

    inline RangeProfileSet from_tensor(const MeasurementTensor &t)
    {
        t.validate();
        if (t.domain != SampleDomain::range)
            throw std::invalid_argument("from_tensor: tensor is not range-domain data");
        RangeProfileSet set;
        set.sweep = t.sweep;
        set.fft_len = t.fft_len;
        set.range_offset = t.range_offset;
        const double spacing = set.bin_spacing();
        for (std::size_t b = 0; b < t.beam_count(); ++b)
        {
            RangeProfile p;
            p.samples.assign(t.data.row(b).begin(), t.data.row(b).end());
            p.bin_spacing = spacing;
            p.range_offset = t.range_offset;
            p.direction = t.beams[b].direction;
            p.focus_r = t.beams[b].focus_r;
            set.profiles.push_back(std::move(p));
        }
        return set;
    }
}

#endif
