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

#ifndef RISIM_FORWARD_SIM_HPP
#define RISIM_FORWARD_SIM_HPP

#include "risim/codebook.hpp"
#include "risim/geometry.hpp"
#include "risim/parallel.hpp"
#include "risim/sweep.hpp"
#include "risim/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace risim
{
    struct SimOptions
    {
        bool include_spreading_loss = true; // per-hop 1/(r_tx * r_q) element amplitudes
        double noise_std = 0.0;             // complex Gaussian std, relative to reference_amplitude()
        bool include_direct_leakage = false;
        double leakage_amplitude = 1.0; // relative to reference_amplitude()
        double leakage_range = 0.0;     // [m] one-way equivalent delay of the leakage tone
        unsigned threads = 1;           // simulate_tensor only
    };

    // Element-resolved response of one hop (antenna -> element -> point) over the sweep,
    // stored split-complex: re/im[e * K + k] = A_e * exp(-j 2 pi f_k (r_ant,e + r_e,p) / c).
    struct HopMatrix
    {
        std::size_t elements = 0, tones = 0;
        std::vector<double> re, im;
    };

    inline HopMatrix hop_matrix(const RisArray &array, CartesianPoint antenna, CartesianPoint point,
                                const SweepConfig &sweep, bool spreading)
    {
        HopMatrix h;
        h.elements = array.size();
        h.tones = sweep.points();
        h.re.resize(h.elements * h.tones);
        h.im.resize(h.elements * h.tones);
        const auto &pos = array.positions();
        for (std::size_t e = 0; e < h.elements; ++e)
        {
            const double r_ant = distance(antenna, pos[e]);
            const double r_pt = distance(pos[e], point);
            const double path = r_ant + r_pt;
            const double amp = spreading ? 1.0 / (r_ant * r_pt) : 1.0;
            for (std::size_t k = 0; k < h.tones; ++k)
            {
                const double cycles = sweep.frequency(k) * path / speed_of_light;
                const double ph = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
                h.re[e * h.tones + k] = amp * std::cos(ph);
                h.im[e * h.tones + k] = -amp * std::sin(ph);
            }
        }
        return h;
    }

    // F(f_k) = sum_e exp(j * applied_e) * H[e][k]
    inline void hop_sum(const HopMatrix &h, const PhaseGrid &applied, std::span<double> out_re, std::span<double> out_im)
    {
        std::fill(out_re.begin(), out_re.end(), 0.0);
        std::fill(out_im.begin(), out_im.end(), 0.0);
        const std::size_t K = h.tones;
        for (std::size_t e = 0; e < h.elements; ++e)
        {
            const double s_re = std::cos(applied.data()[e]);
            const double s_im = std::sin(applied.data()[e]);
            const double *g_re = h.re.data() + e * K;
            const double *g_im = h.im.data() + e * K;
            double *f_re = out_re.data();
            double *f_im = out_im.data();
            for (std::size_t k = 0; k < K; ++k)
            {
                f_re[k] += s_re * g_re[k] - s_im * g_im[k];
                f_im[k] += s_re * g_im[k] + s_im * g_re[k];
            }
        }
    }

    // Complex hop sum for one antenna, one point and one phase pattern.
    inline std::vector<cdouble> hop_response(const RisArray &array, const PhaseGrid &applied, CartesianPoint antenna,
                                             CartesianPoint point, const SweepConfig &sweep, bool spreading)
    {
        const auto h = hop_matrix(array, antenna, point, sweep, spreading);
        std::vector<double> re(sweep.points()), im(sweep.points());
        hop_sum(h, applied, re, im);
        std::vector<cdouble> out(sweep.points());
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = {re[k], im[k]};
        return out;
    }

    // Amplitude of a unit-reflectivity scatterer 1 m in front of the array center under ideal
    // (continuous) focusing. Noise and leakage levels are expressed relative to it.
    inline double reference_amplitude(const RisArray &array, const Scene &scene, bool spreading)
    {
        const CartesianPoint ref = array.center() + CartesianPoint{1.0, 0.0, 0.0};
        double a_tx = 0.0, a_rx = 0.0;
        for (const auto &p : array.positions())
        {
            a_tx += spreading ? 1.0 / (distance(scene.tx_position, p) * distance(p, ref)) : 1.0;
            a_rx += spreading ? 1.0 / (distance(scene.rx_position, p) * distance(p, ref)) : 1.0;
        }
        return a_tx * a_rx;
    }

    namespace detail
    {
        // Scatterer-major accumulation of sum_q sigma_q * F_tx,q * F_q,rx for every pattern.
        // Each row is accumulated in scatterer order regardless of threading, so results are bit-identical
        // for any worker count.
        inline Matrix<cdouble> accumulate_scene(const Scene &scene, const RisArray &array,
                                                std::span<const PhaseGrid *const> patterns, const SweepConfig &sweep,
                                                const SimOptions &opts, unsigned threads)
        {
            const std::size_t K = sweep.points();
            std::vector<double> acc_re(patterns.size() * K, 0.0), acc_im(patterns.size() * K, 0.0);
            const bool monostatic = scene.tx_position == scene.rx_position;

            for (const auto &q : scene.scatterers)
            {
                const auto h_tx = hop_matrix(array, scene.tx_position, q.position, sweep, opts.include_spreading_loss);
                HopMatrix h_rx;
                if (!monostatic)
                    h_rx = hop_matrix(array, scene.rx_position, q.position, sweep, opts.include_spreading_loss);

                parallel_for(patterns.size(), threads, [&](std::size_t b)
                             {
                    std::vector<double> tx_re(K), tx_im(K), rx_re, rx_im;
                    hop_sum(h_tx, *patterns[b], tx_re, tx_im);
                    if (!monostatic)
                    {
                        rx_re.resize(K);
                        rx_im.resize(K);
                        hop_sum(h_rx, *patterns[b], rx_re, rx_im);
                    }
                    const auto &r_re = monostatic ? tx_re : rx_re;
                    const auto &r_im = monostatic ? tx_im : rx_im;
                    double *a_re = acc_re.data() + b * K;
                    double *a_im = acc_im.data() + b * K;
                    for (std::size_t k = 0; k < K; ++k)
                    {
                        a_re[k] += q.reflectivity * (tx_re[k] * r_re[k] - tx_im[k] * r_im[k]);
                        a_im[k] += q.reflectivity * (tx_re[k] * r_im[k] + tx_im[k] * r_re[k]);
                    } });
            }

            Matrix<cdouble> out(patterns.size(), K);
            for (std::size_t i = 0; i < out.size(); ++i)
                out.data()[i] = {acc_re[i], acc_im[i]};
            return out;
        }

        // Leakage tone and receiver noise. Noise stream is seeded with seed + beam_index.
        inline void finish_sweep(std::span<cdouble> row, const Scene &scene, const RisArray &array,
                                 const SweepConfig &sweep, const SimOptions &opts, std::uint64_t seed,
                                 std::size_t beam_index)
        {
            if (!opts.include_direct_leakage && opts.noise_std == 0.0)
                return;
            const double ref = reference_amplitude(array, scene, opts.include_spreading_loss);
            if (opts.include_direct_leakage)
            {
                for (std::size_t k = 0; k < row.size(); ++k)
                {
                    const double cycles = sweep.frequency(k) * 2.0 * opts.leakage_range / speed_of_light;
                    const double ph = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
                    row[k] += opts.leakage_amplitude * ref * cdouble(std::cos(ph), -std::sin(ph));
                }
            }
            if (opts.noise_std > 0.0)
            {
                std::mt19937_64 rng(seed + beam_index);
                std::normal_distribution<double> gauss(0.0, opts.noise_std * ref / std::numbers::sqrt2);
                for (auto &v : row)
                {
                    const double n_re = gauss(rng);
                    const double n_im = gauss(rng);
                    v += cdouble(n_re, n_im);
                }
            }
        }

        inline void check_inputs(const Scene &scene, const RisArray &array, const PhaseGrid &applied, const SimOptions &opts)
        {
            scene.validate();
            if (applied.rows() != array.rows() || applied.cols() != array.cols())
                throw std::invalid_argument("simulate: phase pattern does not match the array");
            if (!(opts.noise_std >= 0.0))
                throw std::invalid_argument("simulate: noise_std must be nonnegative");
        }
    }

    // S21 sweep for one RIS pattern: sum over scatterers of sigma_q * F_tx,q * F_q,rx, plus optional
    // leakage and noise. The pattern is applied on both bounces.
    inline std::vector<cdouble> simulate_s21(const Scene &scene, const RisArray &array, const PhaseGrid &applied,
                                             const SweepConfig &sweep, const SimOptions &opts, std::uint64_t seed,
                                             std::size_t beam_index = 0)
    {
        detail::check_inputs(scene, array, applied, opts);
        const PhaseGrid *patterns[] = {&applied};
        auto m = detail::accumulate_scene(scene, array, patterns, sweep, opts, 1);
        std::vector<cdouble> row(m.data().begin(), m.data().end());
        detail::finish_sweep(row, scene, array, sweep, opts, seed, beam_index);
        return row;
    }

    // Uses the 1-bit states of the profile, as the hardware would.
    inline std::vector<cdouble> simulate_s21(const Scene &scene, const RisArray &array, const PhaseProfile &profile,
                                             const SweepConfig &sweep, const SimOptions &opts, std::uint64_t seed,
                                             std::size_t beam_index = 0)
    {
        return simulate_s21(scene, array, profile.quantized, sweep, opts, seed, beam_index);
    }

    // One sweep per codebook entry, in codebook order. Row b equals
    // simulate_s21(..., entry_b.profile, ..., seed, entry_b.beam_index) bit for bit.
    inline MeasurementTensor simulate_tensor(const Scene &scene, const RisArray &array, const Codebook &codebook,
                                             const SweepConfig &sweep, const SimOptions &opts, std::uint64_t seed,
                                             double range_offset = 0.0)
    {
        if (codebook.empty())
            throw std::invalid_argument("simulate_tensor: empty codebook");
        std::vector<const PhaseGrid *> patterns;
        patterns.reserve(codebook.size());
        for (const auto &e : codebook.entries)
        {
            detail::check_inputs(scene, array, e.profile.quantized, opts);
            patterns.push_back(&e.profile.quantized);
        }

        MeasurementTensor t;
        t.sweep = sweep;
        t.domain = SampleDomain::frequency;
        t.range_offset = range_offset;
        t.data = detail::accumulate_scene(scene, array, patterns, sweep, opts, opts.threads);
        for (std::size_t b = 0; b < codebook.size(); ++b)
        {
            const auto &e = codebook.entries[b];
            t.beams.push_back({e.direction, e.focus_r});
            detail::finish_sweep(t.data.row(b), scene, array, sweep, opts, seed, e.beam_index);
        }
        return t;
    }
}

#endif
