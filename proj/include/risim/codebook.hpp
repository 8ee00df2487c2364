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

#ifndef RISIM_CODEBOOK_HPP
#define RISIM_CODEBOOK_HPP

#include "risim/error.hpp"
#include "risim/geometry.hpp"
#include "risim/matrix.hpp"
#include "risim/parallel.hpp"

#include <complex>
#include <cstddef>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace risim
{
    // Per-element phase in radians, rows x cols like the RIS.
    using PhaseGrid = Matrix<double>;

    // Propagation phase 2*pi*d/lambda reduced to [0, 2*pi).
    // The reduction is done on the cycle count to keep precision for long paths.
    inline double path_phase(double path_length, double wavelength)
    {
        const double cycles = path_length / wavelength;
        double phase = 2.0 * std::numbers::pi * (cycles - std::floor(cycles));
        if (phase >= 2.0 * std::numbers::pi)
            phase = 0.0;
        return phase;
    }

    // Continuous focusing phase per element: the total TX -> element -> target path phase, mod 2*pi.
    // Applied as exp(+j*psi) it cancels the propagation factor exp(-j*k*(r_tx + r_p)) at the target.
    inline PhaseGrid optimal_phase(const RisArray &array, CartesianPoint tx, CartesianPoint target, double wavelength)
    {
        if (!(wavelength > 0.0))
            throw std::invalid_argument("optimal_phase: wavelength must be positive");
        if (target.x == array.center().x)
            throw std::invalid_argument("optimal_phase: target lies on the RIS plane");

        PhaseGrid psi(array.rows(), array.cols());
        const auto &pos = array.positions();
        for (std::size_t i = 0; i < pos.size(); ++i)
        {
            const double r_tx = distance(tx, pos[i]);
            const double r_p = distance(pos[i], target);
            if (r_p == 0.0 || r_tx == 0.0)
                throw std::invalid_argument("optimal_phase: point coincides with a RIS element");
            psi.data()[i] = path_phase(r_tx + r_p, wavelength);
        }
        return psi;
    }

    // 1-bit quantization: 0 where cos(psi) >= 0, pi otherwise.
    inline PhaseGrid quantize_1bit(const PhaseGrid &continuous)
    {
        PhaseGrid q(continuous.rows(), continuous.cols());
        for (std::size_t i = 0; i < continuous.size(); ++i)
            q.data()[i] = std::cos(continuous.data()[i]) >= 0.0 ? 0.0 : std::numbers::pi;
        return q;
    }

    struct PhaseProfile
    {
        PhaseGrid continuous; // may be empty for profiles read back from a codebook file
        PhaseGrid quantized;  // entries in {0, pi}
        CartesianPoint focus_point;
        double wavelength = 0.0;
    };

    inline PhaseProfile make_phase_profile(const RisArray &array, CartesianPoint tx, CartesianPoint focus, double wavelength)
    {
        PhaseProfile p;
        p.continuous = optimal_phase(array, tx, focus, wavelength);
        p.quantized = quantize_1bit(p.continuous);
        p.focus_point = focus;
        p.wavelength = wavelength;
        return p;
    }

    struct CodebookEntry
    {
        std::size_t beam_index = 0;
        BeamDirection direction;
        double focus_r = 0.0; // [m]
        PhaseProfile profile;
    };

    struct Codebook
    {
        std::size_t rows = 0, cols = 0;
        std::vector<CodebookEntry> entries;

        bool empty() const { return entries.empty(); }
        std::size_t size() const { return entries.size(); }

        // Appends the entries of another codebook, renumbering beam indices.
        void append(const Codebook &other)
        {
            if (!entries.empty() && (other.rows != rows || other.cols != cols))
                throw std::invalid_argument("Codebook::append: array dimensions differ");
            rows = other.rows;
            cols = other.cols;
            for (auto e : other.entries)
            {
                e.beam_index = entries.size();
                entries.push_back(std::move(e));
            }
        }
    };

    // One entry per grid direction, focused at sph_to_cart(focus_r, phi, theta). Entry order follows `grid`.
    inline Codebook build_codebook(const RisArray &array, CartesianPoint tx, std::span<const BeamDirection> grid,
                                   double focus_r, double wavelength, unsigned threads = 1)
    {
        if (grid.empty())
            throw std::invalid_argument("build_codebook: empty ROI grid");
        if (!(focus_r > 0.0))
            throw std::invalid_argument("build_codebook: focus distance must be positive");

        Codebook cb;
        cb.rows = array.rows();
        cb.cols = array.cols();
        cb.entries.resize(grid.size());
        parallel_for(grid.size(), threads, [&](std::size_t i)
                     {
            auto &e = cb.entries[i];
            e.beam_index = i;
            e.direction = grid[i];
            e.focus_r = focus_r;
            e.profile = make_phase_profile(array, tx, sph_to_cart({focus_r, grid[i].phi, grid[i].theta}), wavelength); });
        return cb;
    }

    // Sum over elements of exp(j*applied) * exp(-j*k*(r_tx + r_eval)).
    inline std::complex<double> array_factor(const PhaseGrid &applied, const RisArray &array, CartesianPoint tx,
                                             CartesianPoint eval_point, double wavelength)
    {
        if (applied.rows() != array.rows() || applied.cols() != array.cols())
            throw std::invalid_argument("array_factor: phase grid does not match the array");
        const auto &pos = array.positions();
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < pos.size(); ++i)
        {
            const double ph = applied.data()[i] - path_phase(distance(tx, pos[i]) + distance(pos[i], eval_point), wavelength);
            re += std::cos(ph);
            im += std::sin(ph);
        }
        return {re, im};
    }

    // Text export consumed by a RIS controller. Layout:
    //   risim-codebook 1
    //   array <rows> <cols>
    //   wavelength <m>
    //   entries <count>
    //   entry <beam_index> <phi_deg> <theta_deg> <focus_r_m>
    //   <rows lines of cols characters, '0' = phase 0, '1' = phase pi>
    inline void write_codebook(std::ostream &os, const Codebook &cb)
    {
        const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
        const double wavelength = cb.entries.empty() ? 0.0 : cb.entries.front().profile.wavelength;
        os << "risim-codebook 1\n";
        os << "array " << cb.rows << ' ' << cb.cols << '\n';
        os << "wavelength " << wavelength << '\n';
        os << "entries " << cb.entries.size() << '\n';
        for (const auto &e : cb.entries)
        {
            os << "entry " << e.beam_index << ' ' << e.direction.phi << ' ' << e.direction.theta << ' ' << e.focus_r << '\n';
            const auto &q = e.profile.quantized;
            std::string line(q.cols(), '0');
            for (std::size_t n = 0; n < q.rows(); ++n)
            {
                for (std::size_t m = 0; m < q.cols(); ++m)
                    line[m] = q(n, m) == 0.0 ? '0' : '1';
                os << line << '\n';
            }
        }
        os.precision(old_precision);
    }

    inline Codebook read_codebook(std::istream &is)
    {
        std::size_t line_no = 0;
        std::string line;
        auto next_line = [&]() -> std::istringstream
        {
            if (!std::getline(is, line))
                throw FormatError("codebook: unexpected end of file after line " + std::to_string(line_no));
            ++line_no;
            return std::istringstream(line);
        };
        auto fail = [&](const std::string &what)
        { return FormatError("codebook line " + std::to_string(line_no) + ": " + what); };

        std::string key;
        int version = 0;
        if (!(next_line() >> key >> version) || key != "risim-codebook" || version != 1)
            throw fail("expected 'risim-codebook 1'");

        Codebook cb;
        if (!(next_line() >> key >> cb.rows >> cb.cols) || key != "array")
            throw fail("expected 'array <rows> <cols>'");
        double wavelength = 0.0;
        if (!(next_line() >> key >> wavelength) || key != "wavelength")
            throw fail("expected 'wavelength <m>'");
        std::size_t count = 0;
        if (!(next_line() >> key >> count) || key != "entries")
            throw fail("expected 'entries <count>'");

        cb.entries.resize(count);
        for (auto &e : cb.entries)
        {
            if (!(next_line() >> key >> e.beam_index >> e.direction.phi >> e.direction.theta >> e.focus_r) || key != "entry")
                throw fail("expected 'entry <index> <phi> <theta> <focus_r>'");
            e.profile.wavelength = wavelength;
            e.profile.focus_point = sph_to_cart({e.focus_r, e.direction.phi, e.direction.theta});
            e.profile.quantized = PhaseGrid(cb.rows, cb.cols);
            for (std::size_t n = 0; n < cb.rows; ++n)
            {
                next_line();
                if (line.size() != cb.cols)
                    throw fail("pattern row has " + std::to_string(line.size()) + " columns, expected " + std::to_string(cb.cols));
                for (std::size_t m = 0; m < cb.cols; ++m)
                {
                    if (line[m] != '0' && line[m] != '1')
                        throw fail("pattern characters must be '0' or '1'");
                    e.profile.quantized(n, m) = line[m] == '1' ? std::numbers::pi : 0.0;
                }
            }
        }
        return cb;
    }
}

#endif
