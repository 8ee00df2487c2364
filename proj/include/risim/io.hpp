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

#ifndef RISIM_IO_HPP
#define RISIM_IO_HPP

#include "risim/error.hpp"
#include "risim/tensor.hpp"
#include "risim/volumetric.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>

// Binary container shared by measurement tensors and voxel grids. All fields little-endian.
//
//   char[8]  magic "RISIMBIN"
//   u32      version (1)
//   u32      kind: 0 frequency tensor, 1 range tensor, 2 dense voxel grid
//
// kind 0/1:
//   u64      row length (K or fft_len)
//   u64      beam count
//   f64      f_start [Hz], f64 f_step [Hz]
//   u64      sweep points K
//   u64      fft_len (0 for frequency data)
//   f64      range offset [m]
//   f64      per-beam dwell time [s]
//   beams x  (f64 phi [deg], f64 theta [deg], f64 focus_r [m])
//   beams x row length x (f64 re, f64 im), beam-major
//
// kind 2:
//   f64 x3   origin [m], f64 voxel size [m]
//   u64 x3   nx, ny, nz
//   u32      has_filtered, u32 reserved
//   nx*ny*nz f64 raw values, then the same count of filtered values if present
//   storage index (k * ny + j) * nx + i

namespace risim
{
    inline constexpr std::array<char, 8> container_magic{'R', 'I', 'S', 'I', 'M', 'B', 'I', 'N'};
    inline constexpr std::uint32_t container_version = 1;

    enum class ContainerKind : std::uint32_t
    {
        frequency_tensor = 0,
        range_tensor = 1,
        voxel_grid = 2,
    };

    namespace detail
    {
        class LeWriter
        {
        public:
            explicit LeWriter(std::ostream &os) : os_(os) {}

            void u32(std::uint32_t v) { put(v, 4); }
            void u64(std::uint64_t v) { put(v, 8); }
            void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
            void bytes(std::span<const char> b) { os_.write(b.data(), std::streamsize(b.size())); }

        private:
            void put(std::uint64_t v, int n)
            {
                char b[8];
                for (int i = 0; i < n; ++i)
                    b[i] = char((v >> (8 * i)) & 0xffu);
                os_.write(b, n);
            }
            std::ostream &os_;
        };

        class LeReader
        {
        public:
            explicit LeReader(std::istream &is) : is_(is) {}

            std::uint32_t u32() { return std::uint32_t(get(4)); }
            std::uint64_t u64() { return get(8); }
            double f64() { return std::bit_cast<double>(get(8)); }
            void bytes(std::span<char> b)
            {
                if (!is_.read(b.data(), std::streamsize(b.size())))
                    throw FormatError("container: truncated data");
            }

        private:
            std::uint64_t get(int n)
            {
                unsigned char b[8];
                if (!is_.read(reinterpret_cast<char *>(b), n))
                    throw FormatError("container: truncated data");
                std::uint64_t v = 0;
                for (int i = 0; i < n; ++i)
                    v |= std::uint64_t(b[i]) << (8 * i);
                return v;
            }
            std::istream &is_;
        };

        inline ContainerKind read_header(LeReader &r)
        {
            std::array<char, 8> magic{};
            r.bytes(magic);
            if (magic != container_magic)
                throw FormatError("container: bad magic");
            if (const auto v = r.u32(); v != container_version)
                throw FormatError("container: unsupported version " + std::to_string(v));
            const auto kind = r.u32();
            if (kind > 2)
                throw FormatError("container: unknown kind " + std::to_string(kind));
            return ContainerKind(kind);
        }

        // Guards allocations against corrupt headers.
        inline void check_count(std::uint64_t n, std::uint64_t limit, const char *what)
        {
            if (n > limit)
                throw FormatError(std::string("container: implausible ") + what);
        }
    }

    inline void write_tensor(std::ostream &os, const MeasurementTensor &t)
    {
        t.validate();
        detail::LeWriter w(os);
        w.bytes(container_magic);
        w.u32(container_version);
        w.u32(t.domain == SampleDomain::frequency ? std::uint32_t(ContainerKind::frequency_tensor)
                                                  : std::uint32_t(ContainerKind::range_tensor));
        w.u64(t.data.cols());
        w.u64(t.beams.size());
        w.f64(t.sweep.f_start());
        w.f64(t.sweep.f_step());
        w.u64(t.sweep.points());
        w.u64(t.domain == SampleDomain::range ? t.fft_len : 0);
        w.f64(t.range_offset);
        w.f64(t.dwell_time);
        for (const auto &b : t.beams)
        {
            w.f64(b.direction.phi);
            w.f64(b.direction.theta);
            w.f64(b.focus_r);
        }
        for (const auto &v : t.data.data())
        {
            w.f64(v.real());
            w.f64(v.imag());
        }
        if (!os)
            throw FormatError("write_tensor: stream error");
    }

    inline MeasurementTensor read_tensor(std::istream &is)
    {
        detail::LeReader r(is);
        const auto kind = detail::read_header(r);
        if (kind == ContainerKind::voxel_grid)
            throw FormatError("read_tensor: container holds a voxel grid");

        const auto row_len = r.u64();
        const auto beams = r.u64();
        detail::check_count(row_len, 1u << 26, "row length");
        detail::check_count(beams, 1u << 26, "beam count");
        const double f_start = r.f64(), f_step = r.f64();
        const auto points = r.u64();
        const auto fft_len = r.u64();
        const double offset = r.f64();
        const double dwell = r.f64();

        MeasurementTensor t;
        try
        {
            t.sweep = SweepConfig(f_start, f_step, std::size_t(points));
        }
        catch (const std::invalid_argument &e)
        {
            throw FormatError(std::string("read_tensor: ") + e.what());
        }
        t.domain = kind == ContainerKind::frequency_tensor ? SampleDomain::frequency : SampleDomain::range;
        t.fft_len = std::size_t(fft_len);
        t.range_offset = offset;
        t.dwell_time = dwell;
        t.beams.resize(std::size_t(beams));
        for (auto &b : t.beams)
        {
            b.direction.phi = r.f64();
            b.direction.theta = r.f64();
            b.focus_r = r.f64();
        }
        t.data = Matrix<cdouble>(std::size_t(beams), std::size_t(row_len));
        for (auto &v : t.data.data())
        {
            const double re = r.f64();
            const double im = r.f64();
            v = {re, im};
        }
        try
        {
            t.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw FormatError(std::string("read_tensor: ") + e.what());
        }
        return t;
    }

    inline void write_voxels_binary(std::ostream &os, const VoxelGrid &g)
    {
        g.validate();
        detail::LeWriter w(os);
        w.bytes(container_magic);
        w.u32(container_version);
        w.u32(std::uint32_t(ContainerKind::voxel_grid));
        w.f64(g.origin.x);
        w.f64(g.origin.y);
        w.f64(g.origin.z);
        w.f64(g.voxel_size);
        w.u64(g.nx);
        w.u64(g.ny);
        w.u64(g.nz);
        w.u32(g.filtered.empty() ? 0 : 1);
        w.u32(0);
        for (double v : g.values)
            w.f64(v);
        for (double v : g.filtered)
            w.f64(v);
        if (!os)
            throw FormatError("write_voxels_binary: stream error");
    }

    inline VoxelGrid read_voxels_binary(std::istream &is)
    {
        detail::LeReader r(is);
        if (detail::read_header(r) != ContainerKind::voxel_grid)
            throw FormatError("read_voxels_binary: container does not hold a voxel grid");
        VoxelGrid g;
        g.origin.x = r.f64();
        g.origin.y = r.f64();
        g.origin.z = r.f64();
        g.voxel_size = r.f64();
        if (!(g.voxel_size > 0.0))
            throw FormatError("read_voxels_binary: voxel size must be positive");
        g.nx = std::size_t(r.u64());
        g.ny = std::size_t(r.u64());
        g.nz = std::size_t(r.u64());
        detail::check_count(g.nx, 1u << 20, "nx");
        detail::check_count(g.ny, 1u << 20, "ny");
        detail::check_count(g.nz, 1u << 20, "nz");
        detail::check_count(std::uint64_t(g.nx) * g.ny * g.nz, std::uint64_t(1) << 32, "voxel count");
        const bool has_filtered = r.u32() != 0;
        r.u32();
        g.values.resize(g.size());
        for (auto &v : g.values)
            v = r.f64();
        if (has_filtered)
        {
            g.filtered.resize(g.size());
            for (auto &v : g.filtered)
                v = r.f64();
        }
        return g;
    }

    // Sparse text records for nonzero voxels of `field`:
    //   # risim voxels <label>
    //   origin x y z / voxel_size l / dims nx ny nz
    //   then "x y z value" per nonzero voxel (voxel centers)
    inline void write_voxels_text(std::ostream &os, const VoxelGrid &g, std::span<const double> field,
                                  const std::string &label)
    {
        if (field.size() != g.size())
            throw std::invalid_argument("write_voxels_text: field does not match the grid");
        const auto old = os.precision(std::numeric_limits<double>::max_digits10);
        os << "# risim voxels " << label << '\n';
        os << "origin " << g.origin.x << ' ' << g.origin.y << ' ' << g.origin.z << '\n';
        os << "voxel_size " << g.voxel_size << '\n';
        os << "dims " << g.nx << ' ' << g.ny << ' ' << g.nz << '\n';
        os << "# x y z value\n";
        for (std::size_t v = 0; v < field.size(); ++v)
            if (field[v] != 0.0)
            {
                const auto c = g.center(v);
                os << c.x << ' ' << c.y << ' ' << c.z << ' ' << field[v] << '\n';
            }
        os.precision(old);
    }

    // Plain-text matrix: header row of phi values, then one row per theta.
    inline void write_intensity_map(std::ostream &os, const IntensityMap2D &m)
    {
        const auto old = os.precision(std::numeric_limits<double>::max_digits10);
        os << "# risim intensity map: rows theta [deg], columns phi [deg], values max |s| in window\n";
        os << "# window " << m.r_min << ' ' << m.r_max << '\n';
        os << "theta\\phi";
        for (double p : m.phi_axis)
            os << ' ' << p;
        os << '\n';
        for (std::size_t j = 0; j < m.theta_axis.size(); ++j)
        {
            os << m.theta_axis[j];
            for (std::size_t i = 0; i < m.phi_axis.size(); ++i)
                os << ' ' << m.values(j, i);
            os << '\n';
        }
        os.precision(old);
    }

    template <typename Writer>
    void write_file(const std::filesystem::path &path, Writer &&writer, bool binary = false)
    {
        std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
        if (!os)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        writer(os);
        if (!os)
            throw std::runtime_error("error writing " + path.string());
    }

    inline MeasurementTensor read_tensor_file(const std::filesystem::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw FormatError("cannot open " + path.string());
        return read_tensor(is);
    }

    inline void write_tensor_file(const std::filesystem::path &path, const MeasurementTensor &t)
    {
        write_file(path, [&](std::ostream &os)
                   { write_tensor(os, t); }, true);
    }
}

#endif
