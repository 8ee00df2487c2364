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

#ifndef RISIM_VOLUMETRIC_HPP
#define RISIM_VOLUMETRIC_HPP

#include "risim/detection.hpp"
#include "risim/geometry.hpp"
#include "risim/matrix.hpp"
#include "risim/parallel.hpp"
#include "risim/sfcw.hpp"
#include "risim/spatial_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace risim
{
    // ---------------------------------------------------------------- 2D projection

    struct BeamWindow
    {
        double r_min = 0.0; // [m]
        double r_max = 0.0; // [m]
    };

    // Per-beam windows for ROIs scanned back to back (beam order = concatenated ROI grids).
    inline std::vector<BeamWindow> windows_from_rois(std::span<const RoiSpec> rois)
    {
        std::vector<BeamWindow> out;
        for (const auto &r : rois)
            out.insert(out.end(), r.beam_count(), BeamWindow{r.r_min, r.r_max});
        return out;
    }

    // Window [focus_r - pad, focus_r + pad] per beam; the focus distance is the detection range.
    inline std::vector<BeamWindow> windows_from_focus(const RangeProfileSet &profiles, double range_pad)
    {
        std::vector<BeamWindow> out;
        for (const auto &p : profiles.profiles)
            out.push_back({std::max(0.0, p.focus_r - range_pad), p.focus_r + range_pad});
        return out;
    }

    // Peak magnitude per beam inside its range window, on the (phi, theta) lattice of the beams.
    // values(j, i) belongs to theta_axis[j], phi_axis[i]; lattice points without a beam stay 0.
    struct IntensityMap2D
    {
        std::vector<double> phi_axis;   // [deg] ascending
        std::vector<double> theta_axis; // [deg] ascending
        Matrix<double> values;
        Matrix<double> peak_range;       // [m] range of each cell's maximum
        double r_min = 0.0, r_max = 0.0; // union of the windows used [m]
    };

    namespace detail
    {
        // Sorted unique values, merging entries closer than tol.
        inline std::vector<double> unique_axis(std::vector<double> v, double tol = 1e-9)
        {
            std::sort(v.begin(), v.end());
            std::vector<double> out;
            for (double x : v)
                if (out.empty() || x - out.back() > tol)
                    out.push_back(x);
            return out;
        }

        inline std::size_t axis_index(const std::vector<double> &axis, double v, double tol = 1e-9)
        {
            auto it = std::lower_bound(axis.begin(), axis.end(), v - tol);
            return std::size_t(it - axis.begin());
        }

        inline void check_windows(const RangeProfileSet &profiles, std::span<const BeamWindow> windows)
        {
            if (windows.size() != profiles.size())
                throw std::invalid_argument("range windows do not match the beam count");
        }
    }

    inline IntensityMap2D project_2d(const RangeProfileSet &profiles, std::span<const BeamWindow> windows)
    {
        detail::check_windows(profiles, windows);
        IntensityMap2D map;
        if (profiles.empty())
            return map;

        std::vector<double> phis, thetas;
        for (const auto &p : profiles.profiles)
        {
            phis.push_back(p.direction.phi);
            thetas.push_back(p.direction.theta);
        }
        map.phi_axis = detail::unique_axis(phis);
        map.theta_axis = detail::unique_axis(thetas);
        map.values = Matrix<double>(map.theta_axis.size(), map.phi_axis.size(), 0.0);
        map.peak_range = Matrix<double>(map.theta_axis.size(), map.phi_axis.size(), 0.0);
        map.r_min = std::numeric_limits<double>::infinity();
        map.r_max = -std::numeric_limits<double>::infinity();

        for (std::size_t b = 0; b < profiles.size(); ++b)
        {
            const auto &p = profiles.profiles[b];
            const auto &w = windows[b];
            if (!(w.r_min < w.r_max))
                throw std::invalid_argument("project_2d: empty range window");
            map.r_min = std::min(map.r_min, w.r_min);
            map.r_max = std::max(map.r_max, w.r_max);
            bool any = false;
            double peak = 0.0, peak_r = 0.0;
            for (std::size_t k = 0; k < p.samples.size(); ++k)
            {
                const double r = p.range(k);
                if (r < w.r_min || r > w.r_max)
                    continue;
                const double a = std::abs(p.samples[k]);
                if (!any || a > peak)
                {
                    peak = a;
                    peak_r = r;
                }
                any = true;
            }
            if (!any)
                throw std::invalid_argument("project_2d: no range bins inside the window");
            const auto j = detail::axis_index(map.theta_axis, p.direction.theta);
            const auto i = detail::axis_index(map.phi_axis, p.direction.phi);
            if (peak >= map.values(j, i))
            {
                map.values(j, i) = peak;
                map.peak_range(j, i) = peak_r;
            }
        }
        return map;
    }

    // I(phi, theta) = max_{R in [r_min, r_max]} |s(phi, theta)(R)|
    inline IntensityMap2D project_2d(const RangeProfileSet &profiles, double r_min, double r_max)
    {
        if (!(r_min < r_max))
            throw std::invalid_argument("project_2d: r_min must be below r_max");
        const std::vector<BeamWindow> windows(profiles.size(), BeamWindow{r_min, r_max});
        return project_2d(profiles, windows);
    }

    // ---------------------------------------------------------------- samples

    inline constexpr double compensation_reference_range = 1.0; // [m]

    // Two-way spreading compensation in the amplitude domain: |s| * (R / R_ref)^2, i.e. R^4 in power.
    inline double compensate(double magnitude, double r, double r_ref = compensation_reference_range)
    {
        if (!(r > 0.0))
            throw std::invalid_argument("compensate: range must be positive");
        const double g = r / r_ref;
        return magnitude * g * g;
    }

    struct SamplePoint
    {
        CartesianPoint position;
        double magnitude = 0.0; // compensated unless disabled
        std::size_t beam = 0;
        std::size_t bin = 0;
    };

    // Every in-window bin of every beam, placed along the beam direction at its range.
    // Output order is beam-major, bins ascending.
    inline std::vector<SamplePoint> samples_from_profiles(const RangeProfileSet &profiles,
                                                          std::span<const BeamWindow> windows,
                                                          bool apply_compensation = true)
    {
        detail::check_windows(profiles, windows);
        std::vector<SamplePoint> out;
        for (std::size_t b = 0; b < profiles.size(); ++b)
        {
            const auto &p = profiles.profiles[b];
            for (std::size_t k = 0; k < p.samples.size(); ++k)
            {
                const double r = p.range(k);
                if (r < windows[b].r_min || r > windows[b].r_max || !(r > 0.0))
                    continue;
                const double mag = std::abs(p.samples[k]);
                out.push_back({sph_to_cart({r, p.direction.phi, p.direction.theta}),
                               apply_compensation ? compensate(mag, r) : mag, b, k});
            }
        }
        return out;
    }

    inline std::vector<SamplePoint> samples_from_profiles(const RangeProfileSet &profiles, const RoiSpec &roi,
                                                          bool apply_compensation = true)
    {
        const std::vector<BeamWindow> windows(profiles.size(), BeamWindow{roi.r_min, roi.r_max});
        return samples_from_profiles(profiles, windows, apply_compensation);
    }

    // ---------------------------------------------------------------- voxel grid

    // Cartesian scalar volume. `origin` is the min corner; voxel (i, j, k) is centered at
    // origin + l * (i + 1/2, j + 1/2, k + 1/2). Storage index is (k * ny + j) * nx + i.
    struct VoxelGrid
    {
        CartesianPoint origin;
        double voxel_size = 0.0;
        std::size_t nx = 0, ny = 0, nz = 0;
        std::vector<double> values;   // raw voxelized field
        std::vector<double> filtered; // smoothed and thresholded field, empty if not computed

        std::size_t size() const { return nx * ny * nz; }
        std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (k * ny + j) * nx + i; }
        CartesianPoint center(std::size_t i, std::size_t j, std::size_t k) const
        {
            return origin + voxel_size * CartesianPoint{double(i) + 0.5, double(j) + 0.5, double(k) + 0.5};
        }
        CartesianPoint center(std::size_t flat) const
        {
            return center(flat % nx, (flat / nx) % ny, flat / (nx * ny));
        }

        void validate() const
        {
            if (!(voxel_size > 0.0))
                throw std::invalid_argument("VoxelGrid: voxel size must be positive");
            if (values.size() != size())
                throw std::invalid_argument("VoxelGrid: value count does not match dimensions");
            if (!filtered.empty() && filtered.size() != size())
                throw std::invalid_argument("VoxelGrid: filtered field does not match dimensions");
        }
    };

    enum class GridExtent
    {
        bounding_box, // sample bounding box padded by pad_voxels * l
        hemisphere,   // x in [0, R], y and z in [-R, R], R = farthest sample range
        fixed,        // origin and dims given explicitly
    };

    struct GridSpec
    {
        double voxel_size = 0.02; // l [m]
        GridExtent extent = GridExtent::bounding_box;
        double pad_voxels = 5.0;
        CartesianPoint origin;                  // fixed extent only
        std::size_t nx = 0, ny = 0, nz = 0;     // fixed extent only
    };

    // Empty grid with the layout described by spec for the given sample cloud.
    inline VoxelGrid layout_grid(const GridSpec &spec, std::span<const SamplePoint> samples)
    {
        if (!(spec.voxel_size > 0.0))
            throw std::invalid_argument("layout_grid: voxel size must be positive");
        VoxelGrid g;
        g.voxel_size = spec.voxel_size;
        const double l = spec.voxel_size;

        if (spec.extent == GridExtent::fixed)
        {
            if (spec.nx == 0 || spec.ny == 0 || spec.nz == 0)
                throw std::invalid_argument("layout_grid: degenerate grid dimensions");
            g.origin = spec.origin;
            g.nx = spec.nx;
            g.ny = spec.ny;
            g.nz = spec.nz;
        }
        else
        {
            if (samples.empty())
                throw std::invalid_argument("layout_grid: no samples to size the grid");
            CartesianPoint lo = samples.front().position, hi = lo;
            double r_far = 0.0;
            for (const auto &s : samples)
            {
                const auto &p = s.position;
                lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
                hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
                r_far = std::max(r_far, norm(p));
            }
            if (spec.extent == GridExtent::hemisphere)
            {
                lo = {0.0, -r_far, -r_far};
                hi = {r_far, r_far, r_far};
            }
            else
            {
                const double pad = spec.pad_voxels * l;
                lo = lo - CartesianPoint{pad, pad, pad};
                hi = hi + CartesianPoint{pad, pad, pad};
            }
            g.origin = lo;
            g.nx = std::size_t(std::ceil((hi.x - lo.x) / l)) + 1;
            g.ny = std::size_t(std::ceil((hi.y - lo.y) / l)) + 1;
            g.nz = std::size_t(std::ceil((hi.z - lo.z) / l)) + 1;
        }
        g.values.assign(g.size(), 0.0);
        return g;
    }

    // Nearest-sample assignment: each voxel takes the value of the sample closest to its center, or 0
    // when that sample is farther than delta. Ties resolve to the lowest (beam, bin).
    inline VoxelGrid voxelize(std::span<const SamplePoint> samples, VoxelGrid grid, double delta, unsigned threads = 1)
    {
        if (!(delta > 0.0))
            throw std::invalid_argument("voxelize: delta must be positive");
        if (grid.size() == 0 || !(grid.voxel_size > 0.0))
            throw std::invalid_argument("voxelize: degenerate grid");
        grid.values.assign(grid.size(), 0.0);
        grid.filtered.clear();
        if (samples.empty())
            return grid;

        std::vector<CartesianPoint> pts(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            pts[i] = samples[i].position;
        const RadiusIndex index(pts, delta);
        const double delta2 = delta * delta;

        const std::size_t slab = grid.nx * grid.ny;
        parallel_for(grid.nz, threads, [&](std::size_t k)
                     {
            for (std::size_t j = 0; j < grid.ny; ++j)
                for (std::size_t i = 0; i < grid.nx; ++i)
                {
                    const auto c = grid.center(i, j, k);
                    double best = std::numeric_limits<double>::infinity();
                    std::size_t best_idx = samples.size();
                    index.for_each_candidate(c, [&](std::size_t s)
                                             {
                        const auto d = samples[s].position - c;
                        const double d2 = d.x * d.x + d.y * d.y + d.z * d.z;
                        if (d2 < best ||
                            (d2 == best && (samples[s].beam < samples[best_idx].beam ||
                                            (samples[s].beam == samples[best_idx].beam && samples[s].bin < samples[best_idx].bin))))
                        {
                            best = d2;
                            best_idx = s;
                        } });
                    if (best_idx < samples.size() && best <= delta2)
                        grid.values[k * slab + j * grid.nx + i] = samples[best_idx].magnitude;
                } });
        return grid;
    }

    inline VoxelGrid voxelize(std::span<const SamplePoint> samples, const GridSpec &spec, double delta, unsigned threads = 1)
    {
        if (samples.empty())
            throw std::invalid_argument("voxelize: no samples");
        return voxelize(samples, layout_grid(spec, samples), delta, threads);
    }

    // ---------------------------------------------------------------- filtering

    // Sampled Gaussian exp(-i^2 / (2 sigma^2)) for |i| <= ceil(4 sigma), normalized to unit sum.
    inline std::vector<double> gaussian_kernel_1d(double sigma)
    {
        if (!(sigma > 0.0))
            throw std::invalid_argument("gaussian_kernel_1d: sigma must be positive");
        const long radius = long(std::ceil(4.0 * sigma));
        std::vector<double> g(std::size_t(2 * radius + 1));
        double sum = 0.0;
        for (long i = -radius; i <= radius; ++i)
            sum += g[std::size_t(i + radius)] = std::exp(-double(i * i) / (2.0 * sigma * sigma));
        for (auto &v : g)
            v /= sum;
        return g;
    }

    namespace detail
    {
        // One zero-padded 1D convolution pass along axis (0 = x, 1 = y, 2 = z).
        inline std::vector<double> convolve_axis(const std::vector<double> &in, std::size_t nx, std::size_t ny,
                                                 std::size_t nz, int axis, std::span<const double> kernel,
                                                 unsigned threads)
        {
            std::vector<double> out(in.size(), 0.0);
            const long radius = long(kernel.size() / 2);
            const std::array<std::size_t, 3> dims{nx, ny, nz};
            const std::array<std::size_t, 3> stride{1, nx, nx * ny};
            const long n = long(dims[std::size_t(axis)]);
            const std::size_t s = stride[std::size_t(axis)];
            parallel_for(nz, threads, [&](std::size_t k)
                         {
                for (std::size_t j = 0; j < ny; ++j)
                    for (std::size_t i = 0; i < nx; ++i)
                    {
                        const std::array<std::size_t, 3> idx{i, j, k};
                        const long pos = long(idx[std::size_t(axis)]);
                        const std::size_t flat = (k * ny + j) * nx + i;
                        const std::size_t line0 = flat - std::size_t(pos) * s;
                        double acc = 0.0;
                        for (long t = -radius; t <= radius; ++t)
                        {
                            const long q = pos + t;
                            if (q < 0 || q >= n)
                                continue;
                            acc += kernel[std::size_t(t + radius)] * in[line0 + std::size_t(q) * s];
                        }
                        out[flat] = acc;
                    } });
            return out;
        }
    }

    // nu_s = nu * G, separable passes along x, y, z. sigma in voxels.
    inline std::vector<double> gaussian_filter_3d(const VoxelGrid &grid, std::span<const double> field, double sigma,
                                                  unsigned threads = 1)
    {
        if (field.size() != grid.size())
            throw std::invalid_argument("gaussian_filter_3d: field does not match the grid");
        const auto kernel = gaussian_kernel_1d(sigma);
        std::vector<double> v(field.begin(), field.end());
        for (int axis = 0; axis < 3; ++axis)
            v = detail::convolve_axis(v, grid.nx, grid.ny, grid.nz, axis, kernel, threads);
        return v;
    }

    // Smooths grid.values; returns a grid whose values are nu_s.
    inline VoxelGrid gaussian_filter_3d(const VoxelGrid &grid, double sigma, unsigned threads = 1)
    {
        grid.validate();
        VoxelGrid out = grid;
        out.values = gaussian_filter_3d(grid, grid.values, sigma, threads);
        out.filtered.clear();
        return out;
    }

    // Keep values >= max * 10^(tau_db / 20), zero the rest. tau = -inf is the identity.
    inline std::vector<double> threshold(std::span<const double> field, double tau_db)
    {
        double peak = 0.0;
        for (double v : field)
            peak = std::max(peak, v);
        const double t = peak * std::pow(10.0, tau_db / 20.0);
        std::vector<double> out(field.size());
        for (std::size_t i = 0; i < field.size(); ++i)
            out[i] = field[i] >= t ? field[i] : 0.0;
        return out;
    }

    // ---------------------------------------------------------------- full chain

    struct ImagingParams
    {
        double voxel_size = 0.02;      // l [m]
        double delta = 0.10;           // nearest-sample cutoff [m]
        double sigma = 2.0;            // Gaussian width
        bool sigma_in_voxels = true;   // false: sigma in meters
        double tau_db = -65.0;         // threshold relative to the smoothed maximum
        bool compensate = true;        // R^4 power-loss compensation
        GridExtent extent = GridExtent::bounding_box;
        double pad_voxels = 5.0;

        double sigma_voxels() const { return sigma_in_voxels ? sigma : sigma / voxel_size; }
    };

    struct Reconstruction
    {
        IntensityMap2D map;
        VoxelGrid voxels;            // values = raw nu, filtered = nu_f
        std::size_t sample_count = 0;
        SamplePoint peak_sample;     // strongest compensated sample
    };

    inline Reconstruction reconstruct(const RangeProfileSet &profiles, std::span<const BeamWindow> windows,
                                      const ImagingParams &params, unsigned threads = 1)
    {
        detail::check_windows(profiles, windows);
        Reconstruction rec;
        if (profiles.empty())
            return rec;

        rec.map = project_2d(profiles, windows);
        const auto samples = samples_from_profiles(profiles, windows, params.compensate);
        rec.sample_count = samples.size();
        if (samples.empty())
            return rec;
        rec.peak_sample = *std::max_element(samples.begin(), samples.end(), [](const auto &a, const auto &b)
                                            { return a.magnitude < b.magnitude; });

        GridSpec spec;
        spec.voxel_size = params.voxel_size;
        spec.extent = params.extent;
        spec.pad_voxels = params.pad_voxels;
        rec.voxels = voxelize(samples, layout_grid(spec, samples), params.delta, threads);
        const auto smoothed = gaussian_filter_3d(rec.voxels, rec.voxels.values, params.sigma_voxels(), threads);
        rec.voxels.filtered = threshold(smoothed, params.tau_db);
        return rec;
    }

    inline Reconstruction reconstruct(const RangeProfileSet &profiles, const RoiSpec &roi, const ImagingParams &params,
                                      unsigned threads = 1)
    {
        const std::vector<BeamWindow> windows(profiles.size(), BeamWindow{roi.r_min, roi.r_max});
        return reconstruct(profiles, windows, params, threads);
    }

    // ---------------------------------------------------------------- analysis

    struct VoxelComponent
    {
        std::size_t voxel_count = 0;
        double total = 0.0;       // sum of field values
        CartesianPoint centroid;  // field-weighted
        double peak = 0.0;
        CartesianPoint peak_position;
    };

    // 26-connected components of the nonzero voxels of `field`, ordered by descending total.
    inline std::vector<VoxelComponent> connected_components(const VoxelGrid &grid, std::span<const double> field)
    {
        if (field.size() != grid.size())
            throw std::invalid_argument("connected_components: field does not match the grid");
        std::vector<char> seen(field.size(), 0);
        std::vector<VoxelComponent> comps;
        std::vector<std::size_t> stack;
        for (std::size_t start = 0; start < field.size(); ++start)
        {
            if (seen[start] || !(field[start] > 0.0))
                continue;
            VoxelComponent c;
            CartesianPoint wsum;
            seen[start] = 1;
            stack.push_back(start);
            while (!stack.empty())
            {
                const auto v = stack.back();
                stack.pop_back();
                const auto p = grid.center(v);
                const double w = field[v];
                ++c.voxel_count;
                c.total += w;
                wsum = wsum + w * p;
                if (w > c.peak)
                {
                    c.peak = w;
                    c.peak_position = p;
                }
                const long i = long(v % grid.nx), j = long((v / grid.nx) % grid.ny), k = long(v / (grid.nx * grid.ny));
                for (long dk = -1; dk <= 1; ++dk)
                    for (long dj = -1; dj <= 1; ++dj)
                        for (long di = -1; di <= 1; ++di)
                        {
                            const long a = i + di, b = j + dj, cc = k + dk;
                            if (a < 0 || b < 0 || cc < 0 || a >= long(grid.nx) || b >= long(grid.ny) || cc >= long(grid.nz))
                                continue;
                            const auto u = grid.index(std::size_t(a), std::size_t(b), std::size_t(cc));
                            if (!seen[u] && field[u] > 0.0)
                            {
                                seen[u] = 1;
                                stack.push_back(u);
                            }
                        }
            }
            c.centroid = (1.0 / c.total) * wsum;
            comps.push_back(c);
        }
        std::stable_sort(comps.begin(), comps.end(), [](const auto &a, const auto &b)
                         { return a.total > b.total; });
        return comps;
    }

    // Components holding at least `min_fraction` of the summed field, in the same order.
    inline std::vector<VoxelComponent> significant_components(const std::vector<VoxelComponent> &comps,
                                                              double min_fraction = 0.01)
    {
        double total = 0.0;
        for (const auto &c : comps)
            total += c.total;
        std::vector<VoxelComponent> out;
        for (const auto &c : comps)
            if (c.total >= min_fraction * total)
                out.push_back(c);
        return out;
    }

    // Field-weighted centroid of all nonzero voxels; origin for an empty field.
    inline CartesianPoint weighted_centroid(const VoxelGrid &grid, std::span<const double> field)
    {
        CartesianPoint sum;
        double total = 0.0;
        for (std::size_t v = 0; v < field.size(); ++v)
            if (field[v] > 0.0)
            {
                sum = sum + field[v] * grid.center(v);
                total += field[v];
            }
        return total > 0.0 ? (1.0 / total) * sum : CartesianPoint{};
    }

    inline std::size_t argmax(std::span<const double> field)
    {
        return std::size_t(std::max_element(field.begin(), field.end()) - field.begin());
    }
}

#endif
