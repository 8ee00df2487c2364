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


#include "catch_amalgamated.hpp"

#include "risim/volumetric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace risim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // Profiles with 1 cm bins and no offset; sample k sits at range 0.01 * k.
    RangeProfileSet synthetic_set(const std::vector<BeamDirection> &dirs, std::size_t bins)
    {
        RangeProfileSet set;
        set.fft_len = bins;
        for (const auto &d : dirs)
        {
            RangeProfile p;
            p.samples.assign(bins, cdouble{});
            p.bin_spacing = 0.01;
            p.direction = d;
            p.focus_r = 3.0;
            set.profiles.push_back(std::move(p));
        }
        return set;
    }

    VoxelGrid empty_grid(std::size_t nx, std::size_t ny, std::size_t nz, double l = 0.1)
    {
        VoxelGrid g;
        g.voxel_size = l;
        g.nx = nx;
        g.ny = ny;
        g.nz = nz;
        g.values.assign(g.size(), 0.0);
        return g;
    }

    std::vector<double> random_field(std::size_t n, std::mt19937_64 &rng, double density = 1.0)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> f(n);
        for (auto &v : f)
            v = u(rng) < density ? u(rng) : 0.0;
        return f;
    }
}

TEST_CASE("2D projection takes the in-window maximum per beam", "[volumetric]")
{
    std::vector<BeamDirection> dirs;
    for (double th : {95.0, 96.0})
        for (double ph : {-1.0, 0.0, 1.0})
            dirs.push_back({ph, th});
    auto set = synthetic_set(dirs, 600);
    for (std::size_t b = 0; b < set.size(); ++b)
    {
        auto &s = set.profiles[b].samples;
        s[300 + b] = {0.0, double(b + 1)}; // 3.00 + 0.01 b m
        s[50] = {100.0, 0.0};             // outside the window
    }
    const auto map = project_2d(set, 2.5, 3.5);
    CHECK(map.phi_axis == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(map.theta_axis == std::vector<double>{95.0, 96.0});
    for (std::size_t b = 0; b < set.size(); ++b)
    {
        const std::size_t j = b / 3, i = b % 3;
        CHECK(map.values(j, i) == double(b + 1));
        CHECK_THAT(map.peak_range(j, i), WithinAbs(3.0 + 0.01 * double(b), 1e-12));
    }
    CHECK(map.r_min == 2.5);
    CHECK(map.r_max == 3.5);

    // Monotone in the profile magnitude.
    auto louder = set;
    louder.profiles[4].samples[304] *= 3.0;
    const auto map2 = project_2d(louder, 2.5, 3.5);
    CHECK(map2.values(1, 1) == 3.0 * map.values(1, 1));
    CHECK(map2.values(0, 0) == map.values(0, 0));

    CHECK_THROWS_AS(project_2d(set, 3.0, 3.0), std::invalid_argument);
    const std::vector<BeamWindow> too_few(2, {2.5, 3.5});
    CHECK_THROWS_AS(project_2d(set, too_few), std::invalid_argument);
    CHECK_THROWS_AS(project_2d(set, 50.0, 60.0), std::invalid_argument);
}

TEST_CASE("2D projection keeps empty lattice points at zero", "[volumetric]")
{
    const std::vector<BeamDirection> dirs{{0.0, 90.0}, {2.0, 92.0}};
    auto set = synthetic_set(dirs, 400);
    set.profiles[0].samples[200] = 1.0;
    set.profiles[1].samples[210] = 2.0;
    const auto map = project_2d(set, 1.0, 3.0);
    REQUIRE(map.values.rows() == 2);
    REQUIRE(map.values.cols() == 2);
    CHECK(map.values(0, 0) == 1.0);
    CHECK(map.values(1, 1) == 2.0);
    CHECK(map.values(0, 1) == 0.0);
    CHECK(map.values(1, 0) == 0.0);
}

TEST_CASE("range compensation", "[volumetric]")
{
    CHECK(compensate(1.0, 1.0) == 1.0);
    CHECK(compensate(1.0, 2.0) == 4.0);
    CHECK(compensate(0.5, 3.0, 1.5) == 2.0);
    // 1/R^2 amplitude decay is flattened exactly.
    for (double r : {0.5, 2.0, 4.0, 7.3})
        CHECK_THAT(compensate(1.0 / (r * r), r), WithinRel(1.0, 1e-14));
    CHECK_THROWS_AS(compensate(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("samples are placed along the beam direction", "[volumetric]")
{
    const std::vector<BeamDirection> dirs{{-10.0, 95.0}, {20.0, 100.0}};
    auto set = synthetic_set(dirs, 400);
    for (auto &p : set.profiles)
        for (std::size_t k = 0; k < p.samples.size(); ++k)
            p.samples[k] = double(k);
    const std::vector<BeamWindow> windows{{1.0, 1.5}, {2.0, 2.2}};
    const auto s = samples_from_profiles(set, windows, false);
    REQUIRE(s.size() == 51 + 21);
    for (const auto &x : s)
    {
        const double r = 0.01 * double(x.bin);
        const auto sph = cart_to_sph(x.position);
        CHECK_THAT(sph.r, WithinAbs(r, 1e-12));
        CHECK_THAT(sph.phi, WithinAbs(dirs[x.beam].phi, 1e-9));
        CHECK_THAT(sph.theta, WithinAbs(dirs[x.beam].theta, 1e-9));
        CHECK(x.magnitude == double(x.bin));
    }
    CHECK(s.front().beam == 0);
    CHECK(s.front().bin == 100);
    CHECK(s.back().beam == 1);

    const auto c = samples_from_profiles(set, windows, true);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK_THAT(c[i].magnitude, WithinRel(compensate(s[i].magnitude, 0.01 * double(s[i].bin)), 1e-14));
}

TEST_CASE("grid layout covers the samples", "[volumetric]")
{
    std::vector<SamplePoint> s{{{2.0, -0.3, 0.1}, 1.0}, {{3.1, 0.4, -0.6}, 1.0}};
    GridSpec spec;
    spec.voxel_size = 0.05;
    const auto g = layout_grid(spec, s);
    CHECK_THAT(g.origin.x, WithinAbs(2.0 - 0.25, 1e-12));
    CHECK_THAT(g.origin.z, WithinAbs(-0.6 - 0.25, 1e-12));
    const auto far = g.center(g.nx - 1, g.ny - 1, g.nz - 1);
    CHECK(far.x >= 3.1 + 0.25 - 0.05);
    CHECK(far.y >= 0.4 + 0.25 - 0.05);
    CHECK(g.values.size() == g.size());

    spec.extent = GridExtent::hemisphere;
    const auto h = layout_grid(spec, s);
    const double rf = norm(s[1].position);
    CHECK(h.origin.x == 0.0);
    CHECK(h.origin.y == -rf);
    CHECK(double(h.nx) * 0.05 >= rf);

    spec.extent = GridExtent::fixed;
    spec.nx = 3;
    spec.ny = 4;
    spec.nz = 5;
    spec.origin = {1.0, 2.0, 3.0};
    const auto f = layout_grid(spec, {});
    CHECK(f.size() == 60);
    CHECK(f.center(0, 0, 0) == CartesianPoint{1.025, 2.025, 3.025});
    CHECK(f.index(2, 3, 4) == 59);

    spec.extent = GridExtent::bounding_box;
    CHECK_THROWS_AS(layout_grid(spec, {}), std::invalid_argument);
}

TEST_CASE("voxelization matches brute-force nearest sample", "[volumetric]")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-0.5, 0.5), m(0.1, 2.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        std::vector<SamplePoint> s(200 + 50 * std::size_t(trial));
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = {{2.0 + u(rng), u(rng), u(rng)}, m(rng), i / 10, i % 10};
        GridSpec spec;
        spec.voxel_size = 0.04;
        const double delta = trial % 2 ? 0.05 : 0.12;
        const auto g = voxelize(s, spec, delta, 1 + unsigned(trial % 3));
        for (std::size_t v = 0; v < g.size(); ++v)
        {
            const auto c = g.center(v);
            double best = std::numeric_limits<double>::infinity();
            double want = 0.0;
            for (const auto &p : s)
            {
                const double d = distance(p.position, c);
                if (d < best)
                {
                    best = d;
                    want = p.magnitude;
                }
            }
            if (best > delta)
                want = 0.0;
            REQUIRE(g.values[v] == want);
        }
    }
}

TEST_CASE("voxelization tie-break and edge cases", "[volumetric]")
{
    auto g = empty_grid(1, 1, 1, 0.5);
    // Two samples exactly equidistant from the single voxel center (0.25, 0.25, 0.25).
    const std::vector<SamplePoint> s{{{0.375, 0.25, 0.25}, 5.0, 3, 0}, {{0.125, 0.25, 0.25}, 7.0, 1, 9}};
    CHECK(voxelize(s, g, 0.2).values[0] == 7.0);
    CHECK(voxelize(s, g, 0.1).values[0] == 0.0);
    CHECK(voxelize({}, g, 0.1).values[0] == 0.0);
    CHECK_THROWS_AS(voxelize(s, g, 0.0), std::invalid_argument);
}

TEST_CASE("Gaussian kernel", "[volumetric]")
{
    for (double sigma : {0.5, 0.8, 2.0, 3.3})
    {
        const auto k = gaussian_kernel_1d(sigma);
        const auto radius = std::size_t(std::ceil(4.0 * sigma));
        REQUIRE(k.size() == 2 * radius + 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i)
        {
            sum += k[i];
            CHECK(k[i] == k[k.size() - 1 - i]);
            const double x = double(i) - double(radius);
            CHECK_THAT(k[i] / k[radius], WithinRel(std::exp(-x * x / (2.0 * sigma * sigma)), 1e-12));
        }
        CHECK_THAT(sum, WithinAbs(1.0, 1e-14));
    }
    CHECK_THROWS_AS(gaussian_kernel_1d(0.0), std::invalid_argument);
}

TEST_CASE("separable filter equals direct 3D convolution", "[volumetric]")
{
    std::mt19937_64 rng(31);
    const auto g = empty_grid(9, 7, 6);
    const auto field = random_field(g.size(), rng, 0.3);
    for (double sigma : {0.6, 1.0})
    {
        const auto k = gaussian_kernel_1d(sigma);
        const long r = long(k.size() / 2);
        const auto fast = gaussian_filter_3d(g, field, sigma, 2);
        for (long z = 0; z < long(g.nz); ++z)
            for (long y = 0; y < long(g.ny); ++y)
                for (long x = 0; x < long(g.nx); ++x)
                {
                    double acc = 0.0;
                    for (long c = -r; c <= r; ++c)
                        for (long b = -r; b <= r; ++b)
                            for (long a = -r; a <= r; ++a)
                            {
                                const long xi = x + a, yi = y + b, zi = z + c;
                                if (xi < 0 || yi < 0 || zi < 0 || xi >= long(g.nx) || yi >= long(g.ny) || zi >= long(g.nz))
                                    continue;
                                acc += k[std::size_t(a + r)] * k[std::size_t(b + r)] * k[std::size_t(c + r)] *
                                       field[g.index(std::size_t(xi), std::size_t(yi), std::size_t(zi))];
                            }
                    CHECK_THAT(fast[g.index(std::size_t(x), std::size_t(y), std::size_t(z))], WithinAbs(acc, 1e-13));
                }
    }
    CHECK(gaussian_filter_3d(g, field, 1.0, 1) == gaussian_filter_3d(g, field, 1.0, 3));

    // Far from the borders the filter preserves the total.
    auto big = empty_grid(21, 21, 21);
    big.values[big.index(10, 10, 10)] = 2.0;
    const auto sm = gaussian_filter_3d(big, 1.5);
    double total = 0.0;
    for (double v : sm.values)
        total += v;
    CHECK_THAT(total, WithinAbs(2.0, 1e-12));
    CHECK(argmax(sm.values) == big.index(10, 10, 10));
}

TEST_CASE("threshold", "[volumetric]")
{
    std::mt19937_64 rng(41);
    const auto f = random_field(500, rng);
    const double peak = *std::max_element(f.begin(), f.end());
    for (double tau : {-3.0, -6.0, -20.0})
    {
        const auto t = threshold(f, tau);
        const double T = peak * std::pow(10.0, tau / 20.0);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(t[i] == (f[i] >= T ? f[i] : 0.0));
        CHECK(threshold(t, tau) == t);
    }
    const auto only_max = threshold(f, 0.0);
    CHECK(std::count_if(only_max.begin(), only_max.end(), [](double v)
                        { return v > 0.0; }) == 1);
    CHECK(threshold(f, -std::numeric_limits<double>::infinity()) == f);
    const std::vector<double> zeros(10, 0.0);
    CHECK(threshold(zeros, -10.0) == zeros);
}

TEST_CASE("26-connected components", "[volumetric]")
{
    auto g = empty_grid(10, 10, 10, 0.1);
    std::vector<double> f(g.size(), 0.0);
    // Diagonal chain: corner contact only.
    f[g.index(1, 1, 1)] = 1.0;
    f[g.index(2, 2, 2)] = 1.0;
    f[g.index(3, 3, 3)] = 2.0;
    // Separate blob.
    f[g.index(7, 7, 7)] = 0.5;
    f[g.index(8, 7, 7)] = 0.5;
    // Isolated speck.
    f[g.index(0, 9, 0)] = 0.01;

    const auto comps = connected_components(g, f);
    REQUIRE(comps.size() == 3);
    CHECK(comps[0].voxel_count == 3);
    CHECK(comps[0].total == 4.0);
    CHECK(comps[0].peak == 2.0);
    CHECK(comps[0].peak_position == g.center(3, 3, 3));
    const auto want = 0.25 * (1.0 * g.center(1, 1, 1) + 1.0 * g.center(2, 2, 2) + 2.0 * g.center(3, 3, 3));
    CHECK(distance(comps[0].centroid, want) < 1e-12);
    CHECK(comps[1].voxel_count == 2);
    CHECK(distance(comps[1].centroid, 0.5 * (g.center(7, 7, 7) + g.center(8, 7, 7))) < 1e-12);
    CHECK(comps[2].voxel_count == 1);

    const auto sig = significant_components(comps);
    REQUIRE(sig.size() == 2);
    CHECK(sig[0].total == 4.0);
    CHECK(significant_components(comps, 0.0).size() == 3);
    CHECK(significant_components(comps, 0.5).size() == 1);

    const auto overall = weighted_centroid(g, f);
    CartesianPoint sum;
    double total = 0.0;
    for (std::size_t v = 0; v < f.size(); ++v)
    {
        sum = sum + f[v] * g.center(v);
        total += f[v];
    }
    CHECK(distance(overall, (1.0 / total) * sum) < 1e-12);
    CHECK(weighted_centroid(g, std::vector<double>(g.size(), 0.0)) == CartesianPoint{});

    CHECK(connected_components(g, std::vector<double>(g.size(), 0.0)).empty());
    CHECK_THROWS_AS(connected_components(g, std::vector<double>(5)), std::invalid_argument);
}

TEST_CASE("component count matches a union-find oracle on random fields", "[volumetric]")
{
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto g = empty_grid(8, 7, 6);
        const auto f = random_field(g.size(), rng, 0.08 + 0.01 * trial);
        std::vector<std::size_t> parent(f.size());
        for (std::size_t i = 0; i < parent.size(); ++i)
            parent[i] = i;
        auto find = [&](std::size_t i)
        {
            while (parent[i] != i)
                i = parent[i] = parent[parent[i]];
            return i;
        };
        for (std::size_t a = 0; a < f.size(); ++a)
            for (std::size_t b = a + 1; b < f.size(); ++b)
            {
                if (!(f[a] > 0.0 && f[b] > 0.0))
                    continue;
                const long dx = long(a % 8) - long(b % 8), dy = long(a / 8 % 7) - long(b / 8 % 7), dz = long(a / 56) - long(b / 56);
                if (std::abs(dx) <= 1 && std::abs(dy) <= 1 && std::abs(dz) <= 1)
                    parent[find(a)] = find(b);
            }
        std::size_t roots = 0, nonzero = 0;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] > 0.0)
            {
                ++nonzero;
                roots += find(i) == i;
            }
        const auto comps = connected_components(g, f);
        CHECK(comps.size() == roots);
        std::size_t counted = 0;
        for (const auto &c : comps)
            counted += c.voxel_count;
        CHECK(counted == nonzero);
        for (std::size_t i = 1; i < comps.size(); ++i)
            CHECK(comps[i - 1].total >= comps[i].total);
    }
}

TEST_CASE("reconstruction of a synthetic point", "[volumetric]")
{
    // Beams on a 2 degree lattice around boresight, amplitude falling off with the pointing error.
    std::vector<BeamDirection> dirs;
    for (double th = 86.0; th <= 94.0; th += 2.0)
        for (double ph = -4.0; ph <= 4.0; ph += 2.0)
            dirs.push_back({ph, th});
    auto make_set = [&](double r0, long spread)
    {
        auto set = synthetic_set(dirs, 600);
        const auto bin = std::size_t(std::lround(r0 / 0.01));
        for (std::size_t b = 0; b < set.size(); ++b)
        {
            const double off = std::hypot(dirs[b].phi, dirs[b].theta - 90.0);
            const double a = std::exp(-off * off / 8.0) / (r0 * r0);
            for (long d = -spread; d <= spread; ++d)
                set.profiles[b].samples[std::size_t(long(bin) + d)] = a * std::exp(-double(d * d) / 4.0);
        }
        return set;
    };
    ImagingParams p;
    p.voxel_size = 0.02;
    p.delta = 0.1;
    p.sigma = 1.0;
    p.tau_db = -6.0;

    for (double r0 : {2.0, 4.0})
    {
        const auto set = make_set(r0, 3);
        const std::vector<BeamWindow> win(set.size(), {r0 - 0.5, r0 + 0.5});
        const auto rec = reconstruct(set, win, p);
        CHECK(rec.sample_count == set.size() * 101);
        CHECK(distance(rec.peak_sample.position, {r0, 0.0, 0.0}) < 1e-9);
        CHECK_THAT(rec.peak_sample.magnitude, WithinRel(1.0, 1e-9));
        CHECK(distance(rec.voxels.center(argmax(rec.voxels.filtered)), {r0, 0.0, 0.0}) < 0.03);
        const auto comps = connected_components(rec.voxels, rec.voxels.filtered);
        REQUIRE(comps.size() == 1);
        CHECK(distance(comps[0].centroid, {r0, 0.0, 0.0}) < 0.05);
    }

    // With every return in one range bin, compensation is a uniform scale and cannot move the maximum.
    for (double r0 : {2.0, 4.0})
    {
        const auto set = make_set(r0, 0);
        const std::vector<BeamWindow> win(set.size(), {r0 - 0.5, r0 + 0.5});
        auto q = p;
        const auto on = reconstruct(set, win, q);
        q.compensate = false;
        const auto off = reconstruct(set, win, q);
        CHECK(argmax(on.voxels.filtered) == argmax(off.voxels.filtered));
        CHECK(on.voxels.filtered.size() == off.voxels.filtered.size());
    }
}
