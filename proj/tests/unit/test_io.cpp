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

#include "risim/io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

using namespace risim;
using Catch::Matchers::ContainsSubstring;

namespace
{
    MeasurementTensor random_tensor(SampleDomain domain, std::size_t beams, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        MeasurementTensor t;
        t.sweep = SweepConfig::from_band(26.5e9, 30.5e9, 12);
        t.domain = domain;
        t.fft_len = domain == SampleDomain::range ? 48 : 0;
        t.range_offset = 0.6000000000000001;
        t.dwell_time = 1.5e-3;
        for (std::size_t b = 0; b < beams; ++b)
            t.beams.push_back({{g(rng), 90.0 + g(rng)}, 3.0 + g(rng)});
        t.data = Matrix<cdouble>(beams, domain == SampleDomain::range ? 48 : 12);
        for (auto &v : t.data.data())
            v = {g(rng), g(rng)};
        return t;
    }

    std::string serialize(const MeasurementTensor &t)
    {
        std::ostringstream os(std::ios::binary);
        write_tensor(os, t);
        return os.str();
    }

    MeasurementTensor parse(const std::string &bytes)
    {
        std::istringstream is(bytes, std::ios::binary);
        return read_tensor(is);
    }

    bool bit_equal(const MeasurementTensor &a, const MeasurementTensor &b)
    {
        return a.data.size() == b.data.size() &&
               std::memcmp(a.data.data().data(), b.data.data().data(), a.data.size() * sizeof(cdouble)) == 0 &&
               a.beams == b.beams && a.sweep == b.sweep && a.domain == b.domain && a.fft_len == b.fft_len &&
               a.range_offset == b.range_offset && a.dwell_time == b.dwell_time;
    }
}

TEST_CASE("tensor container layout", "[io]")
{
    const auto t = random_tensor(SampleDomain::frequency, 3, 1);
    const auto bytes = serialize(t);
    CHECK(bytes.size() == 8 + 4 + 4 + 8 * 8 + 3 * 24 + 3 * 12 * 16);
    CHECK(bytes.substr(0, 8) == "RISIMBIN");
    CHECK(bytes.substr(8, 4) == std::string("\x01\x00\x00\x00", 4));
    CHECK(bytes.substr(12, 4) == std::string("\x00\x00\x00\x00", 4));
    CHECK(bytes.substr(16, 8) == std::string("\x0c\0\0\0\0\0\0\0", 8));
    CHECK(bytes.substr(24, 8) == std::string("\x03\0\0\0\0\0\0\0", 8));

    const auto r = random_tensor(SampleDomain::range, 2, 2);
    CHECK(serialize(r).substr(12, 4) == std::string("\x01\x00\x00\x00", 4));
}

TEST_CASE("tensor round trip is bit exact", "[io]")
{
    for (auto domain : {SampleDomain::frequency, SampleDomain::range})
        for (std::size_t beams : {0u, 1u, 7u})
        {
            auto t = random_tensor(domain, beams, 3 + beams);
            if (beams > 0)
            {
                t.data(0, 0) = {-0.0, std::numeric_limits<double>::denorm_min()};
                t.data(0, 1) = {std::numeric_limits<double>::max(), -std::numeric_limits<double>::infinity()};
            }
            const auto back = parse(serialize(t));
            CHECK(bit_equal(t, back));
            CHECK(serialize(back) == serialize(t));
        }
}

TEST_CASE("corrupt tensors are rejected", "[io]")
{
    const auto bytes = serialize(random_tensor(SampleDomain::frequency, 2, 4));
    for (std::size_t n = 0; n < bytes.size(); n += 7)
        CHECK_THROWS_AS(parse(bytes.substr(0, n)), FormatError);
    CHECK_THROWS_AS(parse(bytes.substr(0, bytes.size() - 1)), FormatError);

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH(parse(bad), ContainsSubstring("bad magic"));
    bad = bytes;
    bad[8] = 2;
    CHECK_THROWS_WITH(parse(bad), ContainsSubstring("unsupported version 2"));
    bad = bytes;
    bad[12] = 9;
    CHECK_THROWS_WITH(parse(bad), ContainsSubstring("unknown kind 9"));
    bad = bytes;
    bad[12] = 2;
    CHECK_THROWS_AS(parse(bad), FormatError);
    bad = bytes;
    bad[16 + 7] = char(0x40); // huge row length
    CHECK_THROWS_WITH(parse(bad), ContainsSubstring("implausible"));
    bad = bytes;
    bad[16] = 11; // row length no longer matches the sweep
    CHECK_THROWS_AS(parse(bad), FormatError);
}

TEST_CASE("tensor files", "[io]")
{
    const auto dir = std::filesystem::temp_directory_path() / "risim_unit_io";
    std::filesystem::create_directories(dir);
    const auto t = random_tensor(SampleDomain::range, 4, 9);
    write_tensor_file(dir / "t.bin", t);
    CHECK(bit_equal(read_tensor_file(dir / "t.bin"), t));
    CHECK_THROWS_AS(read_tensor_file(dir / "missing.bin"), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("voxel container round trip", "[io]")
{
    VoxelGrid g;
    g.origin = {1.25, -0.5, -1.0};
    g.voxel_size = 0.02;
    g.nx = 3;
    g.ny = 4;
    g.nz = 2;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.values.push_back(u(rng));

    for (bool with_filtered : {false, true})
    {
        if (with_filtered)
            g.filtered = threshold(g.values, -3.0);
        std::stringstream ss;
        write_voxels_binary(ss, g);
        const auto bytes = ss.str();
        CHECK(bytes.size() == 16 + 4 * 8 + 3 * 8 + 8 + g.size() * 8 * (with_filtered ? 2 : 1));
        const auto back = read_voxels_binary(ss);
        CHECK(back.origin == g.origin);
        CHECK(back.voxel_size == g.voxel_size);
        CHECK(back.nx == 3);
        CHECK(back.ny == 4);
        CHECK(back.nz == 2);
        CHECK(back.values == g.values);
        CHECK(back.filtered == g.filtered);

        std::istringstream cut(bytes.substr(0, bytes.size() - 3));
        CHECK_THROWS_AS(read_voxels_binary(cut), FormatError);
    }

    std::stringstream tensor_bytes;
    write_tensor(tensor_bytes, random_tensor(SampleDomain::frequency, 1, 1));
    CHECK_THROWS_AS(read_voxels_binary(tensor_bytes), FormatError);
    std::stringstream voxel_bytes;
    write_voxels_binary(voxel_bytes, g);
    CHECK_THROWS_WITH(read_tensor(voxel_bytes), ContainsSubstring("voxel grid"));

    auto zero = voxel_bytes.str();
    std::memset(zero.data() + 16 + 24, 0, 8);
    std::istringstream zs(zero);
    CHECK_THROWS_WITH(read_voxels_binary(zs), ContainsSubstring("voxel size"));
}

TEST_CASE("voxel text export", "[io]")
{
    VoxelGrid g;
    g.voxel_size = 0.5;
    g.nx = 2;
    g.ny = 2;
    g.nz = 1;
    g.values = {0.0, 2.0, 0.0, 0.25};
    std::ostringstream os;
    write_voxels_text(os, g, g.values, "raw");
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "# risim voxels raw");
    std::getline(is, line);
    CHECK(line == "origin 0 0 0");
    std::getline(is, line);
    CHECK(line == "voxel_size 0.5");
    std::getline(is, line);
    CHECK(line == "dims 2 2 1");
    std::getline(is, line);
    CHECK(line.front() == '#');
    double x, y, z, v;
    REQUIRE(is >> x >> y >> z >> v);
    CHECK(x == 0.75);
    CHECK(y == 0.25);
    CHECK(z == 0.25);
    CHECK(v == 2.0);
    REQUIRE(is >> x >> y >> z >> v);
    CHECK(x == 0.75);
    CHECK(y == 0.75);
    CHECK(v == 0.25);
    CHECK_FALSE(is >> x);

    CHECK_THROWS_AS(write_voxels_text(os, g, std::vector<double>(3), "bad"), std::invalid_argument);
}

TEST_CASE("intensity map text export", "[io]")
{
    IntensityMap2D m;
    m.phi_axis = {-1.0, 0.5};
    m.theta_axis = {95.0, 96.0, 97.0};
    m.values = Matrix<double>(3, 2);
    m.values(2, 1) = 0.125;
    m.r_min = 2.5;
    m.r_max = 3.5;
    std::ostringstream os;
    write_intensity_map(os, m);
    const auto text = os.str();
    CHECK_THAT(text, ContainsSubstring("# window 2.5 3.5\n"));
    CHECK_THAT(text, ContainsSubstring("theta\\phi -1 0.5\n95 0 0\n96 0 0\n97 0 0.125\n"));
}
