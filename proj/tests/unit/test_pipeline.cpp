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

#include "risim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace risim;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace
{
    namespace fs = std::filesystem;

    // Small, fast scene: 8x8 RIS, 128-point sweep, 3x3 beams per detection.
    ScenarioConfig small_config()
    {
        auto c = parse_scenario(R"(
name: small
seed: 3
sweep: {f_start: 26.5e9, f_stop: 30.5e9, points: 128}
ris: {rows: 8, cols: 8}
roi: {step: 4, span_phi: 8, span_theta: 8, center_theta: 92, range_pad: 0.4}
imaging: {voxel_size: 0.05, delta: 0.15, sigma: 1, tau_db: -10}
targets:
  - {shape: point, anchor: [2.5, 0.3, -0.2]}
  - {shape: sphere, anchor: [2.0, -1.2, -0.1], radius: 0.1, spacing: 0.08}
)");
        return c;
    }

    class FaultyBackend : public SimulatedBackend
    {
    public:
        FaultyBackend(const ScenarioConfig &c, std::size_t fail_at)
            : SimulatedBackend(make_simulated_backend(c)), fail_at_(fail_at) {}

    protected:
        std::vector<cdouble> do_sweep(std::size_t beam_index) override
        {
            if (beam_index == fail_at_)
                throw BackendError("link lost", beam_index);
            return SimulatedBackend::do_sweep(beam_index);
        }

    private:
        std::size_t fail_at_;
    };

    class ShortBackend : public SimulatedBackend
    {
    public:
        using SimulatedBackend::SimulatedBackend;

    protected:
        std::vector<cdouble> do_sweep(std::size_t) override { return std::vector<cdouble>(3); }
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    fs::path fresh_dir(const std::string &name)
    {
        const auto d = fs::temp_directory_path() / ("risim_unit_pipeline_" + name);
        fs::remove_all(d);
        return d;
    }
}

TEST_CASE("scan plan follows the detections", "[pipeline]")
{
    const auto c = small_config();
    const std::vector<RadarDetection> dets{{2.5, 6.8, 1.0}, {2.3, -31.0, 0.5}};
    const auto plan = plan_scan(c, dets);
    REQUIRE(plan.rois.size() == 2);
    CHECK(plan.codebook.size() == 18);
    CHECK(plan.codebook.rows == 8);
    for (std::size_t b = 0; b < plan.codebook.size(); ++b)
    {
        const auto &e = plan.codebook.entries[b];
        CHECK(e.beam_index == b);
        CHECK(e.focus_r == (b < 9 ? 2.5 : 2.3));
    }
    CHECK_THAT(plan.codebook.entries[4].direction.phi, WithinAbs(6.8, 1e-12));
    CHECK_THAT(plan.codebook.entries[4].direction.theta, WithinAbs(92.0, 1e-12));
    CHECK(plan_scan(c, {}).codebook.empty());
}

TEST_CASE("backend call ordering", "[pipeline]")
{
    const auto c = small_config();
    auto backend = make_simulated_backend(c);
    const auto res = run_pipeline(c, backend);
    const auto &log = backend.call_log();
    const auto beams = res.plan.codebook.size();
    REQUIRE(log.size() == 1 + 2 * beams);
    CHECK(log[0].call == BackendCall::detect);
    for (std::size_t b = 0; b < beams; ++b)
    {
        CHECK(log[1 + 2 * b] == BackendEvent{BackendCall::set_pattern, b});
        CHECK(log[2 + 2 * b] == BackendEvent{BackendCall::sweep, b});
    }
}

TEST_CASE("sweep requires its pattern", "[pipeline]")
{
    const auto c = small_config();
    auto backend = make_simulated_backend(c);
    CHECK_THROWS_AS(backend.sweep(0), BackendError);
    PhaseGrid p(8, 8);
    backend.set_pattern(1, p);
    CHECK_THROWS_WITH(backend.sweep(0), ContainsSubstring("beam 0: sim: sweep requested before its pattern was set"));
    CHECK(backend.sweep(1).size() == 128);
    CHECK_THROWS_AS(backend.sweep(1), BackendError);
    CHECK_THROWS_AS(backend.set_pattern(2, PhaseGrid(3, 3)), BackendError);

    ShortBackend bad(c.scene(), c.array(), c.sweep, c.sim, c.seed);
    bad.set_pattern(0, p);
    CHECK_THROWS_WITH(bad.sweep(0), ContainsSubstring("returned 3 points, expected 128"));
}

TEST_CASE("on-demand sweeps equal the prepared cache", "[pipeline]")
{
    const auto c = small_config();
    const auto plan = plan_scan(c, {{2.5, 6.8, 1.0}});
    auto cached = make_simulated_backend(c);
    cached.prepare(plan.codebook);
    auto direct = make_simulated_backend(c);
    for (std::size_t b = 0; b < plan.codebook.size(); ++b)
    {
        cached.set_pattern(b, plan.codebook.entries[b].profile.quantized);
        direct.set_pattern(b, plan.codebook.entries[b].profile.quantized);
        CHECK(cached.sweep(b) == direct.sweep(b));
    }
    // A pattern other than the prepared one is simulated, not served from the cache.
    cached.set_pattern(0, plan.codebook.entries[1].profile.quantized);
    CHECK(cached.sweep(0) == simulate_s21(c.scene(), c.array(), plan.codebook.entries[1].profile.quantized, c.sweep,
                                          c.sim, c.seed, 0));
}

TEST_CASE("failed acquisition flushes a partial tensor that resumes to the same result", "[pipeline]")
{
    const auto c = small_config();
    const auto dir = fresh_dir("resume");
    PipelineOptions opts;
    opts.out_dir = dir;

    FaultyBackend faulty(c, 5);
    CHECK_THROWS_WITH(run_pipeline(c, faulty, opts), ContainsSubstring("beam 5: link lost"));
    REQUIRE(fs::exists(dir / partial_tensor_file));
    CHECK_FALSE(fs::exists(dir / tensor_file));
    const auto partial = read_tensor_file(dir / partial_tensor_file);
    CHECK(partial.beam_count() == 5);

    auto backend = make_simulated_backend(c);
    opts.resume_tensor = dir / partial_tensor_file;
    const auto resumed = run_pipeline(c, backend, opts);
    CHECK_FALSE(fs::exists(dir / partial_tensor_file));
    // Only the missing beams were acquired.
    CHECK(backend.call_log().size() == 1 + 2 * (resumed.plan.codebook.size() - 5));
    CHECK(backend.call_log()[1] == BackendEvent{BackendCall::set_pattern, 5});

    auto fresh = make_simulated_backend(c);
    const auto full = run_pipeline(c, fresh);
    CHECK(resumed.tensor == full.tensor);
    CHECK(resumed.report.dump() == full.report.dump());

    // A recording from another plan is rejected.
    auto other = c;
    other.roi.step = 2.0;
    auto b2 = make_simulated_backend(other);
    opts.out_dir = fresh_dir("resume_other");
    CHECK_THROWS_AS(run_pipeline(other, b2, opts), FormatError);
    fs::remove_all(dir);
    fs::remove_all(opts.out_dir);
}

TEST_CASE("replay reproduces the simulated run", "[pipeline]")
{
    const auto c = small_config();
    const auto d1 = fresh_dir("sim"), d2 = fresh_dir("replay");
    auto sim = make_simulated_backend(c);
    PipelineOptions o1;
    o1.out_dir = d1;
    const auto first = run_pipeline(c, sim, o1);

    ReplayBackend replay(read_tensor_file(d1 / tensor_file), first.plan.detections);
    PipelineOptions o2;
    o2.out_dir = d2;
    o2.threads = 2;
    const auto second = run_pipeline(c, replay, o2);
    CHECK(second.tensor == first.tensor);
    for (const char *f : {detections_file, codebook_file, tensor_file, profiles_file, map_file, voxels_file,
                          voxels_raw_file, voxels_filtered_file, report_file})
    {
        INFO(f);
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }
    CHECK_THAT(slurp(d2 / timing_file), ContainsSubstring("\"backend\": \"replay\""));

    // The replayed recording must match the plan beam for beam.
    auto shifted = c;
    shifted.roi.center_theta = 95.0;
    ReplayBackend mismatch(read_tensor_file(d1 / tensor_file), first.plan.detections);
    CHECK_THROWS_WITH(run_pipeline(shifted, mismatch), ContainsSubstring("does not match the recording"));

    auto range = to_tensor(first.profiles);
    CHECK_THROWS_AS(ReplayBackend(range, {}), BackendError);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("pipeline results are deterministic", "[pipeline]")
{
    const auto c = small_config();
    auto b1 = make_simulated_backend(c, 1);
    auto b2 = make_simulated_backend(c, 3);
    PipelineOptions o;
    const auto r1 = run_pipeline(c, b1, o);
    o.threads = 3;
    const auto r2 = run_pipeline(c, b2, o);
    CHECK(r1.tensor == r2.tensor);
    CHECK(r1.reconstruction.voxels.filtered == r2.reconstruction.voxels.filtered);
    CHECK(r1.report.dump() == r2.report.dump());

    const auto &rec = r1.report["reconstruction"];
    CHECK(rec["sample_count"].get<std::size_t>() > 0);
    CHECK(rec["components"].size() == rec["component_count"].get<std::size_t>());
    CHECK(r1.report["beam_count"].get<std::size_t>() == r1.plan.codebook.size());
    CHECK(r1.report["config"]["name"] == "small");
    CHECK_FALSE(r1.report.contains("backend"));
}

TEST_CASE("pipeline error paths", "[pipeline]")
{
    auto c = small_config();
    c.targets.clear();
    auto empty = make_simulated_backend(c);
    CHECK_THROWS_WITH(run_pipeline(c, empty), ContainsSubstring("no targets detected"));

    auto c2 = small_config();
    auto backend = make_simulated_backend(c2);
    c2.sweep = SweepConfig::from_band(26.5e9, 30.5e9, 32);
    CHECK_THROWS_AS(run_pipeline(c2, backend), ConfigError);

    // 64 tones over 4 GHz alias beyond about 1.8 m from the RIS.
    auto c3 = small_config();
    c3.sweep = SweepConfig::from_band(26.5e9, 30.5e9, 64);
    auto short_sweep = make_simulated_backend(c3);
    CHECK_THROWS_WITH(run_pipeline(c3, short_sweep), ContainsSubstring("exceeds the unambiguous range"));
}

TEST_CASE("beam gain report", "[pipeline]")
{
    const CartesianPoint feed{0.6, 0.0, 0.0};
    const std::vector<BeamDirection> grid{{0.0, 90.0}, {10.0, 95.0}, {-20.0, 100.0}};

    const auto one = build_ris_array(1, 1, 0.005, 28.5e9);
    const auto cb1 = build_codebook(one, feed, grid, 3.0, one.design_wavelength());
    for (const auto &g : beam_report(cb1, one, feed, one.design_wavelength()))
    {
        CHECK_THAT(g.continuous, WithinAbs(1.0, 1e-12));
        CHECK_THAT(g.ratio, WithinAbs(1.0, 1e-12));
    }
    CHECK(beam_report(Codebook{}, one, feed, one.design_wavelength()).empty());

    const auto big = build_ris_array(40, 40, 0.005, 28.5e9);
    const auto cb = build_codebook(big, feed, grid, 3.0, big.design_wavelength());
    const auto table = beam_report(cb, big, feed, big.design_wavelength());
    REQUIRE(table.size() == 3);
    double mean = 0.0;
    for (const auto &g : table)
    {
        CHECK_THAT(g.continuous, WithinAbs(1600.0, 1e-6));
        CHECK(g.ratio > 0.5);
        CHECK(g.ratio <= 1.0);
        mean += g.ratio / 3.0;
    }
    CHECK_THAT(mean, WithinAbs(2.0 / std::numbers::pi, 0.05));

    std::ostringstream os;
    write_beam_report(os, table);
    const auto text = os.str();
    CHECK(text.rfind("# beam phi_deg", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
