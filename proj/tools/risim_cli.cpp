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

#include "risim/backend.hpp"
#include "risim/io.hpp"
#include "risim/pipeline.hpp"
#include "risim/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace risim;

namespace
{
    struct Common
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::string out_dir = ".";
        std::string backend = "sim";
        std::size_t fft_len = 0;
        unsigned threads = 1;
        std::string input;
        std::string tensor;
        std::string detections;
        std::string resume;
        std::string codebook;
    };

    ScenarioConfig load(const Common &c)
    {
        if (c.config.empty())
            throw ConfigError("--config is required");
        auto cfg = load_scenario(c.config);
        if (c.seed)
            cfg.seed = *c.seed;
        return cfg;
    }

    fs::path out_dir(const Common &c)
    {
        fs::create_directories(c.out_dir);
        return c.out_dir;
    }

    std::vector<RadarDetection> load_detections(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw FormatError("cannot open " + path);
        return read_detections(is);
    }

    std::unique_ptr<AcquisitionBackend> make_backend(const Common &c, const ScenarioConfig &cfg)
    {
        if (c.backend == "sim")
            return std::make_unique<SimulatedBackend>(make_simulated_backend(cfg, c.threads));
        if (c.tensor.empty() || c.detections.empty())
            throw ConfigError("--backend replay needs --tensor and --detections");
        return std::make_unique<ReplayBackend>(read_tensor_file(c.tensor), load_detections(c.detections));
    }

    ScanPlan plan(const Common &c, const ScenarioConfig &cfg)
    {
        auto backend = make_backend(c, cfg);
        return plan_scan(cfg, backend->detect(), c.threads);
    }

    void write_plan(const fs::path &dir, const ScanPlan &p)
    {
        write_file(dir / detections_file, [&](std::ostream &os)
                   { write_detections(os, p.detections); });
        write_file(dir / codebook_file, [&](std::ostream &os)
                   { write_codebook(os, p.codebook); });
    }

    int cmd_codebook(const Common &c)
    {
        const auto cfg = load(c);
        const auto p = plan(c, cfg);
        write_plan(out_dir(c), p);
        std::cout << p.detections.size() << " detections, " << p.codebook.size() << " beams\n";
        return 0;
    }

    int cmd_simulate(const Common &c)
    {
        const auto cfg = load(c);
        auto backend = make_simulated_backend(cfg, c.threads);
        const auto p = plan_scan(cfg, backend.detect(), c.threads);
        const auto dir = out_dir(c);
        write_plan(dir, p);
        const auto t = acquire(backend, p.codebook, cfg.range_offset(), nullptr, dir / partial_tensor_file);
        write_tensor_file(dir / tensor_file, t);
        std::cout << t.beam_count() << " sweeps of " << t.row_length() << " points -> " << (dir / tensor_file).string()
                  << '\n';
        return 0;
    }

    int cmd_process(const Common &c)
    {
        if (c.input.empty())
            throw ConfigError("--input is required");
        const auto t = read_tensor_file(c.input);
        Window window = Window::hann;
        std::size_t fft_len = c.fft_len;
        if (!c.config.empty())
        {
            const auto cfg = load(c);
            window = cfg.processing.window;
            if (!fft_len)
                fft_len = cfg.processing.fft_len;
        }
        if (fft_len != 0 && fft_len < t.sweep.points())
            throw ConfigError("--fft-len must be at least the number of sweep points");
        const auto set = process_tensor(t, fft_len, window, c.threads);
        const auto dir = out_dir(c);
        write_tensor_file(dir / profiles_file, to_tensor(set));
        std::cout << set.size() << " range profiles of " << set.fft_len << " bins, spacing " << set.bin_spacing()
                  << " m\n";
        return 0;
    }

    int cmd_reconstruct(const Common &c)
    {
        if (c.input.empty())
            throw ConfigError("--input is required");
        const auto cfg = load(c);
        const auto set = from_tensor(read_tensor_file(c.input));
        const auto windows = windows_from_focus(set, cfg.roi.range_pad);
        const auto rec = reconstruct(set, windows, cfg.imaging, c.threads);
        const auto dir = out_dir(c);
        if (rec.sample_count > 0)
            write_reconstruction(dir, rec);
        ojson report;
        report["reconstruction"] = reconstruction_report(rec);
        report["config"] = config_to_json(cfg);
        write_json(dir / report_file, report);
        std::cout << rec.sample_count << " samples, grid " << rec.voxels.nx << 'x' << rec.voxels.ny << 'x'
                  << rec.voxels.nz << '\n';
        return 0;
    }

    int cmd_pipeline(const Common &c)
    {
        const auto cfg = load(c);
        auto backend = make_backend(c, cfg);
        PipelineOptions opts;
        opts.out_dir = out_dir(c);
        opts.threads = c.threads;
        opts.fft_len = c.fft_len;
        if (!c.resume.empty())
            opts.resume_tensor = c.resume;
        const auto res = run_pipeline(cfg, *backend, opts);
        const auto sig = significant_components(res.components, significant_component_fraction);
        std::cout << res.plan.codebook.size() << " beams, " << sig.size() << " components\n";
        for (const auto &comp : sig)
            std::cout << "  centroid " << comp.centroid.x << ' ' << comp.centroid.y << ' ' << comp.centroid.z << '\n';
        return 0;
    }

    int cmd_beam_report(const Common &c)
    {
        const auto cfg = load(c);
        Codebook cb;
        if (!c.codebook.empty())
        {
            std::ifstream is(c.codebook);
            if (!is)
                throw FormatError("cannot open " + c.codebook);
            cb = read_codebook(is);
            const auto array = cfg.array();
            if (cb.rows != array.rows() || cb.cols != array.cols())
                throw ConfigError("codebook does not match the configured RIS");
            for (auto &e : cb.entries)
                e.profile.continuous = optimal_phase(array, cfg.tx, e.profile.focus_point, cfg.wavelength());
        }
        else
            cb = plan(c, cfg).codebook;
        const auto table = beam_report(cb, cfg.array(), cfg.tx, cfg.wavelength());
        write_file(out_dir(c) / "beam_report.txt", [&](std::ostream &os)
                   { write_beam_report(os, table); });
        double sum = 0.0;
        for (const auto &g : table)
            sum += g.ratio;
        std::cout << table.size() << " beams";
        if (!table.empty())
            std::cout << ", mean 1-bit/continuous focus ratio " << sum / double(table.size());
        std::cout << '\n';
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"risim: RIS-aided mmWave radar imaging simulator and reconstruction toolkit"};
    app.require_subcommand(1);
    Common c;

    const auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", c.config, "Scenario file or bundled scenario name");
        sub->add_option("--seed", c.seed, "Override the scenario seed");
        sub->add_option("--out-dir", c.out_dir, "Output directory");
        sub->add_option("--threads", c.threads, "Worker threads (0: all cores)");
    };
    const auto add_backend = [&](CLI::App *sub)
    {
        sub->add_option("--backend", c.backend, "Acquisition backend")->check(CLI::IsMember({"sim", "replay"}));
        sub->add_option("--tensor", c.tensor, "Recorded frequency tensor for the replay backend");
        sub->add_option("--detections", c.detections, "Recorded detections for the replay backend");
    };

    auto *codebook = app.add_subcommand("codebook", "Detect targets and export the RIS codebook");
    add_common(codebook);
    add_backend(codebook);
    auto *simulate = app.add_subcommand("simulate", "Simulate the beam scan into a frequency tensor");
    add_common(simulate);
    auto *process = app.add_subcommand("process", "Turn a frequency tensor into range profiles");
    add_common(process);
    process->add_option("--input", c.input, "Frequency tensor")->required();
    process->add_option("--fft-len", c.fft_len, "IFFT length (default 4K)");
    auto *reconstruct = app.add_subcommand("reconstruct", "Build the 2D map and voxel grids from range profiles");
    add_common(reconstruct);
    reconstruct->add_option("--input", c.input, "Range-profile tensor")->required();
    auto *pipeline = app.add_subcommand("pipeline", "Run detection through reconstruction end to end");
    add_common(pipeline);
    add_backend(pipeline);
    pipeline->add_option("--fft-len", c.fft_len, "IFFT length (default 4K)");
    pipeline->add_option("--resume", c.resume, "Partial tensor from an interrupted run");
    auto *report = app.add_subcommand("beam-report", "Continuous vs 1-bit focus gain per codebook entry");
    add_common(report);
    add_backend(report);
    report->add_option("--codebook", c.codebook, "Codebook file (default: plan from the scenario)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if (*codebook)
            return cmd_codebook(c);
        if (*simulate)
            return cmd_simulate(c);
        if (*process)
            return cmd_process(c);
        if (*reconstruct)
            return cmd_reconstruct(c);
        if (*pipeline)
            return cmd_pipeline(c);
        if (*report)
            return cmd_beam_report(c);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const BackendError &e)
    {
        std::cerr << "backend error: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
