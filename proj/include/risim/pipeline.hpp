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

#ifndef RISIM_PIPELINE_HPP
#define RISIM_PIPELINE_HPP

#include "risim/backend.hpp"
#include "risim/codebook.hpp"
#include "risim/detection.hpp"
#include "risim/io.hpp"
#include "risim/scenario.hpp"
#include "risim/sfcw.hpp"
#include "risim/volumetric.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace risim
{
    using ojson = nlohmann::ordered_json;

    inline const char *const detections_file = "detections.txt";
    inline const char *const codebook_file = "codebook.txt";
    inline const char *const tensor_file = "tensor.bin";
    inline const char *const partial_tensor_file = "tensor.partial.bin";
    inline const char *const profiles_file = "profiles.bin";
    inline const char *const map_file = "map2d.txt";
    inline const char *const voxels_file = "voxels.bin";
    inline const char *const voxels_raw_file = "voxels_raw.txt";
    inline const char *const voxels_filtered_file = "voxels_filtered.txt";
    inline const char *const report_file = "report.json";
    inline const char *const timing_file = "timing.json";

    inline constexpr double significant_component_fraction = 0.01;

    // ---------------------------------------------------------------- scan planning

    struct ScanPlan
    {
        std::vector<RadarDetection> detections;
        std::vector<RoiSpec> rois;
        Codebook codebook; // ROI grids back to back, focused at each detection range
    };

    inline ScanPlan plan_scan(const ScenarioConfig &cfg, std::vector<RadarDetection> detections, unsigned threads = 1)
    {
        ScanPlan plan;
        plan.detections = std::move(detections);
        const auto array = cfg.array();
        plan.codebook.rows = array.rows();
        plan.codebook.cols = array.cols();
        for (const auto &d : plan.detections)
        {
            const auto roi = define_roi(d, cfg.roi);
            const auto grid = roi_grid(roi);
            plan.codebook.append(build_codebook(array, cfg.tx, grid, d.r, cfg.wavelength(), threads));
            plan.rois.push_back(roi);
        }
        return plan;
    }

    // ---------------------------------------------------------------- acquisition

    namespace detail
    {
        inline void check_resume(const MeasurementTensor &partial, const Codebook &cb, const SweepConfig &sweep)
        {
            if (partial.domain != SampleDomain::frequency)
                throw FormatError("resume: tensor must hold frequency-domain sweeps");
            if (!(partial.sweep == sweep))
                throw FormatError("resume: sweep plan differs from the recording");
            if (partial.beam_count() > cb.size())
                throw FormatError("resume: recording holds more beams than the codebook");
            for (std::size_t b = 0; b < partial.beam_count(); ++b)
                if (!(partial.beams[b] == BeamInfo{cb.entries[b].direction, cb.entries[b].focus_r}))
                    throw FormatError("resume: beam " + std::to_string(b) + " differs from the codebook");
        }

        inline MeasurementTensor leading_rows(const MeasurementTensor &t, std::size_t n)
        {
            MeasurementTensor p;
            p.sweep = t.sweep;
            p.domain = t.domain;
            p.range_offset = t.range_offset;
            p.beams.assign(t.beams.begin(), t.beams.begin() + std::ptrdiff_t(n));
            std::vector<cdouble> rows(t.data.data().begin(), t.data.data().begin() + std::ptrdiff_t(n * t.data.cols()));
            p.data = Matrix<cdouble>(n, t.data.cols(), std::move(rows));
            return p;
        }
    }

    // Beam loop: set_pattern(i) then sweep(i) for every codebook entry. Rows already present in
    // `resume` are reused. On a backend failure the completed rows are flushed to `partial_path`
    // (when given) before the error propagates.
    inline MeasurementTensor acquire(AcquisitionBackend &backend, const Codebook &cb, double range_offset,
                                     const MeasurementTensor *resume = nullptr,
                                     const std::filesystem::path &partial_path = {})
    {
        MeasurementTensor t;
        t.sweep = backend.sweep_config();
        t.domain = SampleDomain::frequency;
        t.range_offset = range_offset;
        for (const auto &e : cb.entries)
            t.beams.push_back({e.direction, e.focus_r});
        const auto K = t.sweep.points();
        t.data = Matrix<cdouble>(cb.size(), K);

        std::size_t start = 0;
        if (resume)
        {
            detail::check_resume(*resume, cb, t.sweep);
            start = resume->beam_count();
            for (std::size_t b = 0; b < start; ++b)
                std::copy(resume->data.row(b).begin(), resume->data.row(b).end(), t.data.row(b).begin());
        }

        std::size_t b = start;
        try
        {
            backend.prepare(cb);
            for (; b < cb.size(); ++b)
            {
                backend.set_pattern(b, cb.entries[b].profile.quantized);
                const auto row = backend.sweep(b);
                std::copy(row.begin(), row.end(), t.data.row(b).begin());
            }
        }
        catch (const BackendError &)
        {
            if (!partial_path.empty())
                write_tensor_file(partial_path, detail::leading_rows(t, b));
            throw;
        }
        catch (const std::exception &e)
        {
            if (!partial_path.empty())
                write_tensor_file(partial_path, detail::leading_rows(t, b));
            throw BackendError(e.what(), b);
        }
        return t;
    }

    // ---------------------------------------------------------------- beam report

    struct BeamGain
    {
        std::size_t beam_index = 0;
        BeamDirection direction;
        double focus_r = 0.0;
        double continuous = 0.0; // |AF| at the focus with continuous phases
        double quantized = 0.0;  // |AF| at the focus with 1-bit phases
        double ratio = 0.0;      // quantized / continuous
    };

    inline std::vector<BeamGain> beam_report(const Codebook &cb, const RisArray &array, CartesianPoint tx,
                                             double wavelength)
    {
        std::vector<BeamGain> out;
        for (const auto &e : cb.entries)
        {
            BeamGain g;
            g.beam_index = e.beam_index;
            g.direction = e.direction;
            g.focus_r = e.focus_r;
            const auto focus = e.profile.focus_point;
            g.continuous = std::abs(array_factor(e.profile.continuous, array, tx, focus, wavelength));
            g.quantized = std::abs(array_factor(e.profile.quantized, array, tx, focus, wavelength));
            g.ratio = g.continuous > 0.0 ? g.quantized / g.continuous : 0.0;
            out.push_back(g);
        }
        return out;
    }

    inline void write_beam_report(std::ostream &os, const std::vector<BeamGain> &table)
    {
        const auto old = os.precision(std::numeric_limits<double>::max_digits10);
        os << "# beam phi_deg theta_deg focus_r_m af_continuous af_1bit ratio\n";
        for (const auto &g : table)
            os << g.beam_index << ' ' << g.direction.phi << ' ' << g.direction.theta << ' ' << g.focus_r << ' '
               << g.continuous << ' ' << g.quantized << ' ' << g.ratio << '\n';
        os.precision(old);
    }

    // ---------------------------------------------------------------- report

    inline ojson to_json(CartesianPoint p) { return ojson::array({p.x, p.y, p.z}); }

    inline ojson config_to_json(const ScenarioConfig &c)
    {
        ojson j;
        j["name"] = c.name;
        j["seed"] = c.seed;
        j["sweep"] = {{"f_start", c.sweep.f_start()},
                      {"f_step", c.sweep.f_step()},
                      {"points", c.sweep.points()},
                      {"range_resolution", c.sweep.range_resolution()},
                      {"max_observable_range", c.sweep.max_observable_range()},
                      {"unambiguous_range", c.sweep.unambiguous_range()}};
        j["ris"] = {{"rows", c.ris.rows},
                    {"cols", c.ris.cols},
                    {"pitch", c.ris.pitch},
                    {"design_frequency", c.ris.design_frequency},
                    {"center", to_json(c.ris.center)}};
        j["antennas"] = {{"tx", to_json(c.tx)}, {"rx", to_json(c.rx)}};
        static const char *const shapes[] = {"point", "box", "sphere", "humanoid"};
        j["targets"] = ojson::array();
        for (const auto &t : c.targets)
            j["targets"].push_back({{"name", t.name},
                                    {"shape", shapes[int(t.shape)]},
                                    {"anchor", to_json(t.anchor)},
                                    {"size", to_json(t.size)},
                                    {"radius", t.radius},
                                    {"height", t.height},
                                    {"width", t.width},
                                    {"spacing", t.spacing},
                                    {"reflectivity", t.reflectivity}});
        j["ground_z"] = c.ground_z;
        j["detector"] = {{"sigma_r", c.detector.noise.sigma_r},
                         {"sigma_phi", c.detector.noise.sigma_phi},
                         {"cluster_radius", c.detector.cluster_radius},
                         {"fixed_detections", c.detector.detections.size()}};
        j["roi"] = {{"step", c.roi.step},
                    {"span_phi", c.roi.span_phi},
                    {"span_theta", c.roi.span_theta},
                    {"center_theta", c.roi.center_theta},
                    {"range_pad", c.roi.range_pad}};
        j["imaging"] = {{"voxel_size", c.imaging.voxel_size},
                        {"delta", c.imaging.delta},
                        {"sigma", c.imaging.sigma},
                        {"sigma_units", c.imaging.sigma_in_voxels ? "voxels" : "meters"},
                        {"tau_db", c.imaging.tau_db},
                        {"compensate", c.imaging.compensate},
                        {"extent", c.imaging.extent == GridExtent::hemisphere ? "hemisphere" : "bounding_box"},
                        {"pad_voxels", c.imaging.pad_voxels}};
        j["sim"] = {{"spreading_loss", c.sim.include_spreading_loss},
                    {"noise_std", c.sim.noise_std},
                    {"leakage", {{"enabled", c.sim.include_direct_leakage},
                                 {"amplitude", c.sim.leakage_amplitude},
                                 {"range", c.sim.leakage_range}}}};
        j["processing"] = {{"fft_len", c.fft_len()},
                           {"window", c.processing.window == Window::hann ? "hann" : "rectangular"},
                           {"range_offset", c.range_offset()}};
        return j;
    }

    inline ojson point_report(CartesianPoint p)
    {
        const auto s = cart_to_sph(p);
        return {{"xyz", to_json(p)}, {"r", s.r}, {"phi", s.phi}, {"theta", s.theta}};
    }

    inline ojson reconstruction_report(const Reconstruction &rec)
    {
        ojson j;
        j["sample_count"] = rec.sample_count;
        if (rec.sample_count == 0)
            return j;
        j["peak_sample"] = point_report(rec.peak_sample.position);
        j["peak_sample"]["magnitude"] = rec.peak_sample.magnitude;
        j["peak_sample"]["beam"] = rec.peak_sample.beam;

        const auto &m = rec.map.values;
        std::size_t best = 0;
        for (std::size_t i = 1; i < m.size(); ++i)
            if (m.data()[i] > m.data()[best])
                best = i;
        j["map_peak"] = {{"phi", rec.map.phi_axis[best % m.cols()]},
                         {"theta", rec.map.theta_axis[best / m.cols()]},
                         {"value", m.data()[best]},
                         {"r", rec.map.peak_range.data()[best]}};

        const auto &g = rec.voxels;
        j["grid"] = {{"origin", to_json(g.origin)},
                     {"voxel_size", g.voxel_size},
                     {"dims", ojson::array({g.nx, g.ny, g.nz})}};
        const auto peak = argmax(g.filtered);
        j["filtered_peak"] = point_report(g.center(peak));
        j["filtered_peak"]["value"] = g.filtered[peak];
        j["filtered_centroid"] = point_report(weighted_centroid(g, g.filtered));

        const auto comps = connected_components(g, g.filtered);
        double total = 0.0;
        for (const auto &c : comps)
            total += c.total;
        j["component_count"] = comps.size();
        j["significant_fraction"] = significant_component_fraction;
        j["components"] = ojson::array();
        for (const auto &c : comps)
        {
            auto cj = point_report(c.centroid);
            cj["voxels"] = c.voxel_count;
            cj["total"] = c.total;
            cj["fraction"] = c.total / total;
            cj["significant"] = c.total >= significant_component_fraction * total;
            cj["peak"] = c.peak;
            cj["peak_xyz"] = to_json(c.peak_position);
            j["components"].push_back(cj);
        }
        return j;
    }

    // ---------------------------------------------------------------- artifacts

    inline void write_reconstruction(const std::filesystem::path &dir, const Reconstruction &rec)
    {
        write_file(dir / map_file, [&](std::ostream &os)
                   { write_intensity_map(os, rec.map); });
        write_file(dir / voxels_file, [&](std::ostream &os)
                   { write_voxels_binary(os, rec.voxels); }, true);
        write_file(dir / voxels_raw_file, [&](std::ostream &os)
                   { write_voxels_text(os, rec.voxels, rec.voxels.values, "raw"); });
        write_file(dir / voxels_filtered_file, [&](std::ostream &os)
                   { write_voxels_text(os, rec.voxels, rec.voxels.filtered, "filtered"); });
    }

    inline void write_json(const std::filesystem::path &path, const ojson &j)
    {
        write_file(path, [&](std::ostream &os)
                   { os << j.dump(2) << '\n'; });
    }

    // ---------------------------------------------------------------- end to end

    struct PipelineOptions
    {
        std::filesystem::path out_dir;          // empty: keep results in memory only
        unsigned threads = 1;
        std::size_t fft_len = 0;                // 0: from the config
        std::optional<std::filesystem::path> resume_tensor;
    };

    struct StageTime
    {
        std::string stage;
        double seconds = 0.0;
    };

    struct PipelineResult
    {
        ScanPlan plan;
        MeasurementTensor tensor;
        RangeProfileSet profiles;
        Reconstruction reconstruction;
        std::vector<VoxelComponent> components;
        ojson report;
        std::vector<StageTime> timing;
    };

    // detect -> define ROI -> codebook -> per-beam acquisition -> range processing -> volumetric
    // reconstruction. Artifacts other than the timing file are deterministic for a given
    // config, seed and backend.
    inline PipelineResult run_pipeline(const ScenarioConfig &cfg, AcquisitionBackend &backend,
                                       const PipelineOptions &opts = {})
    {
        namespace fs = std::filesystem;
        const bool write = !opts.out_dir.empty();
        if (write)
            fs::create_directories(opts.out_dir);
        if (!(backend.sweep_config() == cfg.sweep))
            throw ConfigError("backend sweep plan differs from the configuration");

        PipelineResult res;
        auto clock = std::chrono::steady_clock::now();
        const auto lap = [&](const char *stage)
        {
            const auto now = std::chrono::steady_clock::now();
            res.timing.push_back({stage, std::chrono::duration<double>(now - clock).count()});
            clock = now;
        };

        auto detections = backend.detect();
        lap("detect");

        res.plan = plan_scan(cfg, std::move(detections), opts.threads);
        if (write)
        {
            write_file(opts.out_dir / detections_file, [&](std::ostream &os)
                       { write_detections(os, res.plan.detections); });
            write_file(opts.out_dir / codebook_file, [&](std::ostream &os)
                       { write_codebook(os, res.plan.codebook); });
        }
        lap("codebook");
        if (res.plan.codebook.empty())
            throw BackendError("no targets detected", AcquisitionBackend::no_beam);
        for (const auto &roi : res.plan.rois)
            if (roi.r_max + cfg.range_offset() > cfg.sweep.unambiguous_range())
                throw ConfigError("range window up to " + std::to_string(roi.r_max) +
                                  " m exceeds the unambiguous range of the sweep (" +
                                  std::to_string(cfg.sweep.unambiguous_range() - cfg.range_offset()) + " m)");

        std::optional<MeasurementTensor> resume;
        if (opts.resume_tensor)
            resume = read_tensor_file(*opts.resume_tensor);
        res.tensor = acquire(backend, res.plan.codebook, cfg.range_offset(), resume ? &*resume : nullptr,
                             write ? opts.out_dir / partial_tensor_file : fs::path{});
        if (write)
        {
            write_tensor_file(opts.out_dir / tensor_file, res.tensor);
            fs::remove(opts.out_dir / partial_tensor_file);
        }
        lap("acquire");

        const auto fft_len = opts.fft_len ? opts.fft_len : cfg.fft_len();
        res.profiles = process_tensor(res.tensor, fft_len, cfg.processing.window, opts.threads);
        if (write)
            write_tensor_file(opts.out_dir / profiles_file, to_tensor(res.profiles));
        lap("process");

        const auto windows = windows_from_focus(res.profiles, cfg.roi.range_pad);
        res.reconstruction = reconstruct(res.profiles, windows, cfg.imaging, opts.threads);
        if (res.reconstruction.sample_count > 0)
            res.components = connected_components(res.reconstruction.voxels, res.reconstruction.voxels.filtered);
        if (write && res.reconstruction.sample_count > 0)
            write_reconstruction(opts.out_dir, res.reconstruction);
        lap("reconstruct");

        auto &r = res.report;
        r["beam_count"] = res.plan.codebook.size();
        r["fft_len"] = fft_len;
        r["detections"] = ojson::array();
        for (const auto &d : res.plan.detections)
            r["detections"].push_back({{"r", d.r}, {"phi", d.phi}, {"confidence", d.confidence}});
        r["rois"] = ojson::array();
        for (const auto &roi : res.plan.rois)
            r["rois"].push_back({{"center_phi", roi.center_phi},
                                 {"center_theta", roi.center_theta},
                                 {"span_phi", roi.span_phi},
                                 {"span_theta", roi.span_theta},
                                 {"step", roi.step},
                                 {"focus_r", roi.focus_r},
                                 {"r_min", roi.r_min},
                                 {"r_max", roi.r_max},
                                 {"beams", roi.beam_count()}});
        r["reconstruction"] = reconstruction_report(res.reconstruction);
        r["timing_file"] = timing_file;
        r["config"] = config_to_json(cfg);
        if (write)
            write_json(opts.out_dir / report_file, r);
        lap("report");

        if (write)
        {
            ojson t = ojson::object();
            double total = 0.0;
            for (const auto &s : res.timing)
            {
                t[s.stage] = s.seconds;
                total += s.seconds;
            }
            t["total"] = total;
            t["threads"] = opts.threads;
            t["backend"] = backend.name();
            write_json(opts.out_dir / timing_file, t);
        }
        return res;
    }

    inline SimulatedBackend make_simulated_backend(const ScenarioConfig &cfg, unsigned threads = 1)
    {
        auto sim = cfg.sim;
        sim.threads = threads;
        return SimulatedBackend(cfg.scene(), cfg.array(), cfg.sweep, sim, cfg.seed, cfg.detector.noise,
                                cfg.detector.cluster_radius, cfg.detector.detections);
    }
}

#endif
