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

#ifndef RISIM_SCENARIO_HPP
#define RISIM_SCENARIO_HPP

#include "risim/detection.hpp"
#include "risim/error.hpp"
#include "risim/forward_sim.hpp"
#include "risim/geometry.hpp"
#include "risim/sfcw.hpp"
#include "risim/shapes.hpp"
#include "risim/sweep.hpp"
#include "risim/volumetric.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef RISIM_CONFIG_DIR
#define RISIM_CONFIG_DIR ""
#endif

namespace risim
{
    struct RisConfig
    {
        std::size_t rows = 40;
        std::size_t cols = 40;
        double pitch = 0.005;             // [m]
        double design_frequency = 28.5e9; // [Hz]
        CartesianPoint center;
    };

    struct DetectorConfig
    {
        DetectorNoise noise;
        double cluster_radius = default_cluster_radius;
        std::vector<RadarDetection> detections; // when non-empty, used instead of the mock detector
    };

    struct ProcessingConfig
    {
        std::size_t fft_len = 0; // 0: 4K
        Window window = Window::hann;
        std::optional<double> range_offset; // default: distance from the feed to the RIS center
    };

    struct ScenarioConfig
    {
        std::string name;
        std::uint64_t seed = 1;
        SweepConfig sweep = default_sweep();
        RisConfig ris;
        CartesianPoint tx{0.6, 0.0, 0.0};
        CartesianPoint rx{0.6, 0.0, 0.0};
        std::vector<TargetSpec> targets;
        double ground_z = default_ground_z;
        DetectorConfig detector;
        RoiDefaults roi;
        ImagingParams imaging;
        SimOptions sim;
        ProcessingConfig processing;

        RisArray array() const { return RisArray(ris.rows, ris.cols, ris.pitch, ris.design_frequency, ris.center); }
        double wavelength() const { return speed_of_light / ris.design_frequency; }
        double range_offset() const
        {
            return processing.range_offset ? *processing.range_offset : distance(tx, ris.center);
        }
        std::size_t fft_len() const { return processing.fft_len ? processing.fft_len : default_fft_len(sweep); }

        // Target clouds, one per target, seeded with seed + target index + 1.
        std::vector<std::vector<Scatterer>> target_clouds() const
        {
            std::vector<std::vector<Scatterer>> out;
            for (std::size_t i = 0; i < targets.size(); ++i)
                out.push_back(sample_target(targets[i], seed + i + 1, ground_z));
            return out;
        }

        Scene scene() const
        {
            Scene s;
            s.tx_position = tx;
            s.rx_position = rx;
            for (const auto &c : target_clouds())
                s.scatterers.insert(s.scatterers.end(), c.begin(), c.end());
            return s;
        }

        void validate() const;
    };

    namespace detail
    {
        inline std::string where(const YAML::Node &n)
        {
            const auto m = n.Mark();
            if (m.is_null())
                return "";
            return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ": ";
        }

        class ConfigReader
        {
        public:
            explicit ConfigReader(std::string source) : source_(std::move(source)) {}

            [[noreturn]] void fail(const YAML::Node &n, const std::string &field, const std::string &msg) const
            {
                throw ConfigError(source_ + ": " + where(n) + field + ": " + msg);
            }

            void require_map(const YAML::Node &n, const std::string &field) const
            {
                if (!n.IsMap())
                    fail(n, field, "expected a mapping");
            }

            void allow_keys(const YAML::Node &n, const std::string &section,
                            std::initializer_list<const char *> keys) const
            {
                require_map(n, section.empty() ? "<root>" : section);
                for (const auto &kv : n)
                {
                    const auto key = kv.first.as<std::string>();
                    bool ok = false;
                    for (const char *k : keys)
                        ok = ok || key == k;
                    if (!ok)
                        fail(kv.first, section.empty() ? key : section + "." + key, "unknown key");
                }
            }

            template <typename T>
            T scalar(const YAML::Node &n, const std::string &field) const
            {
                if (!n.IsScalar())
                    fail(n, field, "expected a scalar");
                try
                {
                    return n.as<T>();
                }
                catch (const YAML::BadConversion &)
                {
                    fail(n, field, "invalid value '" + n.Scalar() + "'");
                }
            }

            template <typename T>
            void get(const YAML::Node &parent, const char *key, const std::string &section, T &out) const
            {
                if (const auto n = parent[key])
                    out = scalar<T>(n, section.empty() ? std::string(key) : section + "." + key);
            }

            CartesianPoint point(const YAML::Node &n, const std::string &field) const
            {
                if (!n.IsSequence() || n.size() != 3)
                    fail(n, field, "expected [x, y, z]");
                return {scalar<double>(n[0], field), scalar<double>(n[1], field), scalar<double>(n[2], field)};
            }

            void get_point(const YAML::Node &parent, const char *key, const std::string &section,
                           CartesianPoint &out) const
            {
                if (const auto n = parent[key])
                    out = point(n, section.empty() ? std::string(key) : section + "." + key);
            }

            const std::string &source() const { return source_; }

        private:
            std::string source_;
        };

        inline void check(bool ok, const std::string &field, const std::string &msg)
        {
            if (!ok)
                throw ConfigError(field + ": " + msg);
        }

        inline ShapeKind parse_shape(const ConfigReader &r, const YAML::Node &n, const std::string &field)
        {
            const auto s = r.scalar<std::string>(n, field);
            if (s == "point")
                return ShapeKind::point;
            if (s == "box")
                return ShapeKind::box;
            if (s == "sphere")
                return ShapeKind::sphere;
            if (s == "humanoid")
                return ShapeKind::humanoid;
            r.fail(n, field, "unknown shape '" + s + "' (point, box, sphere, humanoid)");
        }
    }

    inline void ScenarioConfig::validate() const
    {
        using detail::check;
        check(ris.rows > 0 && ris.cols > 0, "ris", "rows and cols must be positive");
        check(ris.pitch > 0.0, "ris.pitch", "must be positive");
        check(ris.design_frequency > 0.0, "ris.design_frequency", "must be positive");
        check(ris.center.x == 0.0, "ris.center", "the RIS lies in the plane x = 0");
        check(tx.is_finite() && tx.x > 0.0, "antennas.tx", "must lie in front of the RIS (x > 0)");
        check(rx.is_finite() && rx.x > 0.0, "antennas.rx", "must lie in front of the RIS (x > 0)");
        for (std::size_t i = 0; i < targets.size(); ++i)
        {
            const auto &t = targets[i];
            const auto f = "targets[" + std::to_string(i) + "]";
            check(t.anchor.is_finite() && t.anchor.x > 0.0, f + ".anchor", "must lie in front of the RIS (x > 0)");
            check(t.spacing > 0.0, f + ".spacing", "must be positive");
            check(t.reflectivity > 0.0, f + ".reflectivity", "must be positive");
            check(t.radius > 0.0, f + ".radius", "must be positive");
            check(t.height > 0.0 && t.width > 0.0, f, "height and width must be positive");
            check(t.size.x > 0.0 && t.size.y > 0.0 && t.size.z > 0.0, f + ".size", "must be positive");
        }
        check(detector.noise.sigma_r >= 0.0, "detector.sigma_r", "must be nonnegative");
        check(detector.noise.sigma_phi >= 0.0, "detector.sigma_phi", "must be nonnegative");
        check(detector.cluster_radius > 0.0, "detector.cluster_radius", "must be positive");
        for (const auto &d : detector.detections)
            check(d.r > 0.0, "detector.detections", "ranges must be positive");
        check(roi.step > 0.0, "roi.step", "must be positive");
        check(roi.span_phi >= 0.0, "roi.span_phi", "must be nonnegative");
        check(roi.span_theta >= 0.0, "roi.span_theta", "must be nonnegative");
        check(roi.center_theta >= 0.0 && roi.center_theta <= 180.0, "roi.center_theta", "must lie in [0, 180]");
        check(roi.range_pad > 0.0, "roi.range_pad", "must be positive");
        check(imaging.voxel_size > 0.0, "imaging.voxel_size", "must be positive");
        check(imaging.delta > 0.0, "imaging.delta", "must be positive");
        check(imaging.sigma > 0.0, "imaging.sigma", "must be positive");
        check(imaging.tau_db <= 0.0, "imaging.tau_db", "must be at most 0 dB");
        check(imaging.pad_voxels >= 0.0, "imaging.pad_voxels", "must be nonnegative");
        check(sim.noise_std >= 0.0, "sim.noise_std", "must be nonnegative");
        check(sim.leakage_range >= 0.0, "sim.leakage.range", "must be nonnegative");
        check(processing.fft_len == 0 || processing.fft_len >= sweep.points(), "processing.fft_len",
              "must be at least the number of sweep points");
        check(!processing.range_offset || *processing.range_offset >= 0.0, "processing.range_offset",
              "must be nonnegative");
    }

    inline ScenarioConfig parse_scenario(const std::string &text, const std::string &source = "<config>")
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(text);
        }
        catch (const YAML::Exception &e)
        {
            throw ConfigError(source + ": line " + std::to_string(e.mark.line + 1) + ", column " +
                              std::to_string(e.mark.column + 1) + ": " + e.msg);
        }

        ScenarioConfig c;
        if (root.IsNull())
            return c;
        const detail::ConfigReader r(source);
        r.allow_keys(root, "", {"name", "seed", "sweep", "ris", "antennas", "targets", "ground_z", "detector", "roi",
                                "imaging", "sim", "processing"});
        r.get(root, "name", "", c.name);
        r.get(root, "seed", "", c.seed);
        r.get(root, "ground_z", "", c.ground_z);

        if (const auto s = root["sweep"])
        {
            r.allow_keys(s, "sweep", {"f_start", "f_stop", "f_step", "points"});
            double f_start = c.sweep.f_start(), f_stop = 0.0, f_step = 0.0;
            std::size_t points = c.sweep.points();
            r.get(s, "f_start", "sweep", f_start);
            r.get(s, "points", "sweep", points);
            r.get(s, "f_stop", "sweep", f_stop);
            r.get(s, "f_step", "sweep", f_step);
            if (s["f_stop"] && s["f_step"])
                r.fail(s, "sweep", "give either f_stop or f_step, not both");
            try
            {
                if (s["f_step"])
                    c.sweep = SweepConfig(f_start, f_step, points);
                else
                    c.sweep = SweepConfig::from_band(f_start, s["f_stop"] ? f_stop : c.sweep.f_stop(), points);
            }
            catch (const std::invalid_argument &e)
            {
                r.fail(s, "sweep", e.what());
            }
        }

        if (const auto s = root["ris"])
        {
            r.allow_keys(s, "ris", {"rows", "cols", "pitch", "design_frequency", "center"});
            r.get(s, "rows", "ris", c.ris.rows);
            r.get(s, "cols", "ris", c.ris.cols);
            r.get(s, "pitch", "ris", c.ris.pitch);
            r.get(s, "design_frequency", "ris", c.ris.design_frequency);
            r.get_point(s, "center", "ris", c.ris.center);
        }

        if (const auto s = root["antennas"])
        {
            r.allow_keys(s, "antennas", {"tx", "rx"});
            r.get_point(s, "tx", "antennas", c.tx);
            r.get_point(s, "rx", "antennas", c.rx);
        }

        if (const auto s = root["targets"])
        {
            if (!s.IsSequence())
                r.fail(s, "targets", "expected a list");
            for (std::size_t i = 0; i < s.size(); ++i)
            {
                const auto t = s[i];
                const auto f = "targets[" + std::to_string(i) + "]";
                r.allow_keys(t, f, {"name", "shape", "anchor", "size", "radius", "height", "width", "spacing",
                                    "reflectivity"});
                TargetSpec spec;
                if (!t["shape"])
                    r.fail(t, f + ".shape", "missing");
                if (!t["anchor"])
                    r.fail(t, f + ".anchor", "missing");
                spec.shape = detail::parse_shape(r, t["shape"], f + ".shape");
                r.get(t, "name", f, spec.name);
                r.get_point(t, "anchor", f, spec.anchor);
                r.get_point(t, "size", f, spec.size);
                r.get(t, "radius", f, spec.radius);
                r.get(t, "height", f, spec.height);
                r.get(t, "width", f, spec.width);
                r.get(t, "spacing", f, spec.spacing);
                r.get(t, "reflectivity", f, spec.reflectivity);
                c.targets.push_back(spec);
            }
        }

        if (const auto s = root["detector"])
        {
            r.allow_keys(s, "detector", {"sigma_r", "sigma_phi", "cluster_radius", "detections"});
            r.get(s, "sigma_r", "detector", c.detector.noise.sigma_r);
            r.get(s, "sigma_phi", "detector", c.detector.noise.sigma_phi);
            r.get(s, "cluster_radius", "detector", c.detector.cluster_radius);
            if (const auto d = s["detections"])
            {
                if (!d.IsSequence())
                    r.fail(d, "detector.detections", "expected a list");
                for (std::size_t i = 0; i < d.size(); ++i)
                {
                    const auto f = "detector.detections[" + std::to_string(i) + "]";
                    r.allow_keys(d[i], f, {"r", "phi", "confidence"});
                    RadarDetection det;
                    if (!d[i]["r"] || !d[i]["phi"])
                        r.fail(d[i], f, "r and phi are required");
                    r.get(d[i], "r", f, det.r);
                    r.get(d[i], "phi", f, det.phi);
                    r.get(d[i], "confidence", f, det.confidence);
                    c.detector.detections.push_back(det);
                }
            }
        }

        if (const auto s = root["roi"])
        {
            r.allow_keys(s, "roi", {"step", "span_phi", "span_theta", "center_theta", "range_pad"});
            r.get(s, "step", "roi", c.roi.step);
            r.get(s, "span_phi", "roi", c.roi.span_phi);
            r.get(s, "span_theta", "roi", c.roi.span_theta);
            r.get(s, "center_theta", "roi", c.roi.center_theta);
            r.get(s, "range_pad", "roi", c.roi.range_pad);
        }

        if (const auto s = root["imaging"])
        {
            r.allow_keys(s, "imaging",
                         {"voxel_size", "delta", "sigma", "sigma_units", "tau_db", "compensate", "extent",
                          "pad_voxels"});
            r.get(s, "voxel_size", "imaging", c.imaging.voxel_size);
            r.get(s, "delta", "imaging", c.imaging.delta);
            r.get(s, "sigma", "imaging", c.imaging.sigma);
            r.get(s, "tau_db", "imaging", c.imaging.tau_db);
            r.get(s, "compensate", "imaging", c.imaging.compensate);
            r.get(s, "pad_voxels", "imaging", c.imaging.pad_voxels);
            if (const auto u = s["sigma_units"])
            {
                const auto v = r.scalar<std::string>(u, "imaging.sigma_units");
                if (v != "voxels" && v != "meters")
                    r.fail(u, "imaging.sigma_units", "expected voxels or meters");
                c.imaging.sigma_in_voxels = v == "voxels";
            }
            if (const auto e = s["extent"])
            {
                const auto v = r.scalar<std::string>(e, "imaging.extent");
                if (v == "bounding_box")
                    c.imaging.extent = GridExtent::bounding_box;
                else if (v == "hemisphere")
                    c.imaging.extent = GridExtent::hemisphere;
                else
                    r.fail(e, "imaging.extent", "expected bounding_box or hemisphere");
            }
        }

        if (const auto s = root["sim"])
        {
            r.allow_keys(s, "sim", {"spreading_loss", "noise_std", "leakage"});
            r.get(s, "spreading_loss", "sim", c.sim.include_spreading_loss);
            r.get(s, "noise_std", "sim", c.sim.noise_std);
            if (const auto l = s["leakage"])
            {
                r.allow_keys(l, "sim.leakage", {"enabled", "amplitude", "range"});
                r.get(l, "enabled", "sim.leakage", c.sim.include_direct_leakage);
                r.get(l, "amplitude", "sim.leakage", c.sim.leakage_amplitude);
                r.get(l, "range", "sim.leakage", c.sim.leakage_range);
            }
        }

        if (const auto s = root["processing"])
        {
            r.allow_keys(s, "processing", {"fft_len", "window", "range_offset"});
            r.get(s, "fft_len", "processing", c.processing.fft_len);
            if (const auto o = s["range_offset"])
                c.processing.range_offset = r.scalar<double>(o, "processing.range_offset");
            if (const auto w = s["window"])
            {
                const auto v = r.scalar<std::string>(w, "processing.window");
                if (v == "hann")
                    c.processing.window = Window::hann;
                else if (v == "rectangular")
                    c.processing.window = Window::rectangular;
                else
                    r.fail(w, "processing.window", "expected hann or rectangular");
            }
        }

        try
        {
            c.validate();
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(source + ": " + e.what());
        }
        return c;
    }

    // A path to an existing file, or the stem of a bundled config ("scenario1", "measurement_setup").
    inline std::filesystem::path resolve_config(const std::string &name)
    {
        namespace fs = std::filesystem;
        if (fs::is_regular_file(name))
            return name;
        std::vector<fs::path> dirs;
        if (const char *env = std::getenv("RISIM_CONFIG_DIR"))
            dirs.emplace_back(env);
        if (const std::string builtin = RISIM_CONFIG_DIR; !builtin.empty())
            dirs.emplace_back(builtin);
        for (const auto &d : dirs)
            for (const char *ext : {"", ".yaml"})
                if (const auto p = d / (name + ext); fs::is_regular_file(p))
                    return p;
        throw ConfigError(name + ": no such config file or bundled scenario");
    }

    inline ScenarioConfig load_scenario(const std::string &name_or_path)
    {
        const auto path = resolve_config(name_or_path);
        std::ifstream is(path);
        if (!is)
            throw ConfigError(path.string() + ": cannot open");
        std::stringstream ss;
        ss << is.rdbuf();
        return parse_scenario(ss.str(), path.string());
    }
}

#endif
