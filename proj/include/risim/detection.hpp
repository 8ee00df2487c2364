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

#ifndef RISIM_DETECTION_HPP
#define RISIM_DETECTION_HPP

#include "risim/error.hpp"
#include "risim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace risim
{
    // Coarse (R, phi) report from the guiding FMCW radar.
    struct RadarDetection
    {
        double r = 0.0;          // [m]
        double phi = 0.0;        // [deg]
        double confidence = 1.0; // [0, 1]
    };

    struct DetectorNoise
    {
        double sigma_r = 0.0;   // [m]
        double sigma_phi = 0.0; // [deg]
    };

    inline constexpr double radar_azimuth_coverage = 60.0; // +/- [deg]
    inline constexpr double default_cluster_radius = 0.3;  // [m]

    // Single-linkage clusters of scatterers closer than `radius`, as index lists in ascending order
    // of each cluster's first member.
    inline std::vector<std::vector<std::size_t>> cluster_scatterers(const std::vector<Scatterer> &pts, double radius)
    {
        std::vector<std::size_t> parent(pts.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t i)
        {
            while (parent[i] != i)
                i = parent[i] = parent[parent[i]];
            return i;
        };
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (distance(pts[i].position, pts[j].position) <= radius)
                {
                    const auto a = find(i), b = find(j);
                    if (a != b)
                        parent[std::max(a, b)] = std::min(a, b);
                }

        std::vector<std::vector<std::size_t>> clusters;
        std::vector<std::size_t> slot(pts.size(), std::numeric_limits<std::size_t>::max());
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            const auto root = find(i);
            if (slot[root] == std::numeric_limits<std::size_t>::max())
            {
                slot[root] = clusters.size();
                clusters.emplace_back();
            }
            clusters[slot[root]].push_back(i);
        }
        return clusters;
    }

    // Stand-in for the FMCW radar: one detection per scatterer cluster at its centroid, with
    // Gaussian range/azimuth errors. Clusters outside the azimuth coverage are not reported.
    // Confidence is the cluster's total reflectivity relative to the strongest cluster.
    inline std::vector<RadarDetection> mock_fmcw_detect(const Scene &scene, DetectorNoise noise, std::uint64_t seed,
                                                        double cluster_radius = default_cluster_radius)
    {
        const auto clusters = cluster_scatterers(scene.scatterers, cluster_radius);
        std::vector<double> weight(clusters.size(), 0.0);
        std::vector<CartesianPoint> centroid(clusters.size());
        for (std::size_t c = 0; c < clusters.size(); ++c)
        {
            CartesianPoint sum;
            for (auto i : clusters[c])
            {
                sum = sum + scene.scatterers[i].position;
                weight[c] += scene.scatterers[i].reflectivity;
            }
            centroid[c] = (1.0 / double(clusters[c].size())) * sum;
        }
        const double max_weight = weight.empty() ? 0.0 : *std::max_element(weight.begin(), weight.end());

        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<RadarDetection> out;
        for (std::size_t c = 0; c < clusters.size(); ++c)
        {
            const auto s = cart_to_sph(centroid[c]);
            const double dr = gauss(rng) * noise.sigma_r;
            const double dphi = gauss(rng) * noise.sigma_phi;
            RadarDetection d;
            d.r = std::max(s.r + dr, std::numeric_limits<double>::min());
            d.phi = s.phi + dphi;
            if (std::abs(d.phi) > radar_azimuth_coverage)
                continue;
            d.confidence = max_weight > 0.0 ? weight[c] / max_weight : 0.0;
            out.push_back(d);
        }
        return out;
    }

    // Angular scan region around a detection. Spans are full widths.
    struct RoiSpec
    {
        double center_phi = 0.0;    // [deg]
        double center_theta = 90.0; // [deg]
        double span_phi = 0.0;      // [deg]
        double span_theta = 0.0;    // [deg]
        double step = 1.0;          // angular step [deg]
        double focus_r = 1.0;       // [m]
        double r_min = 0.0;         // [m] range window
        double r_max = 1.0;         // [m]

        void validate() const
        {
            if (!(step > 0.0))
                throw std::invalid_argument("RoiSpec: angular step must be positive");
            if (!(span_phi >= 0.0) || !(span_theta >= 0.0))
                throw std::invalid_argument("RoiSpec: spans must be nonnegative");
            if (!(r_min < r_max))
                throw std::invalid_argument("RoiSpec: empty range window");
            if (!(focus_r > 0.0))
                throw std::invalid_argument("RoiSpec: focus distance must be positive");
        }

        // floor(span / step) + 1; spans below one step collapse to a single line.
        std::size_t azimuth_steps() const { return steps(span_phi); }
        std::size_t elevation_steps() const { return steps(span_theta); }
        std::size_t beam_count() const { return azimuth_steps() * elevation_steps(); }

    private:
        std::size_t steps(double span) const { return std::size_t(std::floor(span / step + 1e-9)) + 1; }
    };

    struct RoiDefaults
    {
        double span_phi = 20.0;
        double span_theta = 20.0;
        double step = 1.0;
        double center_theta = 97.0;
        double range_pad = 0.5;
    };

    inline RoiSpec define_roi(const RadarDetection &d, double span_phi, double span_theta, double step,
                              double center_theta, double range_pad)
    {
        if (!(d.r > 0.0))
            throw std::invalid_argument("define_roi: detection range must be positive");
        RoiSpec roi;
        roi.center_phi = d.phi;
        roi.center_theta = center_theta;
        roi.span_phi = span_phi;
        roi.span_theta = span_theta;
        roi.step = step;
        roi.focus_r = d.r;
        roi.r_min = std::max(0.0, d.r - range_pad);
        roi.r_max = d.r + range_pad;
        roi.validate();
        return roi;
    }

    inline RoiSpec define_roi(const RadarDetection &d, const RoiDefaults &cfg)
    {
        return define_roi(d, cfg.span_phi, cfg.span_theta, cfg.step, cfg.center_theta, cfg.range_pad);
    }

    // Row-major beam directions, theta outer and phi inner, both ascending and symmetric about the center.
    inline std::vector<BeamDirection> roi_grid(const RoiSpec &roi)
    {
        roi.validate();
        const auto na = roi.azimuth_steps(), ne = roi.elevation_steps();
        std::vector<BeamDirection> grid;
        grid.reserve(na * ne);
        for (std::size_t j = 0; j < ne; ++j)
        {
            const double theta = roi.center_theta + (double(j) - 0.5 * double(ne - 1)) * roi.step;
            for (std::size_t i = 0; i < na; ++i)
                grid.push_back({roi.center_phi + (double(i) - 0.5 * double(na - 1)) * roi.step, theta});
        }
        return grid;
    }

    // Concatenation of the ROI grids in order; no deduplication.
    inline std::vector<BeamDirection> merge_roi_grids(const std::vector<RoiSpec> &rois)
    {
        std::vector<BeamDirection> out;
        for (const auto &r : rois)
        {
            const auto g = roi_grid(r);
            out.insert(out.end(), g.begin(), g.end());
        }
        return out;
    }

    // Text detections: one "R phi confidence" triple per line; '#' starts a comment.
    inline std::vector<RadarDetection> read_detections(std::istream &is)
    {
        std::vector<RadarDetection> out;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(is, line))
        {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            std::istringstream ss(line);
            RadarDetection d;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            std::string extra;
            if (!(ss >> d.r >> d.phi >> d.confidence) || (ss >> extra))
                throw FormatError("detections line " + std::to_string(line_no) + ": expected 'R phi confidence'");
            if (!(d.r > 0.0) || !(d.confidence >= 0.0 && d.confidence <= 1.0))
                throw FormatError("detections line " + std::to_string(line_no) + ": value out of range");
            out.push_back(d);
        }
        return out;
    }

    inline void write_detections(std::ostream &os, const std::vector<RadarDetection> &dets)
    {
        const auto old = os.precision(std::numeric_limits<double>::max_digits10);
        os << "# R_m phi_deg confidence\n";
        for (const auto &d : dets)
            os << d.r << ' ' << d.phi << ' ' << d.confidence << '\n';
        os.precision(old);
    }
}

#endif
