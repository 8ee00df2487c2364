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

#ifndef RISIM_BACKEND_HPP
#define RISIM_BACKEND_HPP

#include "risim/codebook.hpp"
#include "risim/detection.hpp"
#include "risim/error.hpp"
#include "risim/forward_sim.hpp"
#include "risim/geometry.hpp"
#include "risim/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace risim
{
    struct BackendCapabilities
    {
        bool detect = false;
        bool set_pattern = false;
        bool sweep = false;
    };

    enum class BackendCall
    {
        detect,
        set_pattern,
        sweep,
    };

    struct BackendEvent
    {
        BackendCall call;
        std::size_t beam_index = 0;

        friend bool operator==(const BackendEvent &, const BackendEvent &) = default;
    };

    // Synchronous acquisition device. Per beam: set_pattern(i, pattern) then sweep(i).
    // The public entry points enforce that ordering and keep a call log; implementations
    // override the do_* hooks.
    class AcquisitionBackend
    {
    public:
        virtual ~AcquisitionBackend() = default;

        virtual std::string name() const = 0;
        virtual BackendCapabilities capabilities() const = 0;
        virtual const SweepConfig &sweep_config() const = 0;

        // Called once with the full codebook before the beam loop.
        virtual void prepare(const Codebook &) {}

        std::vector<RadarDetection> detect()
        {
            if (!capabilities().detect)
                throw BackendError(name() + ": detection not supported", no_beam);
            log_.push_back({BackendCall::detect, 0});
            return do_detect();
        }

        void set_pattern(std::size_t beam_index, const PhaseGrid &pattern)
        {
            log_.push_back({BackendCall::set_pattern, beam_index});
            do_set_pattern(beam_index, pattern);
            armed_ = beam_index;
        }

        std::vector<cdouble> sweep(std::size_t beam_index)
        {
            if (armed_ != beam_index)
                throw BackendError(name() + ": sweep requested before its pattern was set", beam_index);
            log_.push_back({BackendCall::sweep, beam_index});
            armed_.reset();
            auto row = do_sweep(beam_index);
            if (row.size() != sweep_config().points())
                throw BackendError(name() + ": sweep returned " + std::to_string(row.size()) + " points, expected " +
                                       std::to_string(sweep_config().points()),
                                   beam_index);
            return row;
        }

        const std::vector<BackendEvent> &call_log() const { return log_; }

        static constexpr std::size_t no_beam = std::size_t(-1);

    protected:
        virtual std::vector<RadarDetection> do_detect() = 0;
        virtual void do_set_pattern(std::size_t beam_index, const PhaseGrid &pattern) = 0;
        virtual std::vector<cdouble> do_sweep(std::size_t beam_index) = 0;

    private:
        std::vector<BackendEvent> log_;
        std::optional<std::size_t> armed_;
    };

    // Physics simulator. prepare() evaluates every codebook beam up front on a worker pool;
    // a sweep whose pattern matches the prepared entry returns the cached row, anything else
    // is simulated on demand. Both paths give identical samples.
    class SimulatedBackend : public AcquisitionBackend
    {
    public:
        SimulatedBackend(Scene scene, RisArray array, SweepConfig sweep, SimOptions opts, std::uint64_t seed,
                         DetectorNoise detector_noise = {}, double cluster_radius = default_cluster_radius,
                         std::vector<RadarDetection> fixed_detections = {})
            : scene_(std::move(scene)), array_(std::move(array)), sweep_(sweep), opts_(opts), seed_(seed),
              noise_(detector_noise), cluster_radius_(cluster_radius), fixed_(std::move(fixed_detections))
        {
            scene_.validate();
        }

        std::string name() const override { return "sim"; }
        BackendCapabilities capabilities() const override { return {true, true, true}; }
        const SweepConfig &sweep_config() const override { return sweep_; }

        void prepare(const Codebook &cb) override
        {
            cache_ = {};
            cached_patterns_.clear();
            if (cb.empty())
                return;
            auto t = simulate_tensor(scene_, array_, cb, sweep_, opts_, seed_);
            cache_ = std::move(t.data);
            for (const auto &e : cb.entries)
                cached_patterns_.push_back(e.profile.quantized);
        }

        const Scene &scene() const { return scene_; }

    protected:
        std::vector<RadarDetection> do_detect() override
        {
            if (!fixed_.empty())
                return fixed_;
            return mock_fmcw_detect(scene_, noise_, seed_, cluster_radius_);
        }

        void do_set_pattern(std::size_t beam_index, const PhaseGrid &pattern) override
        {
            if (pattern.rows() != array_.rows() || pattern.cols() != array_.cols())
                throw BackendError("sim: pattern does not match the RIS", beam_index);
            pattern_ = pattern;
        }

        std::vector<cdouble> do_sweep(std::size_t beam_index) override
        {
            if (beam_index < cached_patterns_.size() && cached_patterns_[beam_index] == pattern_)
            {
                const auto r = cache_.row(beam_index);
                return {r.begin(), r.end()};
            }
            return simulate_s21(scene_, array_, pattern_, sweep_, opts_, seed_, beam_index);
        }

    private:
        Scene scene_;
        RisArray array_;
        SweepConfig sweep_;
        SimOptions opts_;
        std::uint64_t seed_;
        DetectorNoise noise_;
        double cluster_radius_;
        std::vector<RadarDetection> fixed_;
        PhaseGrid pattern_;
        Matrix<cdouble> cache_;
        std::vector<PhaseGrid> cached_patterns_;
    };

    // Plays back a previously recorded frequency-domain tensor row by row.
    class ReplayBackend : public AcquisitionBackend
    {
    public:
        ReplayBackend(MeasurementTensor tensor, std::vector<RadarDetection> detections)
            : tensor_(std::move(tensor)), detections_(std::move(detections))
        {
            tensor_.validate();
            if (tensor_.domain != SampleDomain::frequency)
                throw BackendError("replay: tensor must hold frequency-domain sweeps", no_beam);
        }

        std::string name() const override { return "replay"; }
        BackendCapabilities capabilities() const override { return {true, true, true}; }
        const SweepConfig &sweep_config() const override { return tensor_.sweep; }
        const MeasurementTensor &tensor() const { return tensor_; }

        void prepare(const Codebook &cb) override
        {
            if (cb.size() > tensor_.beam_count())
                throw BackendError("replay: codebook has " + std::to_string(cb.size()) + " beams, recording has " +
                                       std::to_string(tensor_.beam_count()),
                                   tensor_.beam_count());
            for (std::size_t b = 0; b < cb.size(); ++b)
                if (!(tensor_.beams[b] == BeamInfo{cb.entries[b].direction, cb.entries[b].focus_r}))
                    throw BackendError("replay: codebook beam does not match the recording", b);
        }

    protected:
        std::vector<RadarDetection> do_detect() override { return detections_; }

        void do_set_pattern(std::size_t beam_index, const PhaseGrid &) override
        {
            if (beam_index >= tensor_.beam_count())
                throw BackendError("replay: no recorded sweep for this beam", beam_index);
        }

        std::vector<cdouble> do_sweep(std::size_t beam_index) override
        {
            const auto r = tensor_.data.row(beam_index);
            return {r.begin(), r.end()};
        }

    private:
        MeasurementTensor tensor_;
        std::vector<RadarDetection> detections_;
    };
}

#endif
