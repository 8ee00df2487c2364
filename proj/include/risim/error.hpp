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

#ifndef RISIM_ERROR_HPP
#define RISIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace risim
{
    // Invalid or unparsable scenario configuration. Maps to CLI exit code 2.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Failure reported by an acquisition backend. Maps to CLI exit code 3.
    class BackendError : public std::runtime_error
    {
    public:
        BackendError(const std::string &what, std::size_t beam_index)
            : std::runtime_error(beam_index == std::size_t(-1) ? what : "beam " + std::to_string(beam_index) + ": " + what),
              beam_(beam_index) {}

        std::size_t beam_index() const { return beam_; }

    private:
        std::size_t beam_;
    };

    // Malformed binary or text artifact.
    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
