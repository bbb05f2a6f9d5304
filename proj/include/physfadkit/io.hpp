// SPDX-License-Identifier: Apache-2.0
//
// physfadkit: coupled-dipole channel simulation toolkit
// Copyright (C) 2026 The physfadkit authors
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

#ifndef PHYSFADKIT_IO_HPP
#define PHYSFADKIT_IO_HPP

#include "physfadkit/experiments.hpp"
#include "physfadkit/physics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace physfadkit
{
    inline constexpr const char *scene_schema = "physfadkit.scene/1";
    inline constexpr const char *sweep_spec_schema = "physfadkit.sweep_spec/1";
    inline constexpr const char *manifest_schema = "physfadkit.manifest/1";
    inline constexpr const char *library_version = "1.0.0";

    /// Scene documents hold constants, the four dipole groups and the RIS OFF detuning. Unknown
    /// keys are rejected so that typos do not silently fall back to defaults.
    std::string scene_to_json(const Scene &s);
    Scene scene_from_json(const std::string &text);
    Scene read_scene_file(const std::filesystem::path &p);
    void write_scene_file(const std::filesystem::path &p, const Scene &s);

    std::string sweep_spec_to_json(const SweepSpec &spec);
    SweepSpec sweep_spec_from_json(const std::string &text);
    SweepSpec read_sweep_spec_file(const std::filesystem::path &p);

    // Built-in campaigns: fig2a, fig2b, fig2c, fig4, absorption
    std::vector<std::string> preset_names();
    SweepSpec preset(const std::string &name);

    // 64-bit FNV-1a, printed as 16 hex digits in manifests
    std::uint64_t fnv1a64(const std::string &bytes) noexcept;
    std::string hex64(std::uint64_t v);

    std::string read_text_file(const std::filesystem::path &p);

    struct RunManifest
    {
        std::string command;
        std::string spec_hash;
        std::uint64_t seed = 0;
        std::string timestamp; // UTC, ISO 8601
        std::string version = library_version;
        std::vector<std::string> outputs;
        bool default_geometry = false; // enclosure polygon taken from the library defaults
    };

    std::string manifest_to_json(const RunManifest &m);
    std::string utc_timestamp();

} // namespace physfadkit

#endif
