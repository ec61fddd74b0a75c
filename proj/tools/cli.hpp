// SPDX-License-Identifier: Apache-2.0
//
// nfbeam: near-field beam training simulation for uniform planar arrays
// Copyright (C) 2026 The nfbeam authors
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

#ifndef NFBEAM_TOOLS_CLI_HPP
#define NFBEAM_TOOLS_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nfbeam::cli
{
    // Config or flag problem the user can fix; maps to exit code 2
    class UsageError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Every setting is optional so that preset < config file < flags can be layered.
    // JSON keys match the member names.
    struct RunConfig
    {
        std::string subcommand;
        std::optional<std::string> preset;

        std::optional<int> nx;
        std::optional<int> nz;
        std::optional<double> f_ghz;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<unsigned> workers;

        std::optional<std::string> method;
        std::optional<std::vector<std::string>> methods;
        std::optional<int> M;
        std::optional<std::vector<int>> k_set;
        std::optional<std::vector<int>> benchmark_k_set;
        std::optional<double> rician_db;
        std::optional<int> paths;
        std::optional<std::vector<double>> ref_snr_db;
        std::optional<std::size_t> trials;
        std::optional<double> y_lo;
        std::optional<double> y_hi;
        std::optional<double> half_angle_deg;
        std::optional<double> grid_spacing_m;
        std::optional<std::size_t> grid_target;

        std::optional<std::vector<int>> kx;
        std::optional<std::vector<int>> kz;
        std::optional<double> ky;
        std::optional<std::vector<double>> k_yhat;
        std::optional<std::vector<double>> gamma_db;
        std::optional<std::string> region;

        std::optional<std::vector<double>> ue;
        std::optional<bool> trace;

        std::optional<std::string> codeword;
        std::optional<std::vector<double>> point;
        std::optional<double> y_plane;
        std::optional<std::size_t> resolution;

        std::optional<double> phi_deg;
        std::optional<double> theta_deg;
        std::optional<std::size_t> samples;

        std::optional<std::string> bin_by;
        std::optional<std::vector<double>> bin_edges;

        // Fields set in `over` replace ours
        void merge(const RunConfig &over);
    };

    std::string to_json(const RunConfig &cfg);

    /// Parses a JSON config. Unknown keys and type mismatches raise UsageError naming the key;
    /// malformed JSON reports line and column.
    RunConfig parse_config(std::string_view text, std::string_view origin = "<config>");
    RunConfig load_config(const std::string &path);

    std::optional<RunConfig> preset(std::string_view name);
    std::vector<std::string> preset_names();

    // Returns the process exit code: 0 success, 2 usage error, 1 runtime error
    int parse_and_dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
}

#endif
