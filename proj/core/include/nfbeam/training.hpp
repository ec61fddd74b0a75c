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

#ifndef NFBEAM_TRAINING_HPP
#define NFBEAM_TRAINING_HPP

#include "nfbeam/channel.hpp"
#include "nfbeam/codebook.hpp"
#include "nfbeam/wavefield.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nfbeam
{
    // Transmits one pilot and returns the UE's observation. Trainers see nothing else.
    using PilotOracle = std::function<PilotObservation(const Codeword &)>;

    /// Oracle over a fixed channel. The channel vector is computed once; noise draw t comes
    /// from NoiseStream(seed, key, sigma^2) so identical codeword sequences give identical traces.
    PilotOracle oracle_from_channel(const ArrayConfig &cfg, const MultipathChannel &ch, std::uint64_t seed,
                                    std::uint64_t key = 0);

    struct TraceEntry
    {
        std::string codeword_id;
        double power = 0.0;
    };

    enum class Method
    {
        two_phase,
        three_phase,
        upa_partitioning,
        hier_dft,
        dft_sweep,
        grid_matching
    };

    const char *to_string(Method method);
    std::optional<Method> parse_method(std::string_view name);

    // RF chains needed by each method for an n_x x n_z array
    int rf_chains(Method method, const ArrayConfig &cfg);

    struct TrainingOutcome
    {
        Method method = Method::two_phase;
        Codeword chosen;
        std::optional<DirectionTriplet> focus_point;
        std::vector<std::string> phase_names;
        std::vector<std::size_t> pilots_per_phase;
        std::optional<FrustumIndex> frustum;
        std::optional<std::pair<ShellIndex, ShellIndex>> shells;
        std::optional<std::pair<int, int>> grid_direction; // estimated (g_x, g_z) for DFT benchmarks
        std::vector<TraceEntry> trace;

        std::size_t total_pilots() const;
    };

    /// Hierarchical frustum localization (4 pilots per level) followed by focusing refinement
    /// over the ring-range plan of the identified level-M frustum. A frustum outside the
    /// tangent grid falls back to a square window at its nearest grid point.
    TrainingOutcome two_phase_train(const ArrayConfig &cfg, const PilotOracle &oracle, int M,
                                    const std::vector<int> &k_set);

    /// Horizontal then vertical ULA shell localization (2 pilots per level each) followed by
    /// focusing refinement over the rod cross-sections. When the two shells do not intersect,
    /// a square window around their centre slopes is swept instead.
    TrainingOutcome three_phase_train(const ArrayConfig &cfg, const PilotOracle &oracle, int M,
                                      const std::vector<int> &k_set,
                                      double half_angle_rad = std::numbers::pi / 4.0);

    struct BenchmarkParams
    {
        int M = 9;
        std::vector<int> k_set{1, 2, 3, 4, 5, 6};
        // grid-matching only
        std::vector<Point3> grid;
    };

    TrainingOutcome benchmark_train(const ArrayConfig &cfg, const PilotOracle &oracle, Method method,
                                    const BenchmarkParams &params);

    /// Focusing grid for grid matching: points (i s, j s, l s), j >= 1, inside the serving
    /// region (given half angle) and the exact near-field region.
    std::vector<Point3> matching_grid(const ArrayConfig &cfg, double spacing_m,
                                      double half_angle_rad = std::numbers::pi / 4.0);
    std::size_t matching_grid_size(const ArrayConfig &cfg, double spacing_m,
                                   double half_angle_rad = std::numbers::pi / 4.0);

    struct GridCalibration
    {
        double spacing_m = 0.0;
        std::size_t count = 0;
    };

    // Spacing whose grid size is nearest to target_count (bisection on the spacing)
    GridCalibration calibrate_grid_spacing(const ArrayConfig &cfg, std::size_t target_count,
                                           double half_angle_rad = std::numbers::pi / 4.0);

    // Direction cosines (u_x, u_z) to the nearest refinement-grid point at level M
    std::pair<int, int> grid_direction_from_cosines(int M, double u_x, double u_z);

    std::string outcome_to_json(const TrainingOutcome &outcome, bool include_trace = true);
}

#endif
