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

#ifndef NFBEAM_EXPERIMENTS_HPP
#define NFBEAM_EXPERIMENTS_HPP

#include "nfbeam/channel.hpp"
#include "nfbeam/codebook.hpp"
#include "nfbeam/random.hpp"
#include "nfbeam/training.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nfbeam
{
    // Raised when an experiment's inputs violate a stated precondition
    class PreconditionError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    struct UeSampler
    {
        enum class Kind
        {
            plane,      // fixed depth y_plane
            depth_range // depth uniform in [y_lo, y_hi)
        };

        Kind kind = Kind::depth_range;
        double y_plane = 10.0;
        double y_lo = 7.5;
        double y_hi = 45.0;
        double half_angle_rad = std::numbers::pi / 4.0;

        // Depth first, then x and z uniform over the serving-region footprint at that depth
        Point3 sample(Engine &eng) const;
        void validate() const;

        static UeSampler plane(double y, double half_angle_rad = std::numbers::pi / 4.0);
        static UeSampler depth_range(double lo, double hi, double half_angle_rad = std::numbers::pi / 4.0);
    };

    // (1 - k) * Fresnel + k * Rayleigh
    double interpolated_depth(const ArrayConfig &cfg, double k);

    struct ExperimentSpec
    {
        std::string scenario = "custom";
        int n_x = 64;
        int n_z = 64;
        double carrier_hz = 28e9;
        Method method = Method::two_phase;
        int M = 9;
        std::vector<int> k_set{1, 3, 5};
        std::vector<int> benchmark_k_set{1, 2, 3, 4, 5, 6};
        UeSampler ue;
        std::vector<double> ref_snr_db{35.0};
        std::size_t trials = 500;
        std::uint64_t seed = 1;
        double rician_db = 13.0;
        int nlos_paths = 8;
        double grid_spacing_m = 0.0;       // grid matching; 0 calibrates to grid_target
        std::size_t grid_target = 125020;
        unsigned workers = 0;

        ArrayConfig array() const { return {n_x, n_z, carrier_hz}; }
        void validate() const;
    };

    std::string spec_to_json(const ExperimentSpec &spec);

    struct ResultRow
    {
        std::string scenario;
        std::string metric;
        double value = 0.0;
        std::size_t n = 0;
        double dispersion = 0.0; // binomial standard error for rates, sample std dev for losses
    };

    struct ResultTable
    {
        std::vector<ResultRow> rows;
        std::uint64_t seed = 0;
        std::string spec_json;
        std::vector<std::pair<std::string, std::string>> notes;

        // Columns: scenario,metric,value,n,stderr
        void write_csv(std::ostream &os) const;
        std::string metadata_json() const;
        const ResultRow *find(std::string_view scenario, std::string_view metric) const;
    };

    std::uint64_t fnv1a64(std::string_view data);

    // Writes <path> and <path>.json (metadata sidecar)
    void write_result(const ResultTable &table, const std::filesystem::path &path);

    enum class RegionKind
    {
        frustum_rect,
        shell
    };

    // {(+-k D_x/2, -k_y D_x, +-k' D_z/2)} for k in kx, k' in kz, ordered by (x, z)
    std::vector<Point3> rect_focal_set(const ArrayConfig &cfg, const std::vector<int> &kx, const std::vector<int> &kz,
                                       double k_y);
    // {(+-k D_x/2, -k_y D_x, 0)} for k in kx, ordered by x
    std::vector<Point3> line_focal_set(const ArrayConfig &cfg, const std::vector<int> &kx, double k_y);

    struct AccuracyResult
    {
        double probability = 0.0;
        double standard_error = 0.0;
        std::size_t trials = 0;
        std::size_t correct = 0;
    };

    /// Probability that the strongest of the diverging codewords belongs to a region that
    /// contains the UE. LOS-only channel with |g_0| = 1 and sigma^2 = 1/gamma; the UE is uniform
    /// on the serving-region footprint at y_plane. Shell regions use the horizontal ULA.
    /// Throws PreconditionError when the regions do not cover the footprint.
    AccuracyResult identification_accuracy(const ArrayConfig &cfg, const std::vector<Point3> &focal_points,
                                           RegionKind kind, double y_plane, double gamma_db, std::size_t trials,
                                           std::uint64_t seed, unsigned workers = 0,
                                           double half_angle_rad = std::numbers::pi / 4.0);

    struct TrialRecord
    {
        double ref_snr_db = 0.0;
        std::size_t trial = 0;
        Point3 ue;
        double loss_db = 0.0;
        std::size_t pilots = 0;
    };

    struct SweepResult
    {
        ResultTable table;
        std::vector<TrialRecord> records; // ordered by (ref SNR, trial)
    };

    /// Per reference SNR: mean, median and P90 of the SNR loss, plus mean pilots.
    /// The same UE and channel geometry is reused across reference SNRs for a given trial.
    SweepResult snr_loss_sweep(const ExperimentSpec &spec);

    enum class BinAxis
    {
        depth,    // y of the UE [m]
        max_angle // max(|phi|, |theta|) [deg]
    };

    // Mean loss per (reference SNR, bin); edges ascending, bins are [e_i, e_{i+1})
    ResultTable bin_losses(const SweepResult &sweep, BinAxis axis, const std::vector<double> &edges);

    void write_trial_csv(std::ostream &os, const std::vector<TrialRecord> &records);

    struct Summary
    {
        double min = 0.0;
        double mean = 0.0;
        double max = 0.0;
        double stddev = 0.0;
        std::size_t n = 0;
    };

    Summary summarize(const std::vector<double> &values);

    struct OverheadStats
    {
        std::vector<std::string> phase_names;
        std::vector<Summary> per_phase;
        Summary total;
        int rf_chains = 1;
    };

    /// Pilot counts per phase over spec.trials training runs at the first reference SNR.
    OverheadStats overhead_stats(const ExperimentSpec &spec);
    ResultTable overhead_report(const ExperimentSpec &spec);

    // Trains one method on one oracle using the spec's parameters (grid is used by grid matching)
    TrainingOutcome run_method(const ArrayConfig &cfg, const ExperimentSpec &spec, const PilotOracle &oracle,
                               const std::vector<Point3> &grid = {});

    // Grid for grid matching, honoring spec.grid_spacing_m or calibrating to spec.grid_target
    std::vector<Point3> spec_matching_grid(const ExperimentSpec &spec, double *spacing_out = nullptr);

    struct HeatmapRequest
    {
        double y_plane = 1.0;
        double half_extent_x = 0.0; // 0 = serving-region footprint
        double half_extent_z = 0.0;
        std::size_t resolution = 256;
        std::optional<Point3> region_focal; // draws the region boundary for this focal point
        RegionKind region_kind = RegionKind::frustum_rect;
        unsigned workers = 0;
    };

    /// Writes the amplitude grid to `path` (first row: x coordinates, first column: z) and,
    /// when a region is requested, its boundary polyline to <stem>_boundary.csv.
    /// Returns the boundary path, or an empty path when none was written.
    std::filesystem::path heatmap_export(const ArrayConfig &cfg, const Codeword &w, const HeatmapRequest &req,
                                         const std::filesystem::path &path);
}

#endif
