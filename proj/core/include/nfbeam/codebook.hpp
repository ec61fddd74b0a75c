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

#ifndef NFBEAM_CODEBOOK_HPP
#define NFBEAM_CODEBOOK_HPP

#include "nfbeam/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace nfbeam
{
    // Level-m frustum, indices in 1..2^m
    struct FrustumIndex
    {
        int m = 1;
        int x = 1;
        int z = 1;

        bool valid() const;
        bool operator==(const FrustumIndex &) const = default;
    };

    // Level-m conical shell of the central horizontal or vertical ULA
    struct ShellIndex
    {
        int m = 1;
        int idx = 1;
        Axis axis = Axis::horizontal;

        bool valid() const;
        bool operator==(const ShellIndex &) const = default;
    };

    Point3 virtual_focal_point(const ArrayConfig &cfg, const FrustumIndex &fi);
    Point3 axis_focal_point(const ArrayConfig &cfg, const ShellIndex &si);

    // Children at level m+1, ordered lexicographically by (x, z)
    std::array<FrustumIndex, 4> child_indices(const FrustumIndex &fi);

    // Bright region of c(v) for an arbitrary v (v.y < 0), evaluated on the plane y = p.y.
    // Lower bounds inclusive, upper bounds exclusive.
    bool rect_region_contains(const ArrayConfig &cfg, const Point3 &v, const Point3 &p);

    // Bright region of the axis-restricted codeword of v. Horizontal uses the radial
    // distance from the x-axis, vertical the one from the z-axis.
    bool shell_region_contains(const ArrayConfig &cfg, const Point3 &v, Axis axis, const Point3 &p);

    bool frustum_contains(const ArrayConfig &cfg, const FrustumIndex &fi, const Point3 &p);
    bool shell_contains(const ArrayConfig &cfg, const ShellIndex &si, const Point3 &p);

    /// The level-m frustum whose core cell holds p. Neighbouring regions overlap by a strip
    /// of width D_x (D_z); core cells split the strip down the middle so that every point
    /// with p.y > 0 has exactly one owner. The owner always contains p.
    FrustumIndex frustum_locate(const ArrayConfig &cfg, int m, const Point3 &p);
    bool frustum_core_contains(const ArrayConfig &cfg, const FrustumIndex &fi, const Point3 &p);

    ShellIndex shell_locate(const ArrayConfig &cfg, int m, Axis axis, const Point3 &p);

    /// Refinement ring depth. k = 0 yields +infinity and is never sampled.
    double yk_distance(const ArrayConfig &cfg, int M, int k);

    // Tangent of refinement grid point g in 1..2^M: (2g-1)/2^M - 1
    double grid_tangent(int M, int g);

    // Continuous grid coordinate of a tangent; integer exactly on grid points
    double grid_coordinate(int M, double tangent);

    struct GridRange
    {
        int lo = 1;
        int hi = 0;

        int count() const { return hi >= lo ? hi - lo + 1 : 0; }
        bool contains(int g) const { return g >= lo && g <= hi; }
        bool operator==(const GridRange &) const = default;
    };

    /// Tangent-grid range sampled on ring k for a level-M frustum with index t along `axis`.
    GridRange ring_grid_range(const ArrayConfig &cfg, int M, Axis axis, int t, int k);

    enum class PlanSource
    {
        frustum, // two-phase
        rod,     // three-phase
        window   // benchmark: square window around an estimated direction
    };

    const char *to_string(PlanSource source);

    struct RingPlan
    {
        int k = 1;
        double y_m = 0.0;
        GridRange phi;
        GridRange theta;
    };

    struct RefinementPlan
    {
        std::vector<DirectionTriplet> focus_points;
        std::vector<int> k_set;
        std::vector<RingPlan> rings;
        PlanSource source = PlanSource::frustum;

        std::size_t size() const { return focus_points.size(); }
    };

    RefinementPlan refinement_plan_frustum(const ArrayConfig &cfg, int M, const FrustumIndex &fi,
                                           const std::vector<int> &k_set);

    struct TangentBox
    {
        double x_lo = 0.0; // tan(phi) bounds
        double x_hi = 0.0;
        double z_lo = 0.0; // tan(theta) bounds
        double z_hi = 0.0;
    };

    /// Tangent bounding box of the rod cross-section at depth y, restricted to the serving
    /// region footprint of the given half angle. Empty intersection yields nullopt.
    std::optional<TangentBox> rod_cross_section(const ArrayConfig &cfg, int M, int x_M, int z_M, double y,
                                                double half_angle_rad = std::numbers::pi / 4.0);

    RefinementPlan refinement_plan_rod(const ArrayConfig &cfg, int M, int x_M, int z_M, const std::vector<int> &k_set,
                                       double half_angle_rad = std::numbers::pi / 4.0);

    /// Square window of half-width k around grid point (g_x, g_z) on each ring k.
    RefinementPlan refinement_plan_window(int M, int g_x, int g_z, const std::vector<int> &k_set,
                                          const ArrayConfig &cfg);

    // One row per focus point: k,y_m,phi_rad,theta_rad
    void write_plan_csv(std::ostream &os, const RefinementPlan &plan);

    /// Monte Carlo coverage test: every sampled point of the serving-region footprint at
    /// depth y_plane lies in at least one of the given regions.
    bool coverage_check(const ArrayConfig &cfg, const std::vector<Point3> &focal_points, double y_plane,
                        std::size_t samples, std::uint64_t seed);
    bool coverage_check_shell(const ArrayConfig &cfg, const std::vector<Point3> &focal_points, Axis axis,
                              double y_plane, std::size_t samples, std::uint64_t seed);

    // Level-m full codebook focal points, ordered by (x, z)
    std::vector<Point3> level_focal_points(const ArrayConfig &cfg, int m);
    std::vector<Point3> level_axis_focal_points(const ArrayConfig &cfg, int m, Axis axis);

    bool coverage_check(const ArrayConfig &cfg, int m, double y_plane, std::size_t samples, std::uint64_t seed);
}

#endif
