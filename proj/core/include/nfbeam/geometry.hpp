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

#ifndef NFBEAM_GEOMETRY_HPP
#define NFBEAM_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace nfbeam
{
    // Propagation speed used for every wavelength computation [m/s]
    inline constexpr double kSpeedOfLight = 3.0e8;

    struct Point3
    {
        double x = 0.0; // [m]
        double y = 0.0; // [m], depth along the array normal
        double z = 0.0; // [m]

        constexpr Point3 operator+(const Point3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Point3 operator-(const Point3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
        constexpr bool operator==(const Point3 &) const = default;

        constexpr double dot(const Point3 &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(dot(*this)); }
        bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    inline double distance(const Point3 &a, const Point3 &b) { return (a - b).norm(); }

    // Depth plus the two projection angles: x = y tan(phi), z = y tan(theta)
    struct DirectionTriplet
    {
        double y_m = 1.0;
        double phi_rad = 0.0;
        double theta_rad = 0.0;
    };

    enum class Axis
    {
        horizontal, // along x
        vertical    // along z
    };

    // Half-wavelength uniform planar array in the x-z plane, centered at the origin.
    // Antenna (x, z) uses 1-based indices; flattened storage order is (x-1)*n_z + (z-1).
    class ArrayConfig
    {
    public:
        ArrayConfig(int n_x, int n_z, double carrier_hz);

        int n_x() const { return n_x_; }
        int n_z() const { return n_z_; }
        std::size_t size() const { return static_cast<std::size_t>(n_x_) * static_cast<std::size_t>(n_z_); }
        int count(Axis a) const { return a == Axis::horizontal ? n_x_ : n_z_; }

        double carrier_hz() const { return carrier_hz_; }
        double wavelength() const { return wavelength_; }
        double wavenumber() const { return 2.0 * std::numbers::pi / wavelength_; }
        double spacing() const { return spacing_; }
        double aperture_x() const { return aperture_x_; }
        double aperture_z() const { return aperture_z_; }
        double aperture(Axis a) const { return a == Axis::horizontal ? aperture_x_ : aperture_z_; }
        double min_aperture() const { return aperture_x_ < aperture_z_ ? aperture_x_ : aperture_z_; }
        double diagonal() const { return diagonal_; }

        std::size_t flat_index(int x, int z) const
        {
            return static_cast<std::size_t>(x - 1) * static_cast<std::size_t>(n_z_) + static_cast<std::size_t>(z - 1);
        }

        bool operator==(const ArrayConfig &o) const
        {
            return n_x_ == o.n_x_ && n_z_ == o.n_z_ && carrier_hz_ == o.carrier_hz_;
        }

    private:
        int n_x_;
        int n_z_;
        double carrier_hz_;
        double wavelength_;
        double spacing_;
        double aperture_x_;
        double aperture_z_;
        double diagonal_;
    };

    // Throws std::domain_error for indices outside 1..n_x / 1..n_z
    Point3 antenna_position(const ArrayConfig &cfg, int x, int z);

    // Requires p.y > 0
    DirectionTriplet direction_from_point(const Point3 &p);
    Point3 point_from_direction(const DirectionTriplet &t);

    double rayleigh_distance(const ArrayConfig &cfg);
    double fresnel_distance(const ArrayConfig &cfg);

    /// Phase error of the far-field approximation on the link between antenna (x, z) and p.
    /// Non-negative; zero when p lies on the line through the origin and the antenna.
    double ff_phase_error(const ArrayConfig &cfg, int x, int z, const Point3 &p);

    // Maximum phase error over the four aperture corners. Equals the maximum over all
    // antennas, since the phase error is convex along any antenna segment.
    double max_corner_phase_error(const ArrayConfig &cfg, const Point3 &p);

    // Exact near-field membership: max corner phase error >= pi/8
    bool in_near_field(const ArrayConfig &cfg, const Point3 &p);

    /// Closed-form near-field boundary distance for the direction given by the projection
    /// angles (phi, theta). Uses the two diagonal sub-arrays; the larger boundary wins.
    double nf_boundary_distance(const ArrayConfig &cfg, double phi_rad, double theta_rad);

    /// Monte Carlo estimate of vol(near-field region) / vol(Rayleigh hemisphere).
    /// Deterministic for fixed (samples, seed); the worker count does not change the result.
    double nf_volume_fraction(const ArrayConfig &cfg, std::size_t samples, std::uint64_t seed, unsigned workers = 0);

    enum class ServingRegion
    {
        approximate, // y > 0, |phi| < half angle, |theta| < half angle
        exact        // |x| < y + D_x/2, |z| < y + D_z/2 (pi/4 frustum only)
    };

    bool in_serving_region(const ArrayConfig &cfg, const Point3 &p,
                           ServingRegion kind = ServingRegion::approximate,
                           double half_angle_rad = std::numbers::pi / 4.0);
}

#endif
