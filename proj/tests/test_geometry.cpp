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

#include <gtest/gtest.h>

#include "nfbeam/geometry.hpp"
#include "nfbeam/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

using namespace nfbeam;

namespace
{
    constexpr double kPi = std::numbers::pi;

    const ArrayConfig cfg64{64, 64, 28e9};
    const ArrayConfig cfg32{32, 32, 28e9};

    // Independent phase-error evaluation: k (|p - a| - (p - a) . p_hat)
    double beta_oracle(const ArrayConfig &cfg, int x, int z, const Point3 &p)
    {
        const double d = cfg.wavelength() / 2.0;
        const double ax = (2.0 * x - cfg.n_x() - 1.0) / 2.0 * d;
        const double az = (2.0 * z - cfg.n_z() - 1.0) / 2.0 * d;
        const double rx = p.x - ax, ry = p.y, rz = p.z - az;
        const double pn = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
        const double r = std::sqrt(rx * rx + ry * ry + rz * rz);
        const double proj = (rx * p.x + ry * p.y + rz * p.z) / pn;
        return 2.0 * kPi / cfg.wavelength() * (r - proj);
    }

    Point3 random_front_point(Engine &eng, double y_lo, double y_hi)
    {
        std::uniform_real_distribution<double> uy(y_lo, y_hi), ut(-1.0, 1.0);
        const double y = uy(eng);
        return {y * ut(eng), y, y * ut(eng)};
    }
}

TEST(ArrayConfigTest, DerivedQuantities)
{
    EXPECT_NEAR(cfg64.wavelength(), 3e8 / 28e9, 1e-15);
    EXPECT_DOUBLE_EQ(cfg64.spacing(), cfg64.wavelength() / 2.0);
    EXPECT_NEAR(cfg64.aperture_x(), 0.3375, 1e-12);
    EXPECT_NEAR(cfg64.diagonal(), 0.477297, 1e-6);
    EXPECT_GE(cfg64.diagonal(), std::max(cfg64.aperture_x(), cfg64.aperture_z()));
    EXPECT_EQ(cfg64.flat_index(1, 1), 0u);
    EXPECT_EQ(cfg64.flat_index(2, 1), 64u);
    EXPECT_EQ(cfg64.flat_index(64, 64), 4095u);
}

TEST(ArrayConfigTest, RejectsInvalidParameters)
{
    EXPECT_THROW(ArrayConfig(0, 4, 28e9), std::invalid_argument);
    EXPECT_THROW(ArrayConfig(4, -1, 28e9), std::invalid_argument);
    EXPECT_THROW(ArrayConfig(4, 4, 0.0), std::invalid_argument);
}

TEST(AntennaPositionTest, TwoByTwoCorner)
{
    const ArrayConfig cfg{2, 2, 28e9};
    const Point3 p = antenna_position(cfg, 1, 1);
    EXPECT_NEAR(p.x, -cfg.spacing() / 2.0, 1e-15);
    EXPECT_EQ(p.y, 0.0);
    EXPECT_NEAR(p.z, -cfg.spacing() / 2.0, 1e-15);
}

TEST(AntennaPositionTest, FarCornerOf64)
{
    const Point3 p = antenna_position(cfg64, 64, 64);
    EXPECT_NEAR(p.x, 0.168750, 1e-9);
    EXPECT_NEAR(p.z, 0.168750, 1e-9);
}

TEST(AntennaPositionTest, PositionsAreCentered)
{
    for (const ArrayConfig &cfg : {cfg64, ArrayConfig{16, 32, 28e9}, ArrayConfig{7, 3, 10e9}})
    {
        Point3 sum;
        for (int x = 1; x <= cfg.n_x(); ++x)
            for (int z = 1; z <= cfg.n_z(); ++z)
                sum = sum + antenna_position(cfg, x, z);
        EXPECT_LT((sum * (1.0 / static_cast<double>(cfg.size()))).norm(), 1e-12);
    }
}

TEST(AntennaPositionTest, OutOfRangeThrows)
{
    EXPECT_THROW(antenna_position(cfg64, 0, 1), std::domain_error);
    EXPECT_THROW(antenna_position(cfg64, 1, 65), std::domain_error);
}

TEST(DirectionTest, Examples)
{
    const auto a = direction_from_point({0, 5, 0});
    EXPECT_DOUBLE_EQ(a.y_m, 5.0);
    EXPECT_DOUBLE_EQ(a.phi_rad, 0.0);
    EXPECT_DOUBLE_EQ(a.theta_rad, 0.0);

    const auto b = direction_from_point({5, 5, 5});
    EXPECT_NEAR(b.phi_rad, kPi / 4.0, 1e-15);
    EXPECT_NEAR(b.theta_rad, kPi / 4.0, 1e-15);

    const Point3 c = point_from_direction({3.0, 0.2, -0.1});
    EXPECT_NEAR(c.x, 3.0 * std::tan(0.2), 1e-15);
    EXPECT_DOUBLE_EQ(c.y, 3.0);
    EXPECT_NEAR(c.z, -3.0 * std::tan(0.1), 1e-15);
}

TEST(DirectionTest, RoundTrip)
{
    Engine eng = make_engine(11, 1);
    std::uniform_real_distribution<double> uy(0.1, 100.0), ua(-1.4, 1.4);
    for (int i = 0; i < 1000; ++i)
    {
        const DirectionTriplet t{uy(eng), ua(eng), ua(eng)};
        const DirectionTriplet r = direction_from_point(point_from_direction(t));
        EXPECT_NEAR(r.y_m, t.y_m, 1e-9 * t.y_m);
        EXPECT_NEAR(r.phi_rad, t.phi_rad, 1e-9 * std::max(1.0, std::abs(t.phi_rad)));
        EXPECT_NEAR(r.theta_rad, t.theta_rad, 1e-9 * std::max(1.0, std::abs(t.theta_rad)));
    }
}

TEST(DirectionTest, NonPositiveDepthThrows)
{
    EXPECT_THROW(direction_from_point({1, 0, 1}), std::domain_error);
    EXPECT_THROW(direction_from_point({1, -2, 1}), std::domain_error);
}

TEST(DistanceTest, RayleighDistances)
{
    EXPECT_NEAR(rayleigh_distance(cfg64), 42.525, 1e-3);
    EXPECT_NEAR(rayleigh_distance(cfg32), 10.296, 1e-3);
    EXPECT_NEAR(rayleigh_distance(ArrayConfig{16, 32, 28e9}), 6.354, 1e-3);
    EXPECT_NEAR(rayleigh_distance(ArrayConfig{32, 64, 28e9}), 26.411, 1e-3);
}

TEST(DistanceTest, FresnelDistance)
{
    const double D = 0.477297, lambda = 0.0107143;
    EXPECT_NEAR(fresnel_distance(cfg64), 0.62 * std::sqrt(D * D * D / lambda), 1e-3);
    EXPECT_NEAR(fresnel_distance(cfg64), 1.975, 1e-3);
}

TEST(PhaseErrorTest, MatchesOracle)
{
    Engine eng = make_engine(3, 2);
    std::uniform_int_distribution<int> ux(1, 64);
    for (int i = 0; i < 2000; ++i)
    {
        const Point3 p = random_front_point(eng, 0.5, 60.0);
        const int x = ux(eng), z = ux(eng);
        EXPECT_NEAR(ff_phase_error(cfg64, x, z, p), beta_oracle(cfg64, x, z, p), 1e-9);
    }
}

TEST(PhaseErrorTest, ZeroOnAxisOfCentralAntenna)
{
    const ArrayConfig cfg{9, 9, 28e9};
    EXPECT_NEAR(ff_phase_error(cfg, 5, 5, {0, 3.0, 0}), 0.0, 1e-12);
}

TEST(PhaseErrorTest, CornerAtRayleighIsAboutPiOverEight)
{
    const double beta = ff_phase_error(cfg64, 1, 1, {0, 42.525, 0});
    EXPECT_NEAR(beta, kPi / 8.0, 0.15 * kPi / 8.0);
}

TEST(PhaseErrorTest, NonNegative)
{
    Engine eng = make_engine(5, 3);
    std::uniform_int_distribution<int> ux(1, 64);
    for (int i = 0; i < 10000; ++i)
    {
        const Point3 p = random_front_point(eng, 0.01, 100.0);
        EXPECT_GE(ff_phase_error(cfg64, ux(eng), ux(eng), p), 0.0);
    }
}

TEST(PhaseErrorTest, ConvexAlongCollinearTriples)
{
    Engine eng = make_engine(7, 4);
    std::uniform_int_distribution<int> un(2, 64);
    std::uniform_real_distribution<double> uf(10e9, 100e9);
    for (int i = 0; i < 1000; ++i)
    {
        const ArrayConfig cfg{un(eng), un(eng), uf(eng)};
        std::uniform_int_distribution<int> ux(1, cfg.n_x()), uz(1, cfg.n_z());
        const int x1 = ux(eng), z1 = uz(eng), x2 = ux(eng), z2 = uz(eng);
        // Lattice point strictly between the endpoints along the segment
        const int g = std::gcd(std::abs(x2 - x1), std::abs(z2 - z1));
        if (g < 2)
            continue;
        std::uniform_int_distribution<int> us(1, g - 1);
        const int s = us(eng);
        const int x3 = x1 + (x2 - x1) / g * s, z3 = z1 + (z2 - z1) / g * s;
        const Point3 p = random_front_point(eng, 0.05, 2.0 * rayleigh_distance(cfg));
        const double b1 = ff_phase_error(cfg, x1, z1, p);
        const double b2 = ff_phase_error(cfg, x2, z2, p);
        const double b3 = ff_phase_error(cfg, x3, z3, p);
        EXPECT_LE(b3, std::max(b1, b2) + 1e-12);
    }
}

TEST(PhaseErrorTest, MaximumIsAttainedAtCorners)
{
    Engine eng = make_engine(9, 5);
    std::uniform_int_distribution<int> un(1, 16);
    for (int i = 0; i < 1000; ++i)
    {
        const ArrayConfig cfg{un(eng), un(eng), 28e9};
        const Point3 p = random_front_point(eng, 0.01, 1.0);
        double best = -1.0, corner_best = -1.0;
        for (int x = 1; x <= cfg.n_x(); ++x)
            for (int z = 1; z <= cfg.n_z(); ++z)
            {
                const double b = ff_phase_error(cfg, x, z, p);
                best = std::max(best, b);
                if ((x == 1 || x == cfg.n_x()) && (z == 1 || z == cfg.n_z()))
                    corner_best = std::max(corner_best, b);
            }
        EXPECT_NEAR(corner_best, best, 1e-12);
        EXPECT_NEAR(max_corner_phase_error(cfg, p), best, 1e-12);
    }
}

TEST(NearFieldBoundaryTest, BoresightIsRayleighDistance)
{
    EXPECT_NEAR(nf_boundary_distance(cfg64, 0.0, 0.0), rayleigh_distance(cfg64), 1e-9);
}

TEST(NearFieldBoundaryTest, SymmetricAndBounded)
{
    Engine eng = make_engine(13, 6);
    std::uniform_real_distribution<double> ua(-kPi / 4.0, kPi / 4.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double phi = ua(eng), theta = ua(eng);
        const double r = nf_boundary_distance(cfg64, phi, theta);
        EXPECT_NEAR(r, nf_boundary_distance(cfg64, -phi, theta), 1e-9);
        EXPECT_LE(r, rayleigh_distance(cfg64) + 1e-9);
        EXPECT_GT(r, 0.0);
    }
}

TEST(NearFieldBoundaryTest, ExactMembershipFlipsNearBoundary)
{
    Engine eng = make_engine(17, 7);
    std::uniform_real_distribution<double> ua(-kPi / 4.0 + 0.01, kPi / 4.0 - 0.01);
    for (const ArrayConfig &cfg : {cfg64, cfg32})
        for (int i = 0; i < 1000; ++i)
        {
            const double phi = ua(eng), theta = ua(eng);
            const double r = nf_boundary_distance(cfg, phi, theta);
            // Unit direction of the given projection angles
            const double tx = std::tan(phi), tz = std::tan(theta);
            const double n = std::sqrt(1.0 + tx * tx + tz * tz);
            const Point3 u{tx / n, 1.0 / n, tz / n};
            EXPECT_TRUE(in_near_field(cfg, u * (0.98 * r))) << phi << ' ' << theta;
            EXPECT_FALSE(in_near_field(cfg, u * (1.02 * r))) << phi << ' ' << theta;
        }
}

TEST(VolumeFractionTest, DeterministicAndWorkerInvariant)
{
    const double a = nf_volume_fraction(cfg32, 20000, 42, 1);
    const double b = nf_volume_fraction(cfg32, 20000, 42, 4);
    const double c = nf_volume_fraction(cfg32, 20000, 42, 0);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, 1.0);
}

TEST(VolumeFractionTest, RejectsSmallSampleCounts)
{
    EXPECT_THROW(nf_volume_fraction(cfg32, 100, 1), std::domain_error);
}

TEST(ServingRegionTest, ApproximateAndExact)
{
    EXPECT_TRUE(in_serving_region(cfg64, {0.9, 1.0, -0.9}));
    EXPECT_FALSE(in_serving_region(cfg64, {1.1, 1.0, 0.0}));
    EXPECT_FALSE(in_serving_region(cfg64, {0.0, -1.0, 0.0}));
    EXPECT_TRUE(in_serving_region(cfg64, {1.1, 1.0, 0.0}, ServingRegion::exact));
    EXPECT_TRUE(in_serving_region(cfg64, {1.5, 1.0, 0.0}, ServingRegion::approximate, kPi / 3.0));
}
