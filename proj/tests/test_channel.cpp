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

#include "nfbeam/channel.hpp"
#include "nfbeam/random.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace nfbeam;

namespace
{
    const ArrayConfig cfg16{16, 16, 28e9};
    const ArrayConfig cfg32{32, 32, 28e9};

    ChannelParams pure_los(double snr_db = std::numeric_limits<double>::infinity())
    {
        ChannelParams p;
        p.rician_db = std::numeric_limits<double>::infinity();
        p.nlos_paths = 0;
        p.ref_snr_db = snr_db;
        return p;
    }
}

TEST(SampleChannelTest, RicianFactorIsExact)
{
    for (std::uint64_t t = 0; t < 200; ++t)
    {
        const MultipathChannel ch = sample_channel(cfg32, {0.5, 5.0, -1.0}, ChannelParams{}, 9, t);
        EXPECT_NEAR(std::abs(ch.los.gain), 1.0, 1e-12);
        ASSERT_EQ(ch.nlos.size(), 8u);
        EXPECT_NEAR(ch.los_power() / ch.nlos_power(), std::pow(10.0, 1.3), 1e-6);
        EXPECT_NEAR(ch.nlos_power(), ch.los_power() * std::pow(10.0, -1.3), 1e-12);
    }
}

TEST(SampleChannelTest, ScatterersInNearFieldServingRegion)
{
    const double lo = fresnel_distance(cfg32), hi = rayleigh_distance(cfg32);
    for (std::uint64_t t = 0; t < 200; ++t)
        for (const Path &p : sample_channel(cfg32, {0.0, 3.0, 0.0}, ChannelParams{}, 4, t).nlos)
        {
            EXPECT_GE(p.position.y, lo);
            EXPECT_LE(p.position.y, hi);
            EXPECT_LE(std::abs(p.position.x), p.position.y);
            EXPECT_LE(std::abs(p.position.z), p.position.y);
        }
}

TEST(SampleChannelTest, NoisePowerFollowsReference)
{
    ChannelParams p;
    p.ref_snr_db = 20.0;
    const MultipathChannel total = sample_channel(cfg16, {0, 2, 0}, p, 1);
    EXPECT_NEAR(total.total_power() / total.noise_power, 100.0, 1e-9);
    p.reference = SnrReference::los;
    const MultipathChannel los = sample_channel(cfg16, {0, 2, 0}, p, 1);
    EXPECT_NEAR(los.los_power() / los.noise_power, 100.0, 1e-9);
    EXPECT_EQ(sample_channel(cfg16, {0, 2, 0}, pure_los(), 1).noise_power, 0.0);
}

TEST(SampleChannelTest, DeterministicPerSeedAndTrial)
{
    const MultipathChannel a = sample_channel(cfg16, {0.1, 2, 0.2}, ChannelParams{}, 5, 3);
    const MultipathChannel b = sample_channel(cfg16, {0.1, 2, 0.2}, ChannelParams{}, 5, 3);
    const MultipathChannel c = sample_channel(cfg16, {0.1, 2, 0.2}, ChannelParams{}, 5, 4);
    EXPECT_EQ(a.los.gain, b.los.gain);
    ASSERT_EQ(a.nlos.size(), b.nlos.size());
    for (std::size_t i = 0; i < a.nlos.size(); ++i)
    {
        EXPECT_EQ(a.nlos[i].gain, b.nlos[i].gain);
        EXPECT_EQ(a.nlos[i].position, b.nlos[i].position);
    }
    EXPECT_NE(a.los.gain, c.los.gain);
}

TEST(SampleChannelTest, RejectsInvalidUe)
{
    EXPECT_THROW(sample_channel(cfg16, {0, -1, 0}, ChannelParams{}, 1), std::domain_error);
    EXPECT_THROW(sample_channel(cfg16, {3, 1, 0}, ChannelParams{}, 1), std::domain_error);
    ChannelParams bad;
    bad.nlos_paths = -1;
    EXPECT_THROW(sample_channel(cfg16, {0, 1, 0}, bad, 1), std::domain_error);
}

TEST(ChannelVectorTest, PureLosIsScaledSteeringVector)
{
    const Point3 ue{0.2, 1.5, -0.1};
    const MultipathChannel ch = sample_channel(cfg16, ue, pure_los(), 2);
    const CVector h = channel_vector(cfg16, ch);
    const CVector b = steering_vector(cfg16, ue);
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        EXPECT_EQ(h[i], ch.los.gain * b[i]);
        EXPECT_NEAR(std::abs(h[i]), 1.0, 1e-12);
    }
}

TEST(ChannelVectorTest, MatchesPathLoopAndIsLinear)
{
    MultipathChannel ch = sample_channel(cfg16, {0.2, 1.5, -0.1}, ChannelParams{}, 3);
    const CVector h = channel_vector(cfg16, ch);
    const double k = cfg16.wavenumber();
    for (int x = 1; x <= 16; ++x)
        for (int z = 1; z <= 16; ++z)
        {
            const Point3 a = antenna_position(cfg16, x, z);
            cplx acc = ch.los.gain * std::polar(1.0, -k * distance(a, ch.los.position));
            for (const Path &p : ch.nlos)
                acc += p.gain * std::polar(1.0, -k * distance(a, p.position));
            EXPECT_NEAR(std::abs(h[cfg16.flat_index(x, z)] - acc), 0.0, 1e-12);
        }

    ch.los.gain *= 2.0;
    for (Path &p : ch.nlos)
        p.gain *= 2.0;
    const CVector h2 = channel_vector(cfg16, ch);
    for (std::size_t i = 0; i < h.size(); ++i)
        EXPECT_NEAR(std::abs(h2[i] - 2.0 * h[i]), 0.0, 1e-12);
}

TEST(NoiseStreamTest, CounterKeyedAndReproducible)
{
    NoiseStream a(1, 2, 0.5), b(1, 2, 0.5), c(1, 3, 0.5);
    for (std::uint64_t t = 0; t < 100; ++t)
    {
        const cplx n = a.next();
        EXPECT_EQ(n, b.at(t));
        EXPECT_NE(n, c.at(t));
    }
    EXPECT_EQ(a.position(), 100u);
    EXPECT_EQ(NoiseStream(1, 2, 0.0).at(5), cplx{});
    EXPECT_THROW(NoiseStream(1, 2, -1.0), std::domain_error);
}

TEST(PilotResponseTest, NoiselessEqualsTransposeProduct)
{
    const MultipathChannel ch = sample_channel(cfg16, {0.1, 2.0, 0.3}, ChannelParams{}, 6);
    MultipathChannel quiet = ch;
    quiet.noise_power = 0.0;
    NoiseStream noise(1, 1, 0.0);
    const Codeword w = diverging_codeword(cfg16, {0.0, -0.1, 0.0});
    const PilotObservation o = pilot_response(cfg16, quiet, w, noise);
    EXPECT_EQ(o.value, transpose_product(channel_vector(cfg16, ch), w.weights));
    EXPECT_EQ(o.codeword_id, w.id);
}

TEST(PilotResponseTest, NoiseStatistics)
{
    const MultipathChannel ch = sample_channel(cfg16, {0.1, 2.0, 0.3}, ChannelParams{}, 7);
    const CVector h = channel_vector(cfg16, ch);
    const Codeword w = focusing_codeword(cfg16, {0.1, 2.0, 0.3});
    const cplx mean = transpose_product(h, w.weights);
    const double sigma2 = 0.8;
    NoiseStream noise(11, 0, sigma2);
    const int n = 10000;
    double var = 0.0, power = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const PilotObservation o = pilot_response(h, w, noise);
        var += std::norm(o.value - mean);
        power += o.power();
    }
    EXPECT_NEAR(var / n, sigma2, 0.05 * sigma2);
    EXPECT_NEAR(power / n, std::norm(mean) + sigma2, 0.05 * (std::norm(mean) + sigma2));
}

TEST(SnrMetricsTest, PerfectLosBeamHasZeroLoss)
{
    const Point3 ue{0.3, 2.0, -0.2};
    const MultipathChannel ch = sample_channel(cfg16, ue, pure_los(30.0), 8);
    const SnrMetrics m = snr_metrics(cfg16, ch, focusing_codeword(cfg16, ue));
    EXPECT_NEAR(m.snr_loss_db, 0.0, 1e-10);
    EXPECT_NEAR(m.achieved_snr, 256.0 * ch.los_power() / ch.noise_power, 1e-6);
    EXPECT_NEAR(m.reference_snr, 1000.0, 1e-9);
    EXPECT_NEAR(m.los_reference_snr, 1000.0, 1e-9);
}

TEST(SnrMetricsTest, RicianFloor)
{
    EXPECT_NEAR(rician_loss_floor_db(13.0), 10.0 * std::log10(1.0 + std::pow(10.0, -1.3)), 1e-12);
    EXPECT_NEAR(rician_loss_floor_db(13.0), 0.212, 1e-3);

    // Averaged over NLOS draws, a perfect LOS beam cannot beat the floor
    const Point3 ue{0.0, 4.0, 0.0};
    double mean = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t)
    {
        const MultipathChannel ch = sample_channel(cfg32, ue, ChannelParams{}, 12, static_cast<std::uint64_t>(t));
        mean += snr_metrics(cfg32, ch, focusing_codeword(cfg32, ue)).snr_loss_db;
    }
    EXPECT_GE(mean / trials, rician_loss_floor_db(13.0) - 0.02);
}

TEST(SnrMetricsTest, GlobalPhaseInvarianceAndBounds)
{
    const MultipathChannel ch = sample_channel(cfg16, {0.1, 2.0, 0.3}, ChannelParams{}, 13);
    const CVector h = channel_vector(cfg16, ch);
    double hn = 0.0;
    for (const cplx &e : h)
        hn += std::norm(e);
    Engine eng = make_engine(3, 3);
    std::uniform_real_distribution<double> u(-0.3, 0.3), uy(0.5, 4.0);
    for (int i = 0; i < 100; ++i)
    {
        Codeword w = focusing_codeword(cfg16, {u(eng), uy(eng), u(eng)});
        const SnrMetrics a = snr_metrics(cfg16, ch, h, w);
        for (cplx &c : w.weights)
            c *= std::polar(1.0, 1.234);
        const SnrMetrics b = snr_metrics(cfg16, ch, h, w);
        EXPECT_NEAR(a.snr_loss_db, b.snr_loss_db, 1e-9);
        EXPECT_GE(a.snr_loss_db, -1e-12);
        EXPECT_LE(std::abs(transpose_product(h, w.weights)), std::sqrt(hn) + 1e-12);
    }
}

TEST(SnrMetricsTest, FocusAtUeWinsNoiseless)
{
    const Point3 ue{-0.4, 3.0, 0.2};
    const MultipathChannel ch = sample_channel(cfg16, ue, pure_los(), 14);
    const double best = snr_metrics(cfg16, ch, focusing_codeword(cfg16, ue)).achieved_snr;
    EXPECT_TRUE(std::isinf(best));
    const CVector h = channel_vector(cfg16, ch);
    const double gain = std::norm(transpose_product(h, focusing_codeword(cfg16, ue).weights));
    for (double dx : {-0.2, -0.05, 0.05, 0.2})
        EXPECT_LT(std::norm(transpose_product(h, focusing_codeword(cfg16, {ue.x + dx, ue.y, ue.z}).weights)), gain);
}

TEST(SnrMetricsTest, RejectsNonUnitCodeword)
{
    const MultipathChannel ch = sample_channel(cfg16, {0, 2, 0}, ChannelParams{}, 15);
    Codeword w = focusing_codeword(cfg16, {0, 2, 0});
    w.weights[0] *= 2.0;
    EXPECT_THROW(snr_metrics(cfg16, ch, w), std::domain_error);
}

TEST(ChannelJsonTest, RoundTrip)
{
    const MultipathChannel ch = sample_channel(cfg16, {0.1, 2.0, 0.3}, ChannelParams{}, 16);
    const MultipathChannel back = channel_from_json(channel_to_json(ch));
    EXPECT_EQ(back.los.gain, ch.los.gain);
    EXPECT_EQ(back.los.position, ch.los.position);
    EXPECT_EQ(back.noise_power, ch.noise_power);
    ASSERT_EQ(back.nlos.size(), ch.nlos.size());
    for (std::size_t i = 0; i < ch.nlos.size(); ++i)
    {
        EXPECT_EQ(back.nlos[i].gain, ch.nlos[i].gain);
        EXPECT_EQ(back.nlos[i].position, ch.nlos[i].position);
    }
}
