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

#include "nfbeam/channel.hpp"
#include "nfbeam/random.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace nfbeam
{
    double MultipathChannel::nlos_power() const
    {
        double s = 0.0;
        for (const Path &p : nlos)
            s += std::norm(p.gain);
        return s;
    }

    MultipathChannel sample_channel(const ArrayConfig &cfg, const Point3 &ue, const ChannelParams &params,
                                    std::uint64_t seed, std::uint64_t trial)
    {
        if (!ue.finite() || !(ue.y > 0.0))
            throw std::domain_error("sample_channel: UE must be a finite point in front of the array");
        const double edge = ue.y * std::tan(params.half_angle_rad) * (1.0 + 1e-12);
        if (std::abs(ue.x) > edge || std::abs(ue.z) > edge)
            throw std::domain_error("sample_channel: UE outside the serving region");
        if (params.nlos_paths < 0)
            throw std::domain_error("sample_channel: NLOS path count must be >= 0");
        if (std::isnan(params.rician_db) || std::isnan(params.ref_snr_db))
            throw std::domain_error("sample_channel: Rician factor and reference SNR must not be NaN");

        Engine eng = make_engine(seed, streams::channel, trial);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

        MultipathChannel ch;
        ch.los = {ue, std::polar(1.0, 2.0 * std::numbers::pi * unit(eng))};

        const double y_a = std::min(fresnel_distance(cfg), rayleigh_distance(cfg));
        const double y_b = std::max(fresnel_distance(cfg), rayleigh_distance(cfg));
        const double tan_half = std::tan(params.half_angle_rad);
        ch.nlos.reserve(static_cast<std::size_t>(params.nlos_paths));
        for (int l = 0; l < params.nlos_paths; ++l)
        {
            // cross-section area grows as y^2, so y^3 is uniform
            const double y3 = y_a * y_a * y_a + unit(eng) * (y_b * y_b * y_b - y_a * y_a * y_a);
            const double y = std::cbrt(y3);
            const double x = (2.0 * unit(eng) - 1.0) * y * tan_half;
            const double z = (2.0 * unit(eng) - 1.0) * y * tan_half;
            const double re = gauss(eng);
            const double im = gauss(eng);
            ch.nlos.push_back({{x, y, z}, {re, im}});
        }

        const double target = ch.los_power() * std::pow(10.0, -params.rician_db / 10.0);
        const double drawn = ch.nlos_power();
        if (drawn > 0.0)
        {
            const double scale = std::sqrt(target / drawn);
            for (Path &p : ch.nlos)
                p.gain *= scale;
        }

        const double reference = params.reference == SnrReference::total ? ch.total_power() : ch.los_power();
        ch.noise_power = std::isinf(params.ref_snr_db) && params.ref_snr_db > 0.0
                             ? 0.0
                             : reference / std::pow(10.0, params.ref_snr_db / 10.0);
        return ch;
    }

    CVector channel_vector(const ArrayConfig &cfg, const MultipathChannel &ch)
    {
        CVector h = steering_vector(cfg, ch.los.position);
        for (cplx &e : h)
            e *= ch.los.gain;
        for (const Path &p : ch.nlos)
        {
            if (p.gain == cplx{})
                continue;
            const CVector b = steering_vector(cfg, p.position);
            for (std::size_t i = 0; i < h.size(); ++i)
                h[i] += p.gain * b[i];
        }
        return h;
    }

    NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t key, double variance)
        : base_(derive_seed(seed, streams::noise, key)), variance_(variance)
    {
        if (!(variance >= 0.0) || !std::isfinite(variance))
            throw std::domain_error("NoiseStream: variance must be finite and >= 0");
    }

    cplx NoiseStream::at(std::uint64_t t) const
    {
        if (variance_ == 0.0)
            return {};
        SplitMix64 gen(mix64(base_ ^ (t * 0x9E3779B97F4A7C15ULL + 1)));
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance_));
        const double re = gauss(gen);
        const double im = gauss(gen);
        return {re, im};
    }

    cplx NoiseStream::next()
    {
        return at(position_++);
    }

    PilotObservation pilot_response(std::span<const cplx> h, const Codeword &w, NoiseStream &noise)
    {
        return {transpose_product(h, w.weights) + noise.next(), w.id};
    }

    PilotObservation pilot_response(const ArrayConfig &cfg, const MultipathChannel &ch, const Codeword &w,
                                    NoiseStream &noise)
    {
        const CVector h = channel_vector(cfg, ch);
        return pilot_response(h, w, noise);
    }

    SnrMetrics snr_metrics(const ArrayConfig &cfg, const MultipathChannel &ch, std::span<const cplx> h,
                           const Codeword &w)
    {
        if (std::abs(w.norm() - 1.0) > 1e-9)
            throw std::domain_error("snr_metrics: codeword must have unit norm");
        const double gain = std::norm(transpose_product(h, w.weights));
        const double full = static_cast<double>(cfg.size()) * ch.total_power();

        SnrMetrics m;
        m.snr_loss_db = 10.0 * std::log10(full / gain);
        const double inf = std::numeric_limits<double>::infinity();
        if (ch.noise_power > 0.0)
        {
            m.achieved_snr = gain / ch.noise_power;
            m.upper_bound_snr = full / ch.noise_power;
            m.reference_snr = ch.total_power() / ch.noise_power;
            m.los_reference_snr = ch.los_power() / ch.noise_power;
        }
        else
        {
            m.achieved_snr = gain > 0.0 ? inf : 0.0;
            m.upper_bound_snr = inf;
            m.reference_snr = inf;
            m.los_reference_snr = inf;
        }
        return m;
    }

    SnrMetrics snr_metrics(const ArrayConfig &cfg, const MultipathChannel &ch, const Codeword &w)
    {
        const CVector h = channel_vector(cfg, ch);
        return snr_metrics(cfg, ch, h, w);
    }

    double rician_loss_floor_db(double rician_db)
    {
        return 10.0 * std::log10(1.0 + std::pow(10.0, -rician_db / 10.0));
    }
}
