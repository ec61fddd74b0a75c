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

#ifndef NFBEAM_CHANNEL_HPP
#define NFBEAM_CHANNEL_HPP

#include "nfbeam/geometry.hpp"
#include "nfbeam/wavefield.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace nfbeam
{
    struct Path
    {
        Point3 position;
        cplx gain;
    };

    struct MultipathChannel
    {
        Path los;
        std::vector<Path> nlos;
        double noise_power = 0.0; // sigma^2, linear

        double los_power() const { return std::norm(los.gain); }
        double nlos_power() const;
        double total_power() const { return los_power() + nlos_power(); }
    };

    // Which power the reference SNR is measured against
    enum class SnrReference
    {
        total, // sum_l |g_l|^2 / sigma^2
        los    // |g_0|^2 / sigma^2
    };

    struct ChannelParams
    {
        double rician_db = 13.0; // +inf disables NLOS power
        int nlos_paths = 8;
        double ref_snr_db = 35.0; // +inf gives a noiseless channel
        SnrReference reference = SnrReference::total;
        double half_angle_rad = std::numbers::pi / 4.0; // scatterer region
    };

    /// Draws one Rician channel realization for the UE at `ue`.
    ///
    /// The LOS gain has unit modulus and uniform phase. NLOS gains are circular normal,
    /// rescaled so that the Rician factor holds exactly. Scatterers are uniform in volume
    /// over the serving region between the Fresnel and Rayleigh depths.
    MultipathChannel sample_channel(const ArrayConfig &cfg, const Point3 &ue, const ChannelParams &params,
                                    std::uint64_t seed, std::uint64_t trial = 0);

    // sum_l g_l b(s_l)
    CVector channel_vector(const ArrayConfig &cfg, const MultipathChannel &ch);

    // Counter-keyed complex normal noise: draw t depends only on (seed, key, t)
    class NoiseStream
    {
    public:
        NoiseStream(std::uint64_t seed, std::uint64_t key, double variance);

        cplx next();
        cplx at(std::uint64_t t) const;
        std::uint64_t position() const { return position_; }
        double variance() const { return variance_; }

    private:
        std::uint64_t base_;
        double variance_;
        std::uint64_t position_ = 0;
    };

    struct PilotObservation
    {
        cplx value;
        std::string codeword_id;

        double power() const { return std::norm(value); }
    };

    PilotObservation pilot_response(const ArrayConfig &cfg, const MultipathChannel &ch, const Codeword &w,
                                    NoiseStream &noise);
    PilotObservation pilot_response(std::span<const cplx> h, const Codeword &w, NoiseStream &noise);

    struct SnrMetrics
    {
        double achieved_snr = 0.0;      // |h^T w|^2 / sigma^2
        double upper_bound_snr = 0.0;   // N sum|g_l|^2 / sigma^2
        double snr_loss_db = 0.0;       // 10 log10(upper / achieved)
        double reference_snr = 0.0;     // sum|g_l|^2 / sigma^2
        double los_reference_snr = 0.0; // |g_0|^2 / sigma^2
    };

    // Throws std::domain_error unless ||w|| = 1
    SnrMetrics snr_metrics(const ArrayConfig &cfg, const MultipathChannel &ch, const Codeword &w);
    SnrMetrics snr_metrics(const ArrayConfig &cfg, const MultipathChannel &ch, std::span<const cplx> h,
                           const Codeword &w);

    // 10 log10(1 + 10^(-K/10)): loss of a perfect LOS beam when NLOS power is not captured
    double rician_loss_floor_db(double rician_db);

    std::string channel_to_json(const MultipathChannel &ch);
    MultipathChannel channel_from_json(std::string_view text);
}

#endif
