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

#include "nfbeam/geometry.hpp"
#include "nfbeam/parallel.hpp"
#include "nfbeam/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfbeam
{
    ArrayConfig::ArrayConfig(int n_x, int n_z, double carrier_hz)
        : n_x_(n_x), n_z_(n_z), carrier_hz_(carrier_hz)
    {
        if (n_x < 1 || n_z < 1)
            throw std::invalid_argument("ArrayConfig: antenna counts must be >= 1");
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw std::invalid_argument("ArrayConfig: carrier frequency must be positive");

        wavelength_ = kSpeedOfLight / carrier_hz;
        spacing_ = wavelength_ / 2.0;
        aperture_x_ = static_cast<double>(n_x - 1) * spacing_;
        aperture_z_ = static_cast<double>(n_z - 1) * spacing_;
        diagonal_ = std::hypot(aperture_x_, aperture_z_);
    }

    Point3 antenna_position(const ArrayConfig &cfg, int x, int z)
    {
        if (x < 1 || x > cfg.n_x() || z < 1 || z > cfg.n_z())
            throw std::domain_error("antenna_position: index (" + std::to_string(x) + ", " + std::to_string(z) +
                                    ") outside the array");
        const double d = cfg.spacing();
        return {0.5 * static_cast<double>(2 * x - cfg.n_x() - 1) * d, 0.0,
                0.5 * static_cast<double>(2 * z - cfg.n_z() - 1) * d};
    }

    DirectionTriplet direction_from_point(const Point3 &p)
    {
        if (!(p.y > 0.0))
            throw std::domain_error("direction_from_point: point must lie in front of the array (y > 0)");
        return {p.y, std::atan(p.x / p.y), std::atan(p.z / p.y)};
    }

    Point3 point_from_direction(const DirectionTriplet &t)
    {
        if (!(t.y_m > 0.0))
            throw std::domain_error("point_from_direction: depth must be positive");
        return {t.y_m * std::tan(t.phi_rad), t.y_m, t.y_m * std::tan(t.theta_rad)};
    }

    double rayleigh_distance(const ArrayConfig &cfg)
    {
        return 2.0 * cfg.diagonal() * cfg.diagonal() / cfg.wavelength();
    }

    double fresnel_distance(const ArrayConfig &cfg)
    {
        const double D = cfg.diagonal();
        return 0.62 * std::sqrt(D * D * D / cfg.wavelength());
    }

    namespace
    {
        // Far-field phase error for an antenna at position a
        double phase_error_at(double k, const Point3 &a, const Point3 &p, const Point3 &p_hat)
        {
            const Point3 link = p - a;
            const double err = k * (link.norm() - link.dot(p_hat));
            return err > 0.0 ? err : 0.0; // rounding can push the on-axis case below zero
        }

        Point3 unit(const Point3 &p)
        {
            const double n = p.norm();
            if (!(n > 0.0))
                throw std::domain_error("phase error undefined at the array origin");
            return p * (1.0 / n);
        }
    }

    double ff_phase_error(const ArrayConfig &cfg, int x, int z, const Point3 &p)
    {
        return phase_error_at(cfg.wavenumber(), antenna_position(cfg, x, z), p, unit(p));
    }

    double max_corner_phase_error(const ArrayConfig &cfg, const Point3 &p)
    {
        const Point3 p_hat = unit(p);
        const double k = cfg.wavenumber();
        const double hx = cfg.aperture_x() / 2.0;
        const double hz = cfg.aperture_z() / 2.0;
        double best = 0.0;
        for (double sx : {-1.0, 1.0})
            for (double sz : {-1.0, 1.0})
                best = std::max(best, phase_error_at(k, {sx * hx, 0.0, sz * hz}, p, p_hat));
        return best;
    }

    bool in_near_field(const ArrayConfig &cfg, const Point3 &p)
    {
        return max_corner_phase_error(cfg, p) >= std::numbers::pi / 8.0;
    }

    double nf_boundary_distance(const ArrayConfig &cfg, double phi_rad, double theta_rad)
    {
        // Direction cosines of the UE direction along x and z
        const double tx = std::tan(phi_rad);
        const double tz = std::tan(theta_rad);
        const double len = std::sqrt(1.0 + tx * tx + tz * tz);
        const double ux = tx / len;
        const double uz = tz / len;

        const double D = cfg.diagonal();
        const double rayleigh = rayleigh_distance(cfg);
        const double plus = (cfg.aperture_x() * ux + cfg.aperture_z() * uz) / D;
        const double minus = (cfg.aperture_x() * ux - cfg.aperture_z() * uz) / D;
        return rayleigh * std::max(1.0 - plus * plus, 1.0 - minus * minus);
    }

    double nf_volume_fraction(const ArrayConfig &cfg, std::size_t samples, std::uint64_t seed, unsigned workers)
    {
        if (samples < 10000)
            throw std::domain_error("nf_volume_fraction: at least 10^4 samples required");

        constexpr std::size_t chunk = 1 << 15;
        const std::size_t chunks = (samples + chunk - 1) / chunk;
        const double radius = rayleigh_distance(cfg);
        std::vector<std::size_t> hits(chunks, 0);

        parallel_for(chunks, workers, [&](std::size_t c)
        {
            Engine rng = make_engine(seed, streams::volume, c);
            std::uniform_real_distribution<double> sym(-1.0, 1.0);
            std::uniform_real_distribution<double> pos(0.0, 1.0);
            const std::size_t n = std::min(chunk, samples - c * chunk);
            std::size_t inside = 0;
            for (std::size_t i = 0; i < n;)
            {
                const Point3 u{sym(rng), pos(rng), sym(rng)};
                const double r2 = u.dot(u);
                if (r2 > 1.0 || !(u.y > 0.0))
                    continue;
                ++i;
                if (in_near_field(cfg, u * radius))
                    ++inside;
            }
            hits[c] = inside;
        });

        const std::size_t total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
        return static_cast<double>(total) / static_cast<double>(samples);
    }

    bool in_serving_region(const ArrayConfig &cfg, const Point3 &p, ServingRegion kind, double half_angle_rad)
    {
        if (!(p.y > 0.0))
            return false;
        if (kind == ServingRegion::exact)
            return std::abs(p.x) < p.y + cfg.aperture_x() / 2.0 && std::abs(p.z) < p.y + cfg.aperture_z() / 2.0;
        const double t = std::tan(half_angle_rad);
        return std::abs(p.x) < p.y * t && std::abs(p.z) < p.y * t;
    }
}
