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

#include "nfbeam/wavefield.hpp"
#include "nfbeam/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace nfbeam
{
    const char *to_string(CodewordKind kind)
    {
        switch (kind)
        {
        case CodewordKind::diverging:
            return "diverging";
        case CodewordKind::focusing:
            return "focusing";
        case CodewordKind::axis_diverging:
            return "axis-diverging";
        case CodewordKind::dft:
            return "dft";
        case CodewordKind::custom:
            return "custom";
        }
        return "custom";
    }

    double Codeword::norm() const
    {
        double s = 0.0;
        for (const cplx &w : weights)
            s += std::norm(w);
        return std::sqrt(s);
    }

    Codeword make_custom_codeword(CVector weights, std::string id)
    {
        Codeword cw;
        for (const cplx &w : weights)
            if (w != cplx{})
                ++cw.active_count;
        cw.weights = std::move(weights);
        cw.kind = CodewordKind::custom;
        cw.id = std::move(id);
        return cw;
    }

    namespace
    {
        // Antenna coordinate along x (or z) for 1-based index i of an n-element axis
        inline double axis_coord(int i, int n, double d)
        {
            return 0.5 * static_cast<double>(2 * i - n - 1) * d;
        }

        // Fills out[(x-1)*n_z + z-1] = exp(sign * j k |p_xz - s|) * scale
        void fill_spherical(const ArrayConfig &cfg, const Point3 &s, double sign, double scale, CVector &out)
        {
            const int nx = cfg.n_x();
            const int nz = cfg.n_z();
            const double d = cfg.spacing();
            const double k = cfg.wavenumber();

            std::vector<double> dz2(static_cast<std::size_t>(nz));
            for (int z = 1; z <= nz; ++z)
            {
                const double dz = axis_coord(z, nz, d) - s.z;
                dz2[static_cast<std::size_t>(z - 1)] = dz * dz;
            }

            out.resize(cfg.size());
            const double y2 = s.y * s.y;
            for (int x = 1; x <= nx; ++x)
            {
                const double dx = axis_coord(x, nx, d) - s.x;
                const double base = dx * dx + y2;
                cplx *row = out.data() + static_cast<std::size_t>(x - 1) * static_cast<std::size_t>(nz);
                for (int z = 0; z < nz; ++z)
                {
                    const double r2 = base + dz2[static_cast<std::size_t>(z)];
                    if (r2 < 1e-24)
                        throw std::domain_error("steering vector undefined at an antenna position");
                    const double phase = sign * k * std::sqrt(r2);
                    row[z] = cplx(scale * std::cos(phase), scale * std::sin(phase));
                }
            }
        }
    }

    CVector steering_vector(const ArrayConfig &cfg, const Point3 &s)
    {
        CVector b;
        fill_spherical(cfg, s, -1.0, 1.0, b);
        return b;
    }

    Codeword diverging_codeword(const ArrayConfig &cfg, const Point3 &v)
    {
        if (!(v.y < 0.0))
            throw std::domain_error("diverging_codeword: virtual focal point must be behind the array (y < 0)");
        Codeword cw;
        fill_spherical(cfg, v, -1.0, 1.0 / std::sqrt(static_cast<double>(cfg.size())), cw.weights);
        cw.active_count = cfg.size();
        cw.kind = CodewordKind::diverging;
        cw.id = "diverging";
        return cw;
    }

    Codeword focusing_codeword(const ArrayConfig &cfg, const Point3 &u)
    {
        if (!(u.y > 0.0))
            throw std::domain_error("focusing_codeword: focus point must be in front of the array (y > 0)");
        Codeword cw;
        fill_spherical(cfg, u, +1.0, 1.0 / std::sqrt(static_cast<double>(cfg.size())), cw.weights);
        cw.active_count = cfg.size();
        cw.kind = CodewordKind::focusing;
        cw.id = "focusing";
        return cw;
    }

    Codeword axis_restricted_diverging_codeword(const ArrayConfig &cfg, const Point3 &v, Axis axis)
    {
        if (!(v.y < 0.0))
            throw std::domain_error(
                "axis_restricted_diverging_codeword: virtual focal point must be behind the array (y < 0)");

        const int n = cfg.count(axis);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        const double k = cfg.wavenumber();

        Codeword cw;
        cw.weights.assign(cfg.size(), cplx{});
        cw.active_count = static_cast<std::size_t>(n);
        cw.kind = CodewordKind::axis_diverging;
        cw.id = axis == Axis::horizontal ? "hor-diverging" : "ver-diverging";

        const int row = (cfg.n_z() + 1) / 2;
        const int col = (cfg.n_x() + 1) / 2;
        for (int i = 1; i <= n; ++i)
        {
            const int x = axis == Axis::horizontal ? i : col;
            const int z = axis == Axis::horizontal ? row : i;
            const double phase = -k * distance(v, antenna_position(cfg, x, z));
            cw.weights[cfg.flat_index(x, z)] = std::polar(scale, phase);
        }
        return cw;
    }

    Codeword dft_beam(const ArrayConfig &cfg, Axis axis, double sin_psi, int active_elements)
    {
        const int n = cfg.count(axis);
        if (active_elements < 1 || active_elements > n)
            throw std::domain_error("dft_beam: active element count outside 1.." + std::to_string(n));

        Codeword cw;
        cw.weights.assign(cfg.size(), cplx{});
        cw.active_count = static_cast<std::size_t>(active_elements);
        cw.kind = CodewordKind::dft;
        cw.id = "dft";

        const double scale = 1.0 / std::sqrt(static_cast<double>(active_elements));
        const double k = cfg.wavenumber();
        const int row = (cfg.n_z() + 1) / 2;
        const int col = (cfg.n_x() + 1) / 2;
        const int first = (n - active_elements) / 2 + 1;
        for (int i = first; i < first + active_elements; ++i)
        {
            const int x = axis == Axis::horizontal ? i : col;
            const int z = axis == Axis::horizontal ? row : i;
            const Point3 a = antenna_position(cfg, x, z);
            const double coord = axis == Axis::horizontal ? a.x : a.z;
            cw.weights[cfg.flat_index(x, z)] = std::polar(scale, -k * coord * sin_psi);
        }
        return cw;
    }

    double dft_beam_center(int beam_index, int beam_count)
    {
        return -1.0 + static_cast<double>(2 * beam_index - 1) / static_cast<double>(beam_count);
    }

    Codeword dft_codeword(const ArrayConfig &cfg, Axis axis, int beam_index, std::optional<int> level)
    {
        const int n = cfg.count(axis);
        int beams = n;
        int active = n;
        if (level)
        {
            if (*level < 0 || *level > 30)
                throw std::domain_error("dft_codeword: level out of range");
            beams = 1 << *level;
            active = std::min(beams, n);
        }
        if (beam_index < 1 || beam_index > beams)
            throw std::domain_error("dft_codeword: beam index " + std::to_string(beam_index) + " outside 1.." +
                                    std::to_string(beams));
        Codeword cw = dft_beam(cfg, axis, dft_beam_center(beam_index, beams), active);
        cw.id = std::string(axis == Axis::horizontal ? "dft-hor" : "dft-ver") + "(" +
                (level ? "L" + std::to_string(*level) + "," : std::string()) + std::to_string(beam_index) + ")";
        return cw;
    }

    cplx transpose_product(std::span<const cplx> a, std::span<const cplx> b)
    {
        if (a.size() != b.size())
            throw std::invalid_argument("transpose_product: length mismatch");
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            re += a[i].real() * b[i].real() - a[i].imag() * b[i].imag();
            im += a[i].real() * b[i].imag() + a[i].imag() * b[i].real();
        }
        return {re, im};
    }

    double normalized_response(const ArrayConfig &cfg, const Codeword &w, const Point3 &p)
    {
        if (!(p.y > 0.0))
            throw std::domain_error("normalized_response: observation point must satisfy y > 0");
        if (w.weights.size() != cfg.size())
            throw std::invalid_argument("normalized_response: codeword length does not match the array");
        CVector c;
        fill_spherical(cfg, p, -1.0, 1.0 / std::sqrt(static_cast<double>(cfg.size())), c);
        return std::abs(transpose_product(c, w.weights));
    }

    PlaneGrid plane_field_sample(const ArrayConfig &cfg, const Codeword &w, double y_plane, double half_extent_x,
                                 double half_extent_z, std::size_t resolution, unsigned workers)
    {
        if (!(y_plane > 0.0))
            throw std::domain_error("plane_field_sample: plane depth must be positive");
        if (resolution < 2)
            throw std::domain_error("plane_field_sample: resolution must be >= 2");

        PlaneGrid grid;
        grid.y_plane = y_plane;
        grid.xs.resize(resolution);
        grid.zs.resize(resolution);
        for (std::size_t i = 0; i < resolution; ++i)
        {
            const double t = static_cast<double>(i) / static_cast<double>(resolution - 1);
            grid.xs[i] = -half_extent_x + 2.0 * half_extent_x * t;
            grid.zs[i] = -half_extent_z + 2.0 * half_extent_z * t;
        }
        grid.values.assign(resolution * resolution, 0.0);

        parallel_for(resolution, workers, [&](std::size_t iz)
        {
            for (std::size_t ix = 0; ix < resolution; ++ix)
                grid.values[iz * resolution + ix] =
                    normalized_response(cfg, w, {grid.xs[ix], y_plane, grid.zs[iz]});
        });
        return grid;
    }

    PlaneGrid plane_field_sample(const ArrayConfig &cfg, const Codeword &w, double y_plane)
    {
        return plane_field_sample(cfg, w, y_plane, y_plane, y_plane, 256);
    }
}
