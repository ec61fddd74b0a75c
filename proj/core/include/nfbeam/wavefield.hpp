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

#ifndef NFBEAM_WAVEFIELD_HPP
#define NFBEAM_WAVEFIELD_HPP

#include "nfbeam/geometry.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nfbeam
{
    using cplx = std::complex<double>;
    using CVector = std::vector<cplx>;

    enum class CodewordKind
    {
        diverging,
        focusing,
        axis_diverging,
        dft,
        custom
    };

    const char *to_string(CodewordKind kind);

    // Weight vector applied at the array, flattened as (x-1)*n_z + (z-1).
    // Generated codewords are unit-norm and phase-only over their active elements.
    struct Codeword
    {
        CVector weights;
        std::size_t active_count = 0;
        CodewordKind kind = CodewordKind::custom;
        std::string id;

        double norm() const;
    };

    Codeword make_custom_codeword(CVector weights, std::string id = "custom");

    // Unnormalized near-field steering vector b(s), entry exp(-j k |p_xz - s|).
    // Throws std::domain_error when s coincides with an antenna.
    CVector steering_vector(const ArrayConfig &cfg, const Point3 &s);

    /// Diverging codeword for a virtual focal point behind the array (v.y < 0).
    Codeword diverging_codeword(const ArrayConfig &cfg, const Point3 &v);

    /// Focusing codeword conj(b(u))/sqrt(N) for a point in front of the array (u.y > 0).
    Codeword focusing_codeword(const ArrayConfig &cfg, const Point3 &u);

    /// Diverging codeword restricted to the central row (horizontal, z = ceil(n_z/2)) or
    /// central column (vertical, x = ceil(n_x/2)).
    Codeword axis_restricted_diverging_codeword(const ArrayConfig &cfg, const Point3 &v, Axis axis);

    /// Far-field beam on the central ULA of the given axis, steered to sin_psi, using only
    /// `active_elements` central elements of that ULA.
    Codeword dft_beam(const ArrayConfig &cfg, Axis axis, double sin_psi, int active_elements);

    /// Beam `beam_index` (1-based) of a DFT codebook on the central ULA.
    ///
    /// Without a level: n beams over the full ULA, sin_psi = -1 + (2g-1)/n.
    /// With level L: 2^L beams, sin_psi = -1 + (2g-1)/2^L, realized on min(2^L, n) central
    /// elements so that coarse levels have proportionally wider main lobes.
    Codeword dft_codeword(const ArrayConfig &cfg, Axis axis, int beam_index, std::optional<int> level = std::nullopt);

    // sin_psi of the beam centers used by dft_codeword
    double dft_beam_center(int beam_index, int beam_count);

    // sum_n a_n * b_n (plain transpose, no conjugation)
    cplx transpose_product(std::span<const cplx> a, std::span<const cplx> b);

    /// |c(p)^T w| with c(p) = b(p)/sqrt(N). Requires p.y > 0. LOS only.
    double normalized_response(const ArrayConfig &cfg, const Codeword &w, const Point3 &p);

    struct PlaneGrid
    {
        double y_plane = 0.0;
        std::vector<double> xs; // column coordinates [m]
        std::vector<double> zs; // row coordinates [m]
        std::vector<double> values; // row-major, values[iz * xs.size() + ix]

        double at(std::size_t ix, std::size_t iz) const { return values[iz * xs.size() + ix]; }
    };

    // Samples normalized_response on the plane y = y_plane over [-half_x, half_x] x [-half_z, half_z]
    PlaneGrid plane_field_sample(const ArrayConfig &cfg, const Codeword &w, double y_plane, double half_extent_x,
                                 double half_extent_z, std::size_t resolution, unsigned workers = 0);

    // Default extent: the serving-region footprint |x|, |z| < y_plane, 256 x 256 cells
    PlaneGrid plane_field_sample(const ArrayConfig &cfg, const Codeword &w, double y_plane);
}

#endif
