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

#include "nfbeam/codebook.hpp"
#include "nfbeam/parallel.hpp"
#include "nfbeam/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace nfbeam
{
    namespace
    {
        constexpr int kMaxLevel = 30;

        void require_level(int m, const char *who)
        {
            if (m < 1 || m > kMaxLevel)
                throw std::domain_error(std::string(who) + ": level must be in 1.." + std::to_string(kMaxLevel));
        }

        double pow2(int m) { return std::ldexp(1.0, m); }

        // Offset of index i in 1..2^m from the centre, in apertures: (2i - 2^m - 1)/2
        double centred(int m, int i) { return 0.5 * (2.0 * i - pow2(m) - 1.0); }

        int clamp_index(double raw, int m)
        {
            const int hi = 1 << m;
            if (!(raw > 1.0))
                return 1;
            if (raw >= hi)
                return hi;
            return static_cast<int>(std::ceil(raw));
        }

        // Index whose core slope cell [kappa(1-2i/2^m), kappa(1-2(i-1)/2^m)) holds t
        int core_index(double t, double kappa, int m)
        {
            return clamp_index(0.5 * pow2(m) * (1.0 - t / kappa), m);
        }

        // lo <= p < hi with lo = l1*r - half, hi = l2*r + half and l = (v +- half)/y_v
        bool slab(double coord, double r, double v_coord, double v_y, double half)
        {
            const double lo = (v_coord + half) * r / v_y - half;
            const double hi = (v_coord - half) * r / v_y + half;
            return coord >= lo && coord < hi;
        }

        void require_k_set(const std::vector<int> &k_set, const char *who)
        {
            if (k_set.empty())
                throw std::domain_error(std::string(who) + ": k_set must not be empty");
            for (std::size_t i = 0; i < k_set.size(); ++i)
            {
                if (k_set[i] < 1)
                    throw std::domain_error(std::string(who) + ": ring indices must be >= 1");
                if (i > 0 && k_set[i] <= k_set[i - 1])
                    throw std::domain_error(std::string(who) + ": k_set must be strictly ascending");
            }
        }

        void emit_ring(RefinementPlan &plan, int M, int k, double y, GridRange phi, GridRange theta)
        {
            plan.rings.push_back({k, y, phi, theta});
            for (int gx = phi.lo; gx <= phi.hi; ++gx)
                for (int gz = theta.lo; gz <= theta.hi; ++gz)
                    plan.focus_points.push_back({y, std::atan(grid_tangent(M, gx)), std::atan(grid_tangent(M, gz))});
        }

        GridRange tangent_range(int M, double lo, double hi)
        {
            const int top = 1 << M;
            GridRange r;
            r.lo = std::max(1, static_cast<int>(std::floor(grid_coordinate(M, lo))));
            r.hi = std::min(top, static_cast<int>(std::ceil(grid_coordinate(M, hi))));
            return r;
        }
    }

    bool FrustumIndex::valid() const
    {
        if (m < 1 || m > kMaxLevel)
            return false;
        const int n = 1 << m;
        return x >= 1 && x <= n && z >= 1 && z <= n;
    }

    bool ShellIndex::valid() const
    {
        return m >= 1 && m <= kMaxLevel && idx >= 1 && idx <= (1 << m);
    }

    Point3 virtual_focal_point(const ArrayConfig &cfg, const FrustumIndex &fi)
    {
        if (!fi.valid())
            throw std::domain_error("virtual_focal_point: invalid frustum index");
        return {centred(fi.m, fi.x) * cfg.aperture_x(), -0.5 * pow2(fi.m) * cfg.min_aperture(),
                centred(fi.m, fi.z) * cfg.aperture_z()};
    }

    Point3 axis_focal_point(const ArrayConfig &cfg, const ShellIndex &si)
    {
        if (!si.valid())
            throw std::domain_error("axis_focal_point: invalid shell index");
        const double depth = -0.5 * pow2(si.m) * cfg.aperture(si.axis);
        const double offset = centred(si.m, si.idx) * cfg.aperture(si.axis);
        if (si.axis == Axis::horizontal)
            return {offset, depth, 0.0};
        return {0.0, depth, offset};
    }

    std::array<FrustumIndex, 4> child_indices(const FrustumIndex &fi)
    {
        const int m = fi.m + 1;
        return {{{m, 2 * fi.x - 1, 2 * fi.z - 1},
                 {m, 2 * fi.x - 1, 2 * fi.z},
                 {m, 2 * fi.x, 2 * fi.z - 1},
                 {m, 2 * fi.x, 2 * fi.z}}};
    }

    bool rect_region_contains(const ArrayConfig &cfg, const Point3 &v, const Point3 &p)
    {
        if (!(v.y < 0.0))
            throw std::domain_error("rect_region_contains: focal point must satisfy y < 0");
        if (!(p.y > 0.0))
            throw std::domain_error("rect_region_contains: point must satisfy y > 0");
        return slab(p.x, p.y, v.x, v.y, 0.5 * cfg.aperture_x()) && slab(p.z, p.y, v.z, v.y, 0.5 * cfg.aperture_z());
    }

    bool shell_region_contains(const ArrayConfig &cfg, const Point3 &v, Axis axis, const Point3 &p)
    {
        if (!(v.y < 0.0))
            throw std::domain_error("shell_region_contains: focal point must satisfy y < 0");
        if (!(p.y > 0.0))
            throw std::domain_error("shell_region_contains: point must satisfy y > 0");
        if (axis == Axis::horizontal)
            return slab(p.x, std::hypot(p.y, p.z), v.x, v.y, 0.5 * cfg.aperture_x());
        return slab(p.z, std::hypot(p.y, p.x), v.z, v.y, 0.5 * cfg.aperture_z());
    }

    bool frustum_contains(const ArrayConfig &cfg, const FrustumIndex &fi, const Point3 &p)
    {
        return rect_region_contains(cfg, virtual_focal_point(cfg, fi), p);
    }

    bool shell_contains(const ArrayConfig &cfg, const ShellIndex &si, const Point3 &p)
    {
        return shell_region_contains(cfg, axis_focal_point(cfg, si), si.axis, p);
    }

    FrustumIndex frustum_locate(const ArrayConfig &cfg, int m, const Point3 &p)
    {
        require_level(m, "frustum_locate");
        if (!(p.y > 0.0))
            throw std::domain_error("frustum_locate: point must satisfy y > 0");
        const double mn = cfg.min_aperture();
        return {m, core_index(p.x / p.y, cfg.aperture_x() / mn, m), core_index(p.z / p.y, cfg.aperture_z() / mn, m)};
    }

    bool frustum_core_contains(const ArrayConfig &cfg, const FrustumIndex &fi, const Point3 &p)
    {
        return frustum_locate(cfg, fi.m, p) == fi;
    }

    ShellIndex shell_locate(const ArrayConfig &cfg, int m, Axis axis, const Point3 &p)
    {
        require_level(m, "shell_locate");
        if (!(p.y > 0.0))
            throw std::domain_error("shell_locate: point must satisfy y > 0");
        (void)cfg;
        const double t = axis == Axis::horizontal ? p.x / std::hypot(p.y, p.z) : p.z / std::hypot(p.y, p.x);
        return {m, core_index(t, 1.0, m), axis};
    }

    double yk_distance(const ArrayConfig &cfg, int M, int k)
    {
        require_level(M, "yk_distance");
        if (k < 0)
            throw std::domain_error("yk_distance: ring index must be >= 0");
        if (k == 0)
            return std::numeric_limits<double>::infinity();
        return 0.5 * pow2(M) * cfg.min_aperture() / static_cast<double>(2 * k - 1);
    }

    double grid_tangent(int M, int g)
    {
        return static_cast<double>(2 * g - 1) / pow2(M) - 1.0;
    }

    double grid_coordinate(int M, double tangent)
    {
        return 0.5 * (pow2(M) * (tangent + 1.0) + 1.0);
    }

    GridRange ring_grid_range(const ArrayConfig &cfg, int M, Axis axis, int t, int k)
    {
        require_level(M, "ring_grid_range");
        if (k < 1)
            throw std::domain_error("ring_grid_range: ring index must be >= 1");
        const double mn = cfg.min_aperture();
        const double D = cfg.aperture(axis);
        const double base = (mn + D) * (pow2(M) + 1.0) / (2.0 * mn);
        const double f_min = base - D * (t + k) / mn;
        const double f_max = base - D * (t - k) / mn;
        return {std::max(1, static_cast<int>(std::floor(f_min))),
                std::min(1 << M, static_cast<int>(std::ceil(f_max)))};
    }

    const char *to_string(PlanSource source)
    {
        switch (source)
        {
        case PlanSource::frustum:
            return "frustum";
        case PlanSource::rod:
            return "rod";
        case PlanSource::window:
            return "window";
        }
        return "frustum";
    }

    RefinementPlan refinement_plan_frustum(const ArrayConfig &cfg, int M, const FrustumIndex &fi,
                                           const std::vector<int> &k_set)
    {
        require_k_set(k_set, "refinement_plan_frustum");
        if (!fi.valid() || fi.m != M)
            throw std::domain_error("refinement_plan_frustum: frustum index must be a valid level-M index");

        RefinementPlan plan;
        plan.k_set = k_set;
        plan.source = PlanSource::frustum;
        for (int k : k_set)
            emit_ring(plan, M, k, yk_distance(cfg, M, k), ring_grid_range(cfg, M, Axis::horizontal, fi.x, k),
                      ring_grid_range(cfg, M, Axis::vertical, fi.z, k));
        return plan;
    }

    std::optional<TangentBox> rod_cross_section(const ArrayConfig &cfg, int M, int x_M, int z_M, double y,
                                                double half_angle_rad)
    {
        require_level(M, "rod_cross_section");
        const ShellIndex hor{M, x_M, Axis::horizontal};
        const ShellIndex ver{M, z_M, Axis::vertical};
        if (!hor.valid() || !ver.valid())
            throw std::domain_error("rod_cross_section: invalid shell index");
        if (!(y > 0.0) || !std::isfinite(y))
            throw std::domain_error("rod_cross_section: depth must be positive and finite");

        const Point3 vh = axis_focal_point(cfg, hor);
        const Point3 vv = axis_focal_point(cfg, ver);
        const double hx = 0.5 * cfg.aperture_x();
        const double hz = 0.5 * cfg.aperture_z();
        const double a1 = (vh.x + hx) / vh.y;
        const double a2 = (vh.x - hx) / vh.y;
        const double b1 = (vv.z + hz) / vv.y;
        const double b2 = (vv.z - hz) / vv.y;

        // Interval propagation: the coordinate bound of one shell depends on the other
        // coordinate only through r = sqrt(y^2 + c^2), which is extremal at the interval
        // ends or at c = 0.
        auto radial_range = [y](double lo, double hi)
        {
            const double r_min = (lo <= 0.0 && hi >= 0.0) ? y : std::hypot(y, std::min(std::abs(lo), std::abs(hi)));
            const double r_max = std::hypot(y, std::max(std::abs(lo), std::abs(hi)));
            return std::pair{r_min, r_max};
        };
        auto tighten = [&](double &lo, double &hi, double other_lo, double other_hi, double l1, double l2,
                           double half)
        {
            const auto [r_min, r_max] = radial_range(other_lo, other_hi);
            const double low = (l1 >= 0.0 ? l1 * r_min : l1 * r_max) - half;
            const double high = (l2 >= 0.0 ? l2 * r_max : l2 * r_min) + half;
            lo = std::max(lo, low);
            hi = std::min(hi, high);
        };

        const double edge = y * std::tan(half_angle_rad);
        double xl = -edge, xh = edge, zl = -edge, zh = edge;
        for (int it = 0; it < 200; ++it)
        {
            const double pxl = xl, pxh = xh, pzl = zl, pzh = zh;
            tighten(xl, xh, zl, zh, a1, a2, hx);
            if (xl > xh)
                return std::nullopt;
            tighten(zl, zh, xl, xh, b1, b2, hz);
            if (zl > zh)
                return std::nullopt;
            const double change = std::max({std::abs(xl - pxl), std::abs(xh - pxh), std::abs(zl - pzl),
                                            std::abs(zh - pzh)});
            if (change <= 1e-12 * y)
                break;
        }

        // The propagated box is an outer bound. Slice it to get the exact extent: for a fixed
        // value c of one coordinate, the own shell gives an interval and the other shell
        // constrains |own| through sqrt(y^2 + own^2).
        auto slice = [&](double c, double l1, double l2, double h_own, double m1, double m2, double h_other,
                         double box_lo, double box_hi, double &out_lo, double &out_hi)
        {
            const double r = std::hypot(y, c);
            double lo = std::max(box_lo, l1 * r - h_own);
            double hi = std::min(box_hi, l2 * r + h_own);
            if (lo > hi)
                return false;
            double rho_lo = y;
            double rho_hi = std::numeric_limits<double>::infinity();
            if (m1 > 0.0)
                rho_hi = std::min(rho_hi, (c + h_other) / m1);
            else if (m1 < 0.0)
                rho_lo = std::max(rho_lo, (c + h_other) / m1);
            else if (c + h_other < 0.0)
                return false;
            if (m2 > 0.0)
                rho_lo = std::max(rho_lo, (c - h_other) / m2);
            else if (m2 < 0.0)
                rho_hi = std::min(rho_hi, (c - h_other) / m2);
            else if (c - h_other >= 0.0)
                return false;
            if (rho_lo > rho_hi)
                return false;
            const double a_lo = std::sqrt(std::max(0.0, rho_lo * rho_lo - y * y));
            const double a_hi = std::isinf(rho_hi) ? rho_hi : std::sqrt(std::max(0.0, rho_hi * rho_hi - y * y));
            // own in [-a_hi, -a_lo] or [a_lo, a_hi], intersected with [lo, hi]
            bool any = false;
            for (const auto &[p, q] : {std::pair{-a_hi, -a_lo}, std::pair{a_lo, a_hi}})
            {
                const double u = std::max(p, lo);
                const double v = std::min(q, hi);
                if (u <= v)
                {
                    out_lo = any ? std::min(out_lo, u) : u;
                    out_hi = any ? std::max(out_hi, v) : v;
                    any = true;
                }
            }
            return any;
        };

        constexpr int slices = 2048;
        auto extent = [&](double c_lo, double c_hi, double l1, double l2, double h_own, double m1, double m2,
                          double h_other, double box_lo, double box_hi, double &lo, double &hi)
        {
            bool found = false;
            auto visit = [&](double c)
            {
                // the other coordinate's shell is a condition on c through the own coordinate
                double u = 0.0, v = 0.0;
                if (slice(c, l1, l2, h_own, m1, m2, h_other, box_lo, box_hi, u, v))
                {
                    lo = found ? std::min(lo, u) : u;
                    hi = found ? std::max(hi, v) : v;
                    found = true;
                }
            };
            for (int i = 0; i <= slices; ++i)
                visit(c_lo + (c_hi - c_lo) * i / slices);
            if (c_lo < 0.0 && c_hi > 0.0)
                visit(0.0);
            return found;
        };

        double ex_lo = 0.0, ex_hi = 0.0, ez_lo = 0.0, ez_hi = 0.0;
        if (!extent(zl, zh, a1, a2, hx, b1, b2, hz, xl, xh, ex_lo, ex_hi) ||
            !extent(xl, xh, b1, b2, hz, a1, a2, hx, zl, zh, ez_lo, ez_hi))
            return std::nullopt;
        return TangentBox{ex_lo / y, ex_hi / y, ez_lo / y, ez_hi / y};
    }

    RefinementPlan refinement_plan_rod(const ArrayConfig &cfg, int M, int x_M, int z_M, const std::vector<int> &k_set,
                                       double half_angle_rad)
    {
        require_k_set(k_set, "refinement_plan_rod");
        RefinementPlan plan;
        plan.k_set = k_set;
        plan.source = PlanSource::rod;
        for (int k : k_set)
        {
            const double y = yk_distance(cfg, M, k);
            const auto box = rod_cross_section(cfg, M, x_M, z_M, y, half_angle_rad);
            if (!box)
            {
                plan.rings.push_back({k, y, {}, {}});
                continue;
            }
            emit_ring(plan, M, k, y, tangent_range(M, box->x_lo, box->x_hi), tangent_range(M, box->z_lo, box->z_hi));
        }
        return plan;
    }

    RefinementPlan refinement_plan_window(int M, int g_x, int g_z, const std::vector<int> &k_set,
                                          const ArrayConfig &cfg)
    {
        require_k_set(k_set, "refinement_plan_window");
        require_level(M, "refinement_plan_window");
        const int top = 1 << M;
        if (g_x < 1 || g_x > top || g_z < 1 || g_z > top)
            throw std::domain_error("refinement_plan_window: centre outside the tangent grid");

        RefinementPlan plan;
        plan.k_set = k_set;
        plan.source = PlanSource::window;
        for (int k : k_set)
            emit_ring(plan, M, k, yk_distance(cfg, M, k), {std::max(1, g_x - k), std::min(top, g_x + k)},
                      {std::max(1, g_z - k), std::min(top, g_z + k)});
        return plan;
    }

    void write_plan_csv(std::ostream &os, const RefinementPlan &plan)
    {
        os << "k,y_m,phi_rad,theta_rad\n";
        os.precision(17);
        std::size_t i = 0;
        for (const RingPlan &ring : plan.rings)
        {
            const std::size_t n = static_cast<std::size_t>(ring.phi.count()) * static_cast<std::size_t>(ring.theta.count());
            for (std::size_t j = 0; j < n; ++j, ++i)
            {
                const DirectionTriplet &u = plan.focus_points[i];
                os << ring.k << ',' << u.y_m << ',' << u.phi_rad << ',' << u.theta_rad << '\n';
            }
        }
    }

    std::vector<Point3> level_focal_points(const ArrayConfig &cfg, int m)
    {
        require_level(m, "level_focal_points");
        const int n = 1 << m;
        std::vector<Point3> out;
        out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (int x = 1; x <= n; ++x)
            for (int z = 1; z <= n; ++z)
                out.push_back(virtual_focal_point(cfg, {m, x, z}));
        return out;
    }

    std::vector<Point3> level_axis_focal_points(const ArrayConfig &cfg, int m, Axis axis)
    {
        require_level(m, "level_axis_focal_points");
        std::vector<Point3> out;
        for (int i = 1; i <= (1 << m); ++i)
            out.push_back(axis_focal_point(cfg, {m, i, axis}));
        return out;
    }

    namespace
    {
        template <typename Member>
        bool sampled_coverage(std::size_t samples, std::uint64_t seed, double y_plane, Member &&member)
        {
            if (samples < 1000)
                throw std::domain_error("coverage_check: at least 1000 samples required");
            if (!(y_plane > 0.0))
                throw std::domain_error("coverage_check: plane depth must be positive");
            constexpr std::size_t chunk = 4096;
            const std::size_t chunks = (samples + chunk - 1) / chunk;
            std::atomic<bool> covered{true};
            parallel_for(chunks, 0, [&](std::size_t c)
            {
                if (!covered.load(std::memory_order_relaxed))
                    return;
                Engine eng = make_engine(seed, streams::coverage, c);
                std::uniform_real_distribution<double> u(-y_plane, y_plane);
                const std::size_t end = std::min(samples, (c + 1) * chunk);
                for (std::size_t i = c * chunk; i < end; ++i)
                {
                    const Point3 p{u(eng), y_plane, u(eng)};
                    if (!member(p))
                    {
                        covered.store(false, std::memory_order_relaxed);
                        return;
                    }
                }
            });
            return covered.load();
        }
    }

    bool coverage_check(const ArrayConfig &cfg, const std::vector<Point3> &focal_points, double y_plane,
                        std::size_t samples, std::uint64_t seed)
    {
        return sampled_coverage(samples, seed, y_plane, [&](const Point3 &p)
        {
            return std::any_of(focal_points.begin(), focal_points.end(),
                               [&](const Point3 &v) { return rect_region_contains(cfg, v, p); });
        });
    }

    bool coverage_check_shell(const ArrayConfig &cfg, const std::vector<Point3> &focal_points, Axis axis,
                              double y_plane, std::size_t samples, std::uint64_t seed)
    {
        return sampled_coverage(samples, seed, y_plane, [&](const Point3 &p)
        {
            return std::any_of(focal_points.begin(), focal_points.end(),
                               [&](const Point3 &v) { return shell_region_contains(cfg, v, axis, p); });
        });
    }

    bool coverage_check(const ArrayConfig &cfg, int m, double y_plane, std::size_t samples, std::uint64_t seed)
    {
        return coverage_check(cfg, level_focal_points(cfg, m), y_plane, samples, seed);
    }
}
