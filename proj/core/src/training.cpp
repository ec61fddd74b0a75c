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

#include "nfbeam/training.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nfbeam
{
    PilotOracle oracle_from_channel(const ArrayConfig &cfg, const MultipathChannel &ch, std::uint64_t seed,
                                    std::uint64_t key)
    {
        auto h = std::make_shared<const CVector>(channel_vector(cfg, ch));
        return [h, noise = NoiseStream(seed, key, ch.noise_power)](const Codeword &w) mutable
        {
            return pilot_response(*h, w, noise);
        };
    }

    const char *to_string(Method method)
    {
        switch (method)
        {
        case Method::two_phase:
            return "two-phase";
        case Method::three_phase:
            return "three-phase";
        case Method::upa_partitioning:
            return "upa-partitioning";
        case Method::hier_dft:
            return "hier-dft";
        case Method::dft_sweep:
            return "dft-sweep";
        case Method::grid_matching:
            return "grid-matching";
        }
        return "two-phase";
    }

    std::optional<Method> parse_method(std::string_view name)
    {
        for (Method m : {Method::two_phase, Method::three_phase, Method::upa_partitioning, Method::hier_dft,
                         Method::dft_sweep, Method::grid_matching})
            if (name == to_string(m))
                return m;
        return std::nullopt;
    }

    int rf_chains(Method method, const ArrayConfig &cfg)
    {
        switch (method)
        {
        case Method::two_phase:
        case Method::grid_matching:
            return 1;
        case Method::three_phase:
        case Method::dft_sweep:
            return 3;
        case Method::upa_partitioning:
        case Method::hier_dft:
            return static_cast<int>(std::lround(std::log2(static_cast<double>(cfg.size()))));
        }
        return 1;
    }

    std::size_t TrainingOutcome::total_pilots() const
    {
        return std::accumulate(pilots_per_phase.begin(), pilots_per_phase.end(), std::size_t{0});
    }

    namespace
    {
        void require_M(int M, const char *who)
        {
            if (M < 1 || M > 30)
                throw std::domain_error(std::string(who) + ": M must be in 1..30");
        }

        // Sends pilots and tracks the strongest; ties keep the earliest
        class Sweep
        {
        public:
            Sweep(const PilotOracle &oracle, TrainingOutcome &out) : oracle_(oracle), out_(out) {}

            double send(const Codeword &w)
            {
                const PilotObservation obs = oracle_(w);
                const double p = obs.power();
                out_.trace.push_back({w.id, p});
                return p;
            }

        private:
            const PilotOracle &oracle_;
            TrainingOutcome &out_;
        };

        template <typename Make>
        std::size_t best_of(Sweep &sweep, std::size_t count, Make &&make)
        {
            std::size_t best = 0;
            double best_power = -1.0;
            for (std::size_t i = 0; i < count; ++i)
            {
                const double p = sweep.send(make(i));
                if (p > best_power)
                {
                    best_power = p;
                    best = i;
                }
            }
            return best;
        }

        struct PlanEntry
        {
            int k;
            int gx;
            int gz;
            DirectionTriplet u;
        };

        std::vector<PlanEntry> entries(const RefinementPlan &plan)
        {
            std::vector<PlanEntry> out;
            out.reserve(plan.size());
            std::size_t i = 0;
            for (const RingPlan &ring : plan.rings)
                for (int gx = ring.phi.lo; gx <= ring.phi.hi; ++gx)
                    for (int gz = ring.theta.lo; gz <= ring.theta.hi; ++gz)
                        out.push_back({ring.k, gx, gz, plan.focus_points[i++]});
            return out;
        }

        Codeword focus_codeword(const ArrayConfig &cfg, const PlanEntry &e)
        {
            Codeword w = focusing_codeword(cfg, point_from_direction(e.u));
            w.id = "focus(k=" + std::to_string(e.k) + ",gx=" + std::to_string(e.gx) + ",gz=" + std::to_string(e.gz) +
                   ")";
            return w;
        }

        // Focusing sweep over a plan; fills chosen and focus_point, returns pilots used
        std::size_t refine(const ArrayConfig &cfg, Sweep &sweep, const RefinementPlan &plan, TrainingOutcome &out)
        {
            const std::vector<PlanEntry> list = entries(plan);
            if (list.empty())
                throw std::runtime_error("refinement plan is empty");
            const std::size_t best =
                best_of(sweep, list.size(), [&](std::size_t i) { return focus_codeword(cfg, list[i]); });
            out.chosen = focus_codeword(cfg, list[best]);
            out.focus_point = list[best].u;
            return list.size();
        }

        std::string frustum_id(const FrustumIndex &f)
        {
            return "diverging(m=" + std::to_string(f.m) + ",x=" + std::to_string(f.x) + ",z=" + std::to_string(f.z) +
                   ")";
        }

        std::string shell_id(const ShellIndex &s)
        {
            return std::string(s.axis == Axis::horizontal ? "hor" : "ver") + "-diverging(m=" + std::to_string(s.m) +
                   ",i=" + std::to_string(s.idx) + ")";
        }

        // Binary descent over 2 candidates per level; returns the final index
        template <typename Make>
        int binary_descent(Sweep &sweep, int M, Make &&make)
        {
            int idx = 1;
            for (int m = 1; m <= M; ++m)
            {
                const int first = m == 1 ? 1 : 2 * idx - 1;
                idx = first + static_cast<int>(best_of(sweep, 2, [&](std::size_t i)
                                                       { return make(m, first + static_cast<int>(i)); }));
            }
            return idx;
        }
    }

    TrainingOutcome two_phase_train(const ArrayConfig &cfg, const PilotOracle &oracle, int M,
                                    const std::vector<int> &k_set)
    {
        require_M(M, "two_phase_train");
        TrainingOutcome out;
        out.method = Method::two_phase;
        out.phase_names = {"localization", "refinement"};
        Sweep sweep(oracle, out);

        FrustumIndex node{0, 1, 1};
        for (int m = 1; m <= M; ++m)
        {
            const auto children = child_indices(node);
            node = children[best_of(sweep, children.size(), [&](std::size_t i)
            {
                Codeword w = diverging_codeword(cfg, virtual_focal_point(cfg, children[i]));
                w.id = frustum_id(children[i]);
                return w;
            })];
        }
        out.frustum = node;
        out.pilots_per_phase.push_back(out.trace.size());

        RefinementPlan plan = refinement_plan_frustum(cfg, M, node, k_set);
        if (plan.size() == 0)
        {
            // Frustum lies outside the tangent grid: window at the grid point nearest its central slope
            const double mn = cfg.min_aperture();
            auto centre = [&](int t, double kappa)
            {
                const double slope = kappa * (1.0 - (2.0 * t - 1.0) / std::ldexp(1.0, M));
                return std::clamp(static_cast<int>(std::lround(grid_coordinate(M, slope))), 1, 1 << M);
            };
            plan = refinement_plan_window(M, centre(node.x, cfg.aperture_x() / mn), centre(node.z, cfg.aperture_z() / mn),
                                          k_set, cfg);
        }
        out.pilots_per_phase.push_back(refine(cfg, sweep, plan, out));
        return out;
    }

    TrainingOutcome three_phase_train(const ArrayConfig &cfg, const PilotOracle &oracle, int M,
                                      const std::vector<int> &k_set, double half_angle_rad)
    {
        require_M(M, "three_phase_train");
        TrainingOutcome out;
        out.method = Method::three_phase;
        out.phase_names = {"horizontal", "vertical", "refinement"};
        Sweep sweep(oracle, out);

        int idx[2] = {0, 0};
        for (Axis axis : {Axis::horizontal, Axis::vertical})
        {
            const std::size_t before = out.trace.size();
            idx[axis == Axis::horizontal ? 0 : 1] = binary_descent(sweep, M, [&](int m, int i)
            {
                const ShellIndex s{m, i, axis};
                Codeword w = axis_restricted_diverging_codeword(cfg, axis_focal_point(cfg, s), axis);
                w.id = shell_id(s);
                return w;
            });
            out.pilots_per_phase.push_back(out.trace.size() - before);
        }
        out.shells = std::pair{ShellIndex{M, idx[0], Axis::horizontal}, ShellIndex{M, idx[1], Axis::vertical}};

        RefinementPlan plan = refinement_plan_rod(cfg, M, idx[0], idx[1], k_set, half_angle_rad);
        if (plan.size() == 0)
            plan = refinement_plan_rod(cfg, M, idx[0], idx[1], k_set, 1.5);
        if (plan.size() == 0)
        {
            // Shells do not intersect: window around the grid points at the shell centre slopes
            const int top = 1 << M;
            plan = refinement_plan_window(M, top + 1 - idx[0], top + 1 - idx[1], k_set, cfg);
        }
        out.pilots_per_phase.push_back(refine(cfg, sweep, plan, out));
        return out;
    }

    std::pair<int, int> grid_direction_from_cosines(int M, double u_x, double u_z)
    {
        require_M(M, "grid_direction_from_cosines");
        const double depth = std::sqrt(std::max(1e-12, 1.0 - u_x * u_x - u_z * u_z));
        const int top = 1 << M;
        auto nearest = [&](double t)
        {
            const double g = std::round(grid_coordinate(M, t));
            return static_cast<int>(std::clamp(g, 1.0, static_cast<double>(top)));
        };
        return {nearest(u_x / depth), nearest(u_z / depth)};
    }

    namespace
    {
        // Central lines of the UPA along `axis`: max(1, n_other / 2^m) parallel ULAs, each using
        // min(2^m, n_axis) central elements, all steered to sin_psi
        Codeword partition_beam(const ArrayConfig &cfg, Axis axis, double sin_psi, int m)
        {
            const Axis other = axis == Axis::horizontal ? Axis::vertical : Axis::horizontal;
            const int n = cfg.count(axis);
            const int n_other = cfg.count(other);
            const int lines = std::max(1, static_cast<int>(static_cast<double>(n_other) / std::ldexp(1.0, m)));
            const int active = m >= 30 ? n : std::min(1 << m, n);
            const int first = (n - active) / 2 + 1;
            const int first_line = (n_other - lines) / 2 + 1;
            const double scale = 1.0 / std::sqrt(static_cast<double>(lines) * active);
            const double k = cfg.wavenumber();

            Codeword w;
            w.weights.assign(cfg.size(), cplx{});
            w.active_count = static_cast<std::size_t>(lines) * static_cast<std::size_t>(active);
            w.kind = CodewordKind::dft;
            for (int line = first_line; line < first_line + lines; ++line)
                for (int i = first; i < first + active; ++i)
                {
                    const int x = axis == Axis::horizontal ? i : line;
                    const int z = axis == Axis::horizontal ? line : i;
                    const Point3 a = antenna_position(cfg, x, z);
                    const double coord = axis == Axis::horizontal ? a.x : a.z;
                    w.weights[cfg.flat_index(x, z)] = std::polar(scale, -k * coord * sin_psi);
                }
            return w;
        }

        std::string beam_id(const char *prefix, Axis axis, int m, int g)
        {
            return std::string(prefix) + (axis == Axis::horizontal ? "-hor" : "-ver") + "(L" + std::to_string(m) +
                   "," + std::to_string(g) + ")";
        }
    }

    TrainingOutcome benchmark_train(const ArrayConfig &cfg, const PilotOracle &oracle, Method method,
                                    const BenchmarkParams &params)
    {
        TrainingOutcome out;
        out.method = method;
        Sweep sweep(oracle, out);

        if (method == Method::grid_matching)
        {
            if (params.grid.empty())
                throw std::domain_error("benchmark_train: grid matching needs a non-empty grid");
            out.phase_names = {"grid"};
            const std::size_t best = best_of(sweep, params.grid.size(), [&](std::size_t i)
            {
                Codeword w = focusing_codeword(cfg, params.grid[i]);
                w.id = "grid(" + std::to_string(i) + ")";
                return w;
            });
            out.chosen = focusing_codeword(cfg, params.grid[best]);
            out.chosen.id = "grid(" + std::to_string(best) + ")";
            out.focus_point = direction_from_point(params.grid[best]);
            out.pilots_per_phase.push_back(params.grid.size());
            return out;
        }

        const int M = params.M;
        require_M(M, "benchmark_train");
        double sin_est[2] = {0.0, 0.0};
        const std::size_t before = out.trace.size();
        for (Axis axis : {Axis::horizontal, Axis::vertical})
        {
            int g = 1;
            switch (method)
            {
            case Method::hier_dft:
                g = binary_descent(sweep, M, [&](int m, int i)
                {
                    Codeword w = dft_codeword(cfg, axis, i, m);
                    w.id = beam_id("hdft", axis, m, i);
                    return w;
                });
                break;
            case Method::upa_partitioning:
                g = binary_descent(sweep, M, [&](int m, int i)
                {
                    Codeword w = partition_beam(cfg, axis, dft_beam_center(i, 1 << m), m);
                    w.id = beam_id("part", axis, m, i);
                    return w;
                });
                break;
            case Method::dft_sweep:
                g = 1 + static_cast<int>(best_of(sweep, std::size_t{1} << M, [&](std::size_t i)
                {
                    Codeword w = dft_codeword(cfg, axis, static_cast<int>(i) + 1, M);
                    w.id = beam_id("dft", axis, M, static_cast<int>(i) + 1);
                    return w;
                }));
                break;
            default:
                throw std::domain_error("benchmark_train: not a benchmark method");
            }
            sin_est[axis == Axis::horizontal ? 0 : 1] = dft_beam_center(g, 1 << M);
        }
        out.phase_names = {"direction", "refinement"};
        out.pilots_per_phase.push_back(out.trace.size() - before);

        const auto [gx, gz] = grid_direction_from_cosines(M, sin_est[0], sin_est[1]);
        out.grid_direction = std::pair{gx, gz};
        out.pilots_per_phase.push_back(refine(cfg, sweep, refinement_plan_window(M, gx, gz, params.k_set, cfg), out));
        return out;
    }

    namespace
    {
        template <typename Visit>
        void walk_grid(const ArrayConfig &cfg, double s, double half_angle_rad, Visit &&visit)
        {
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::domain_error("matching_grid: spacing must be positive");
            const double y_max = rayleigh_distance(cfg);
            const double t = std::tan(half_angle_rad);
            for (long j = 1; static_cast<double>(j) * s <= y_max; ++j)
            {
                const double y = static_cast<double>(j) * s;
                const long reach = static_cast<long>(std::floor(y * t / s));
                for (long i = -reach; i <= reach; ++i)
                    for (long l = -reach; l <= reach; ++l)
                    {
                        const Point3 p{static_cast<double>(i) * s, y, static_cast<double>(l) * s};
                        if (std::abs(p.x) < y * t && std::abs(p.z) < y * t && in_near_field(cfg, p))
                            visit(p);
                    }
            }
        }
    }

    std::vector<Point3> matching_grid(const ArrayConfig &cfg, double spacing_m, double half_angle_rad)
    {
        std::vector<Point3> out;
        walk_grid(cfg, spacing_m, half_angle_rad, [&](const Point3 &p) { out.push_back(p); });
        return out;
    }

    std::size_t matching_grid_size(const ArrayConfig &cfg, double spacing_m, double half_angle_rad)
    {
        std::size_t n = 0;
        walk_grid(cfg, spacing_m, half_angle_rad, [&](const Point3 &) { ++n; });
        return n;
    }

    GridCalibration calibrate_grid_spacing(const ArrayConfig &cfg, std::size_t target_count, double half_angle_rad)
    {
        if (target_count < 1)
            throw std::domain_error("calibrate_grid_spacing: target must be >= 1");

        // count ~ volume / s^3; bracket around the estimate
        const double probe = rayleigh_distance(cfg) / 20.0;
        const double probe_count = static_cast<double>(std::max<std::size_t>(1, matching_grid_size(cfg, probe, half_angle_rad)));
        const double guess = probe * std::cbrt(probe_count / static_cast<double>(target_count));
        double lo = guess / 2.0; // more points than target
        double hi = guess * 2.0; // fewer points than target
        std::size_t n_lo = matching_grid_size(cfg, lo, half_angle_rad);
        std::size_t n_hi = matching_grid_size(cfg, hi, half_angle_rad);
        while (n_lo < target_count && lo > 1e-6)
            n_lo = matching_grid_size(cfg, lo /= 2.0, half_angle_rad);
        while (n_hi > target_count)
            n_hi = matching_grid_size(cfg, hi *= 2.0, half_angle_rad);

        for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            const std::size_t n = matching_grid_size(cfg, mid, half_angle_rad);
            if (n == target_count)
                return {mid, n};
            if (n > target_count)
            {
                lo = mid;
                n_lo = n;
            }
            else
            {
                hi = mid;
                n_hi = n;
            }
        }
        const auto gap = [&](std::size_t n) { return n > target_count ? n - target_count : target_count - n; };
        return gap(n_lo) <= gap(n_hi) ? GridCalibration{lo, n_lo} : GridCalibration{hi, n_hi};
    }
}
