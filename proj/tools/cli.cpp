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

#include "cli.hpp"

#include "nfbeam/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nfbeam::cli
{
    using nlohmann::json;
    namespace fs = std::filesystem;

#define NFBEAM_RUN_FIELDS(X)                                                                                           \
    X(preset)                                                                                                          \
    X(nx)                                                                                                              \
    X(nz)                                                                                                              \
    X(f_ghz)                                                                                                           \
    X(seed)                                                                                                            \
    X(out)                                                                                                             \
    X(workers)                                                                                                         \
    X(method)                                                                                                          \
    X(methods)                                                                                                         \
    X(M)                                                                                                               \
    X(k_set)                                                                                                           \
    X(benchmark_k_set)                                                                                                 \
    X(rician_db)                                                                                                       \
    X(paths)                                                                                                           \
    X(ref_snr_db)                                                                                                      \
    X(trials)                                                                                                          \
    X(y_lo)                                                                                                            \
    X(y_hi)                                                                                                            \
    X(half_angle_deg)                                                                                                  \
    X(grid_spacing_m)                                                                                                  \
    X(grid_target)                                                                                                     \
    X(kx)                                                                                                              \
    X(kz)                                                                                                              \
    X(ky)                                                                                                              \
    X(k_yhat)                                                                                                          \
    X(gamma_db)                                                                                                        \
    X(region)                                                                                                          \
    X(ue)                                                                                                              \
    X(trace)                                                                                                           \
    X(codeword)                                                                                                        \
    X(point)                                                                                                           \
    X(y_plane)                                                                                                         \
    X(resolution)                                                                                                      \
    X(phi_deg)                                                                                                         \
    X(theta_deg)                                                                                                       \
    X(samples)                                                                                                         \
    X(bin_by)                                                                                                          \
    X(bin_edges)

    void RunConfig::merge(const RunConfig &over)
    {
#define NFBEAM_MERGE(f)                                                                                                \
    if (over.f)                                                                                                        \
        f = over.f;
        NFBEAM_RUN_FIELDS(NFBEAM_MERGE)
#undef NFBEAM_MERGE
    }

    std::string to_json(const RunConfig &cfg)
    {
        json j = json::object();
#define NFBEAM_TO_JSON(f)                                                                                              \
    if (cfg.f)                                                                                                         \
        j[#f] = *cfg.f;
        NFBEAM_RUN_FIELDS(NFBEAM_TO_JSON)
#undef NFBEAM_TO_JSON
        return j.dump();
    }

    namespace
    {
        std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte)
        {
            std::size_t line = 1, col = 1;
            for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            return {line, col};
        }
    }

    RunConfig parse_config(std::string_view text, std::string_view origin)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            const auto [line, col] = line_column(text, e.byte);
            throw UsageError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                             ": malformed JSON: " + e.what());
        }
        if (!j.is_object())
            throw UsageError(std::string(origin) + ": config must be a JSON object");

        RunConfig cfg;
        for (const auto &[key, value] : j.items())
        {
            bool known = false;
            try
            {
#define NFBEAM_FROM_JSON(f)                                                                                            \
    if (key == #f)                                                                                                     \
    {                                                                                                                  \
        cfg.f = value.get<typename decltype(cfg.f)::value_type>();                                                     \
        known = true;                                                                                                  \
    }
                NFBEAM_RUN_FIELDS(NFBEAM_FROM_JSON)
#undef NFBEAM_FROM_JSON
            }
            catch (const json::exception &e)
            {
                throw UsageError(std::string(origin) + ": config key '" + key + "' has the wrong type: " + e.what());
            }
            if (!known)
                throw UsageError(std::string(origin) + ": unknown config key '" + key + "'");
        }
        return cfg;
    }

    RunConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw UsageError("cannot open config file " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), path);
    }

    namespace
    {
        RunConfig array_preset(int nx, int nz, int M, std::vector<int> k_set, double y_lo, double y_hi)
        {
            RunConfig c;
            c.nx = nx;
            c.nz = nz;
            c.f_ghz = 28.0;
            c.M = M;
            c.k_set = std::move(k_set);
            c.benchmark_k_set = std::vector<int>{1, 2, 3, 4, 5, 6};
            c.rician_db = 13.0;
            c.paths = 8;
            c.y_lo = y_lo;
            c.y_hi = y_hi;
            c.half_angle_deg = 45.0;
            return c;
        }

        std::vector<double> snr_grid() { return {0, 5, 10, 15, 20, 25, 30, 35, 40}; }
    }

    std::optional<RunConfig> preset(std::string_view name)
    {
        RunConfig c;
        if (name == "fig5" || name == "fig6" || name == "table3")
        {
            c = array_preset(64, 64, 9, {1, 3, 5}, 2.0, 42.5);
            c.ref_snr_db = std::vector<double>{15.0, 35.0};
            if (name == "fig5")
            {
                c.bin_by = "depth";
                c.bin_edges = std::vector<double>{2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 42.5};
            }
            else if (name == "fig6")
            {
                c.bin_by = "angle";
                c.bin_edges = std::vector<double>{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0};
            }
            else
            {
                c.trials = 200;
                c.methods = std::vector<std::string>{"two-phase", "three-phase", "upa-partitioning", "hier-dft",
                                                     "dft-sweep", "grid-matching"};
            }
        }
        else if (name == "fig8a" || name == "fig10a")
        {
            c = array_preset(32, 32, 8, {1, 3}, 1.875, 11.25);
            c.ref_snr_db = snr_grid();
            c.grid_target = 15124;
        }
        else if (name == "fig8b" || name == "fig10b")
        {
            c = array_preset(64, 64, 9, {1, 3, 5}, 7.5, 45.0);
            c.ref_snr_db = snr_grid();
        }
        else if (name == "fig9a")
        {
            c = array_preset(16, 32, 8, {1, 3}, 1.25, 7.5);
            c.ref_snr_db = snr_grid();
            c.grid_target = 4940;
        }
        else if (name == "fig9b")
        {
            c = array_preset(32, 64, 9, {1, 3, 5}, 5.0, 30.0);
            c.ref_snr_db = snr_grid();
            c.grid_target = 39546;
        }
        else if (name == "table1" || name == "table2")
        {
            c.nx = 64;
            c.nz = name == "table1" ? 64 : 1;
            c.f_ghz = 28.0;
            c.kx = std::vector<int>{1};
            if (name == "table1")
                c.kz = std::vector<int>{1};
            c.ky = 1.0;
            c.k_yhat = std::vector<double>{0.0, 0.3, 0.7};
            c.gamma_db = std::vector<double>{10.0, 40.0};
            c.trials = 2000;
            c.region = name == "table1" ? "rect" : "shell";
        }
        else
            return std::nullopt;
        if (name == "fig10a" || name == "fig10b")
            c.half_angle_deg = 60.0;
        c.preset = std::string(name);
        return c;
    }

    std::vector<std::string> preset_names()
    {
        return {"fig5", "fig6", "fig8a", "fig8b", "fig9a", "fig9b", "fig10a", "fig10b", "table1", "table2", "table3"};
    }

    namespace
    {
        constexpr double kDeg = std::numbers::pi / 180.0;

        // Resolved view over a layered RunConfig
        struct Settings
        {
            RunConfig c;

            ArrayConfig array() const { return {c.nx.value_or(64), c.nz.value_or(64), c.f_ghz.value_or(28.0) * 1e9}; }

            std::uint64_t seed() const
            {
                if (!c.seed)
                    throw UsageError("--seed is required for stochastic subcommands");
                return *c.seed;
            }

            double half_angle() const { return c.half_angle_deg.value_or(45.0) * kDeg; }

            fs::path out_dir() const
            {
                if (c.out)
                    return *c.out;
                if (const char *env = std::getenv("NFBEAM_OUTPUT_DIR"); env && *env)
                    return env;
                return ".";
            }

            Method method(const std::string &name) const
            {
                const auto m = parse_method(name);
                if (!m)
                    throw UsageError("unknown method '" + name + "'");
                return *m;
            }

            ExperimentSpec spec(Method m, std::size_t default_trials) const
            {
                const ArrayConfig cfg = array();
                ExperimentSpec s;
                s.scenario = c.preset.value_or("custom");
                s.n_x = cfg.n_x();
                s.n_z = cfg.n_z();
                s.carrier_hz = cfg.carrier_hz();
                s.method = m;
                s.M = c.M.value_or(9);
                s.k_set = c.k_set.value_or(std::vector<int>{1, 3, 5});
                s.benchmark_k_set = c.benchmark_k_set.value_or(std::vector<int>{1, 2, 3, 4, 5, 6});
                s.ue = UeSampler::depth_range(c.y_lo.value_or(fresnel_distance(cfg)),
                                              c.y_hi.value_or(rayleigh_distance(cfg)), half_angle());
                s.ref_snr_db = c.ref_snr_db.value_or(std::vector<double>{35.0});
                s.trials = c.trials.value_or(default_trials);
                s.seed = seed();
                s.rician_db = c.rician_db.value_or(13.0);
                s.nlos_paths = c.paths.value_or(8);
                s.grid_spacing_m = c.grid_spacing_m.value_or(0.0);
                s.grid_target = c.grid_target.value_or(125020);
                s.workers = c.workers.value_or(0);
                try
                {
                    s.validate();
                }
                catch (const std::domain_error &e)
                {
                    throw UsageError(e.what());
                }
                return s;
            }
        };

        std::ofstream open_out(const fs::path &path)
        {
            if (path.has_parent_path())
                fs::create_directories(path.parent_path());
            std::ofstream os(path);
            if (!os)
                throw std::runtime_error("cannot write " + path.string());
            return os;
        }

        Point3 point_from(const std::vector<double> &v, const char *what)
        {
            if (v.size() != 3)
                throw UsageError(std::string(what) + " needs three comma-separated numbers x,y,z");
            return {v[0], v[1], v[2]};
        }

        int run_nf_region(const Settings &s, std::ostream &out)
        {
            const ArrayConfig cfg = s.array();
            char buf[160];
            auto line = [&](const char *key, double v)
            {
                std::snprintf(buf, sizeof buf, "%s: %.6g\n", key, v);
                out << buf;
            };
            out << "array: " << cfg.n_x() << "x" << cfg.n_z() << " at " << cfg.carrier_hz() / 1e9 << " GHz\n";
            line("wavelength_m", cfg.wavelength());
            line("aperture_x_m", cfg.aperture_x());
            line("aperture_z_m", cfg.aperture_z());
            line("diagonal_m", cfg.diagonal());
            line("rayleigh_distance_m", rayleigh_distance(cfg));
            line("fresnel_distance_m", fresnel_distance(cfg));
            line("nf_boundary_m",
                 nf_boundary_distance(cfg, s.c.phi_deg.value_or(0.0) * kDeg, s.c.theta_deg.value_or(0.0) * kDeg));
            if (s.c.samples.value_or(0) > 0)
                line("nf_volume_fraction", nf_volume_fraction(cfg, *s.c.samples, s.seed(), s.c.workers.value_or(0)));
            return 0;
        }

        int run_field(const Settings &s, std::ostream &out)
        {
            const ArrayConfig cfg = s.array();
            const std::string kind = s.c.codeword.value_or("diverging");
            const Point3 p = s.c.point ? point_from(*s.c.point, "--point")
                                       : virtual_focal_point(cfg, FrustumIndex{1, 1, 1});

            HeatmapRequest req;
            req.y_plane = s.c.y_plane.value_or(3.0 * cfg.diagonal());
            req.resolution = s.c.resolution.value_or(256);
            req.workers = s.c.workers.value_or(0);

            Codeword w;
            if (kind == "diverging")
            {
                w = diverging_codeword(cfg, p);
                req.region_focal = p;
            }
            else if (kind == "focusing")
                w = focusing_codeword(cfg, p);
            else if (kind == "axis-hor")
            {
                w = axis_restricted_diverging_codeword(cfg, p, Axis::horizontal);
                req.region_focal = p;
                req.region_kind = RegionKind::shell;
            }
            else if (kind == "axis-ver")
                w = axis_restricted_diverging_codeword(cfg, p, Axis::vertical);
            else
                throw UsageError("unknown codeword kind '" + kind + "' (diverging, focusing, axis-hor, axis-ver)");

            const fs::path path = s.out_dir() / "field.csv";
            const fs::path boundary = heatmap_export(cfg, w, req, path);
            out << "wrote " << path.string() << '\n';
            if (!boundary.empty())
                out << "wrote " << boundary.string() << '\n';
            return 0;
        }

        int run_accuracy(const Settings &s, std::ostream &out)
        {
            const ArrayConfig cfg = s.array();
            const std::string region = s.c.region.value_or(cfg.n_z() == 1 ? "shell" : "rect");
            if (region != "rect" && region != "shell")
                throw UsageError("--region must be rect or shell");
            const RegionKind kind = region == "rect" ? RegionKind::frustum_rect : RegionKind::shell;
            const std::vector<int> kx = s.c.kx.value_or(std::vector<int>{1});
            const double ky = s.c.ky.value_or(1.0);
            const std::vector<Point3> V = kind == RegionKind::frustum_rect
                                              ? rect_focal_set(cfg, kx, s.c.kz.value_or(std::vector<int>{1}), ky)
                                              : line_focal_set(cfg, kx, ky);
            const std::size_t trials = s.c.trials.value_or(2000);
            const std::uint64_t seed = s.seed();

            ResultTable table;
            table.seed = seed;
            table.spec_json = to_json(s.c);
            table.notes.emplace_back("snr_reference", "LOS only: |g_0|^2 / sigma^2");
            for (double k : s.c.k_yhat.value_or(std::vector<double>{0.0, 0.3, 0.7}))
                for (double g : s.c.gamma_db.value_or(std::vector<double>{10.0, 40.0}))
                {
                    const double y = interpolated_depth(cfg, k);
                    const AccuracyResult r =
                        identification_accuracy(cfg, V, kind, y, g, trials, seed, s.c.workers.value_or(0), s.half_angle());
                    char sc[128];
                    std::snprintf(sc, sizeof sc, "%s/k_yhat=%g/gamma=%gdB", s.c.preset.value_or("custom").c_str(), k, g);
                    table.rows.push_back({sc, "accuracy", r.probability, r.trials, r.standard_error});
                }
            const fs::path path = s.out_dir() / "accuracy.csv";
            write_result(table, path);
            table.write_csv(out);
            return 0;
        }

        int run_train(const Settings &s, std::ostream &out)
        {
            if (!s.c.ue)
                throw UsageError("--ue x,y,z is required");
            const Point3 ue = point_from(*s.c.ue, "--ue");
            const Method m = s.method(s.c.method.value_or("two-phase"));
            const ExperimentSpec spec = s.spec(m, 1);
            const ArrayConfig cfg = spec.array();

            ChannelParams params;
            params.rician_db = spec.rician_db;
            params.nlos_paths = spec.nlos_paths;
            params.ref_snr_db = spec.ref_snr_db.front();
            params.half_angle_rad = spec.ue.half_angle_rad;
            const MultipathChannel ch = sample_channel(cfg, ue, params, spec.seed);
            const std::vector<Point3> grid = m == Method::grid_matching ? spec_matching_grid(spec) : std::vector<Point3>{};
            const TrainingOutcome outcome = run_method(cfg, spec, oracle_from_channel(cfg, ch, spec.seed), grid);
            const SnrMetrics snr = snr_metrics(cfg, ch, outcome.chosen);

            json j = json::parse(outcome_to_json(outcome, s.c.trace.value_or(false)));
            j["seed"] = spec.seed;
            j["ue"] = {ue.x, ue.y, ue.z};
            j["ref_snr_db"] = params.ref_snr_db;
            j["snr_loss_db"] = snr.snr_loss_db;
            j["achieved_snr_db"] = 10.0 * std::log10(snr.achieved_snr);
            j["rf_chains"] = rf_chains(m, cfg);
            out << j.dump(2) << '\n';
            return 0;
        }

        std::vector<std::string> method_list(const Settings &s, std::vector<std::string> fallback)
        {
            if (s.c.methods)
                return *s.c.methods;
            if (s.c.method)
                return {*s.c.method};
            return fallback;
        }

        int run_sweep(const Settings &s, std::ostream &out)
        {
            std::optional<BinAxis> axis;
            if (s.c.bin_by)
            {
                if (*s.c.bin_by == "depth")
                    axis = BinAxis::depth;
                else if (*s.c.bin_by == "angle")
                    axis = BinAxis::max_angle;
                else
                    throw UsageError("--bin-by must be depth or angle");
                if (!s.c.bin_edges || s.c.bin_edges->size() < 2)
                    throw UsageError("--bin-by needs --bin-edges with at least two values");
            }
            for (const std::string &name : method_list(s, {"two-phase"}))
            {
                const ExperimentSpec spec = s.spec(s.method(name), 500);
                const SweepResult r = snr_loss_sweep(spec);
                const fs::path dir = s.out_dir();
                write_result(r.table, dir / ("sweep_" + name + ".csv"));
                std::ofstream trials = open_out(dir / ("sweep_" + name + "_trials.csv"));
                write_trial_csv(trials, r.records);
                if (axis)
                    write_result(bin_losses(r, *axis, *s.c.bin_edges), dir / ("sweep_" + name + "_bins.csv"));
                r.table.write_csv(out);
            }
            return 0;
        }

        int run_overhead(const Settings &s, std::ostream &out)
        {
            ResultTable all;
            for (const std::string &name : method_list(s, {"two-phase", "three-phase", "upa-partitioning",
                                                           "hier-dft", "dft-sweep"}))
            {
                const ResultTable t = overhead_report(s.spec(s.method(name), 200));
                if (all.rows.empty())
                {
                    all.seed = t.seed;
                    all.spec_json = to_json(s.c);
                }
                all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
            }
            write_result(all, s.out_dir() / "overhead.csv");
            all.write_csv(out);
            return 0;
        }

        template <typename T>
        CLI::Option *opt(CLI::App *app, std::optional<T> &target, const std::string &name, const std::string &help)
        {
            return app->add_option_function<T>(name, [&target](const T &v) { target = v; }, help);
        }

        template <typename T>
        CLI::Option *list(CLI::App *app, std::optional<std::vector<T>> &target, const std::string &name,
                          const std::string &help)
        {
            return app->add_option_function<std::vector<T>>(name, [&target](const std::vector<T> &v) { target = v; },
                                                            help)
                ->delimiter(',');
        }
    }

    int parse_and_dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Near-field beam training for uniform planar arrays"};
        app.name("nfbeam");
        app.require_subcommand(1, 1);

        RunConfig flags;
        std::string config_path;

        auto common = [&](CLI::App *sub)
        {
            sub->add_option("--config", config_path, "JSON config file; flags override its values");
            opt(sub, flags.preset, "--preset", "Scenario preset (" + [] {
                std::string s;
                for (const auto &n : preset_names())
                    s += (s.empty() ? "" : ", ") + n;
                return s;
            }() + ")");
            opt(sub, flags.nx, "--nx", "Antennas along x");
            opt(sub, flags.nz, "--nz", "Antennas along z");
            opt(sub, flags.f_ghz, "--f-ghz", "Carrier frequency [GHz]");
            opt(sub, flags.seed, "--seed", "Random seed");
            opt(sub, flags.out, "--out", "Output directory (default: $NFBEAM_OUTPUT_DIR or .)");
            opt(sub, flags.workers, "--workers", "Worker threads (0 = hardware concurrency)");
        };
        auto scenario = [&](CLI::App *sub)
        {
            opt(sub, flags.M, "-M,--levels", "Hierarchy depth M");
            list(sub, flags.k_set, "--k-set", "Refinement rings of the proposed methods");
            list(sub, flags.benchmark_k_set, "--benchmark-k-set", "Refinement rings of the benchmarks");
            opt(sub, flags.rician_db, "--rician-db", "Rician factor [dB]");
            opt(sub, flags.paths, "--paths", "NLOS path count");
            list(sub, flags.ref_snr_db, "--ref-snr", "Reference SNR(s) [dB], total-power convention");
            opt(sub, flags.trials, "--trials", "Monte Carlo trials");
            opt(sub, flags.y_lo, "--y-lo", "Lower UE depth [m]");
            opt(sub, flags.y_hi, "--y-hi", "Upper UE depth [m]");
            opt(sub, flags.half_angle_deg, "--half-angle", "Serving region half angle [deg]");
            opt(sub, flags.grid_spacing_m, "--grid-spacing", "Grid matching spacing [m] (default: calibrated)");
            opt(sub, flags.grid_target, "--grid-target", "Grid matching target size for calibration");
        };

        CLI::App *field = app.add_subcommand("field", "Export a codeword's amplitude on a plane as CSV");
        common(field);
        opt(field, flags.codeword, "--codeword", "diverging, focusing, axis-hor or axis-ver");
        list(field, flags.point, "--point", "Focal point x,y,z [m]");
        opt(field, flags.y_plane, "--y-plane", "Plane depth [m]");
        opt(field, flags.resolution, "--resolution", "Cells per side");

        CLI::App *nf = app.add_subcommand("nf-region", "Near-field distances and volume fraction");
        common(nf);
        opt(nf, flags.phi_deg, "--phi-deg", "Azimuth projection angle for the boundary distance [deg]");
        opt(nf, flags.theta_deg, "--theta-deg", "Elevation projection angle for the boundary distance [deg]");
        opt(nf, flags.samples, "--samples", "Monte Carlo samples for the volume fraction (needs --seed)");

        CLI::App *acc = app.add_subcommand("accuracy", "Region identification accuracy");
        common(acc);
        list(acc, flags.kx, "--kx", "Focal offsets along x in units of D_x/2");
        list(acc, flags.kz, "--kz", "Focal offsets along z in units of D_z/2");
        opt(acc, flags.ky, "--ky", "Focal depth in units of D_x");
        list(acc, flags.k_yhat, "--k-yhat", "Plane depth between Fresnel (0) and Rayleigh (1)");
        list(acc, flags.gamma_db, "--gamma-db", "LOS reference SNR(s) [dB]");
        opt(acc, flags.trials, "--trials", "Trials per cell");
        opt(acc, flags.region, "--region", "rect or shell");
        opt(acc, flags.half_angle_deg, "--half-angle", "Serving region half angle [deg]");

        CLI::App *train = app.add_subcommand("train", "Run one training and print the outcome as JSON");
        common(train);
        scenario(train);
        opt(train, flags.method, "--method", "two-phase, three-phase, upa-partitioning, hier-dft, dft-sweep, grid-matching");
        list(train, flags.ue, "--ue", "UE position x,y,z [m]");
        train->add_flag_function("--trace", [&flags](std::int64_t n) { flags.trace = n > 0; }, "Include the pilot trace");

        CLI::App *sweep = app.add_subcommand("sweep", "SNR loss Monte Carlo sweep");
        common(sweep);
        scenario(sweep);
        opt(sweep, flags.method, "--method", "Training method");
        list(sweep, flags.methods, "--methods", "Several methods");
        opt(sweep, flags.bin_by, "--bin-by", "Also bin losses by depth or angle");
        list(sweep, flags.bin_edges, "--bin-edges", "Bin edges");

        CLI::App *over = app.add_subcommand("overhead", "Pilot overhead per phase");
        common(over);
        scenario(over);
        opt(over, flags.method, "--method", "Training method");
        list(over, flags.methods, "--methods", "Several methods");

        try
        {
            std::vector<std::string> args;
            for (int i = argc - 1; i > 0; --i)
                args.emplace_back(argv[i]);
            app.parse(args);
        }
        catch (const CLI::CallForHelp &)
        {
            out << app.help();
            return 0;
        }
        catch (const CLI::CallForAllHelp &)
        {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        }
        catch (const CLI::ParseError &e)
        {
            CLI::App *failed = &app;
            for (CLI::App *sub : app.get_subcommands())
                failed = sub;
            err << "error: " << e.what() << "\n\n" << failed->help();
            return e.get_exit_code() == 0 ? 0 : 2;
        }

        CLI::App *chosen = app.get_subcommands().front();

        try
        {
            RunConfig layered;
            RunConfig file = config_path.empty() ? RunConfig{} : load_config(config_path);
            const std::optional<std::string> preset_name = flags.preset ? flags.preset : file.preset;
            if (preset_name)
            {
                auto p = preset(*preset_name);
                if (!p)
                    throw UsageError("unknown preset '" + *preset_name + "'");
                layered = *p;
            }
            layered.merge(file);
            layered.merge(flags);
            layered.subcommand = chosen->get_name();

            Settings s{layered};
            if (chosen == nf)
                return run_nf_region(s, out);
            if (chosen == field)
                return run_field(s, out);
            if (chosen == acc)
                return run_accuracy(s, out);
            if (chosen == train)
                return run_train(s, out);
            if (chosen == sweep)
                return run_sweep(s, out);
            return run_overhead(s, out);
        }
        catch (const UsageError &e)
        {
            err << "error: " << e.what() << '\n';
            return 2;
        }
        catch (const std::invalid_argument &e)
        {
            err << "error: " << e.what() << '\n';
            return 2;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
    }
}
