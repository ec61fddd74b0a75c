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

#include "nfbeam/experiments.hpp"
#include "nfbeam/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace nfbeam
{
    using nlohmann::json;

    namespace
    {
        // Neumaier summation, order-fixed so results do not depend on the worker count
        double stable_sum(const std::vector<double> &v)
        {
            double sum = 0.0;
            double c = 0.0;
            for (double x : v)
            {
                const double t = sum + x;
                c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
                sum = t;
            }
            return sum + c;
        }

        double quantile(std::vector<double> v, double q)
        {
            if (v.empty())
                return std::numeric_limits<double>::quiet_NaN();
            std::sort(v.begin(), v.end());
            const std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
            return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
        }

        std::string format_db(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        std::string hex64(std::uint64_t v)
        {
            char buf[20];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }
    }

    Point3 UeSampler::sample(Engine &eng) const
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double y = kind == Kind::plane ? y_plane : y_lo + (y_hi - y_lo) * unit(eng);
        const double edge = y * std::tan(half_angle_rad);
        const double x = (2.0 * unit(eng) - 1.0) * edge;
        const double z = (2.0 * unit(eng) - 1.0) * edge;
        return {x, y, z};
    }

    void UeSampler::validate() const
    {
        if (!(half_angle_rad > 0.0 && half_angle_rad < std::numbers::pi / 2.0))
            throw std::domain_error("UE sampler: half angle must be in (0, pi/2)");
        if (kind == Kind::plane)
        {
            if (!(y_plane > 0.0) || !std::isfinite(y_plane))
                throw std::domain_error("UE sampler: plane depth must be positive");
        }
        else if (!(y_lo > 0.0) || !(y_hi > y_lo) || !std::isfinite(y_hi))
            throw std::domain_error("UE sampler: depth bounds must be positive and ordered");
    }

    UeSampler UeSampler::plane(double y, double half_angle_rad)
    {
        UeSampler s;
        s.kind = Kind::plane;
        s.y_plane = y;
        s.half_angle_rad = half_angle_rad;
        return s;
    }

    UeSampler UeSampler::depth_range(double lo, double hi, double half_angle_rad)
    {
        UeSampler s;
        s.kind = Kind::depth_range;
        s.y_lo = lo;
        s.y_hi = hi;
        s.half_angle_rad = half_angle_rad;
        return s;
    }

    double interpolated_depth(const ArrayConfig &cfg, double k)
    {
        return (1.0 - k) * fresnel_distance(cfg) + k * rayleigh_distance(cfg);
    }

    void ExperimentSpec::validate() const
    {
        (void)array();
        if (trials < 1)
            throw std::domain_error("experiment: trials must be >= 1");
        if (M < 1 || M > 30)
            throw std::domain_error("experiment: M must be in 1..30");
        if (ref_snr_db.empty())
            throw std::domain_error("experiment: at least one reference SNR is required");
        if (nlos_paths < 0)
            throw std::domain_error("experiment: NLOS path count must be >= 0");
        if (k_set.empty() || benchmark_k_set.empty())
            throw std::domain_error("experiment: ring sets must not be empty");
        if (grid_spacing_m < 0.0)
            throw std::domain_error("experiment: grid spacing must be >= 0");
        ue.validate();
    }

    std::string spec_to_json(const ExperimentSpec &spec)
    {
        json j;
        j["scenario"] = spec.scenario;
        j["nx"] = spec.n_x;
        j["nz"] = spec.n_z;
        j["carrier_hz"] = spec.carrier_hz;
        j["method"] = to_string(spec.method);
        j["M"] = spec.M;
        j["k_set"] = spec.k_set;
        j["benchmark_k_set"] = spec.benchmark_k_set;
        j["ue"] = {{"kind", spec.ue.kind == UeSampler::Kind::plane ? "plane" : "depth-range"},
                   {"y_plane", spec.ue.y_plane},
                   {"y_lo", spec.ue.y_lo},
                   {"y_hi", spec.ue.y_hi},
                   {"half_angle_rad", spec.ue.half_angle_rad}};
        j["ref_snr_db"] = spec.ref_snr_db;
        j["trials"] = spec.trials;
        j["seed"] = spec.seed;
        j["rician_db"] = spec.rician_db;
        j["nlos_paths"] = spec.nlos_paths;
        j["grid_spacing_m"] = spec.grid_spacing_m;
        j["grid_target"] = spec.grid_target;
        return j.dump();
    }

    std::uint64_t fnv1a64(std::string_view data)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : data)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    void ResultTable::write_csv(std::ostream &os) const
    {
        os << "scenario,metric,value,n,stderr\n";
        char buf[64];
        for (const ResultRow &r : rows)
        {
            os << r.scenario << ',' << r.metric << ',';
            std::snprintf(buf, sizeof buf, "%.10g", r.value);
            os << buf << ',' << r.n << ',';
            std::snprintf(buf, sizeof buf, "%.10g", r.dispersion);
            os << buf << '\n';
        }
    }

    std::string ResultTable::metadata_json() const
    {
        json j;
        j["seed"] = seed;
        j["spec"] = spec_json.empty() ? json::object() : json::parse(spec_json);
        j["spec_hash"] = hex64(fnv1a64(spec_json));
        json n = json::object();
        for (const auto &[k, v] : notes)
            n[k] = v;
        j["notes"] = n;
        return j.dump(2);
    }

    const ResultRow *ResultTable::find(std::string_view scenario, std::string_view metric) const
    {
        for (const ResultRow &r : rows)
            if (r.scenario == scenario && r.metric == metric)
                return &r;
        return nullptr;
    }

    void write_result(const ResultTable &table, const std::filesystem::path &path)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream csv(path);
        if (!csv)
            throw std::runtime_error("cannot write " + path.string());
        table.write_csv(csv);
        std::ofstream meta(path.string() + ".json");
        if (!meta)
            throw std::runtime_error("cannot write " + path.string() + ".json");
        meta << table.metadata_json() << '\n';
    }

    std::vector<Point3> rect_focal_set(const ArrayConfig &cfg, const std::vector<int> &kx, const std::vector<int> &kz,
                                       double k_y)
    {
        std::vector<double> xs, zs;
        for (int k : kx)
        {
            xs.push_back(-0.5 * k * cfg.aperture_x());
            xs.push_back(0.5 * k * cfg.aperture_x());
        }
        for (int k : kz)
        {
            zs.push_back(-0.5 * k * cfg.aperture_z());
            zs.push_back(0.5 * k * cfg.aperture_z());
        }
        std::sort(xs.begin(), xs.end());
        std::sort(zs.begin(), zs.end());
        std::vector<Point3> out;
        for (double x : xs)
            for (double z : zs)
                out.push_back({x, -k_y * cfg.aperture_x(), z});
        return out;
    }

    std::vector<Point3> line_focal_set(const ArrayConfig &cfg, const std::vector<int> &kx, double k_y)
    {
        std::vector<double> xs;
        for (int k : kx)
        {
            xs.push_back(-0.5 * k * cfg.aperture_x());
            xs.push_back(0.5 * k * cfg.aperture_x());
        }
        std::sort(xs.begin(), xs.end());
        std::vector<Point3> out;
        for (double x : xs)
            out.push_back({x, -k_y * cfg.aperture_x(), 0.0});
        return out;
    }

    AccuracyResult identification_accuracy(const ArrayConfig &cfg, const std::vector<Point3> &focal_points,
                                           RegionKind kind, double y_plane, double gamma_db, std::size_t trials,
                                           std::uint64_t seed, unsigned workers, double half_angle_rad)
    {
        if (focal_points.empty())
            throw std::domain_error("identification_accuracy: focal point set is empty");
        if (trials < 1)
            throw std::domain_error("identification_accuracy: trials must be >= 1");
        const UeSampler sampler = UeSampler::plane(y_plane, half_angle_rad);
        sampler.validate();

        auto member = [&](std::size_t i, const Point3 &p)
        {
            return kind == RegionKind::frustum_rect ? rect_region_contains(cfg, focal_points[i], p)
                                                    : shell_region_contains(cfg, focal_points[i], Axis::horizontal, p);
        };
        auto covered = [&](const Point3 &p)
        {
            for (std::size_t i = 0; i < focal_points.size(); ++i)
                if (member(i, p))
                    return true;
            return false;
        };

        Engine cov = make_engine(seed, streams::coverage);
        for (int i = 0; i < 10000; ++i)
            if (!covered(sampler.sample(cov)))
                throw PreconditionError("identification_accuracy: the regions do not cover the UE plane");

        std::vector<Codeword> book;
        book.reserve(focal_points.size());
        for (const Point3 &v : focal_points)
            book.push_back(kind == RegionKind::frustum_rect
                               ? diverging_codeword(cfg, v)
                               : axis_restricted_diverging_codeword(cfg, v, Axis::horizontal));

        const double sigma2 = std::pow(10.0, -gamma_db / 10.0);
        std::vector<unsigned char> hit(trials, 0);
        parallel_for(trials, workers, [&](std::size_t t)
        {
            Engine eng = make_engine(seed, streams::ue, t);
            const Point3 p = sampler.sample(eng);
            const CVector h = steering_vector(cfg, p);
            NoiseStream noise(seed, t, sigma2);
            std::size_t best = 0;
            double best_power = -1.0;
            for (std::size_t i = 0; i < book.size(); ++i)
            {
                const double power = std::norm(transpose_product(h, book[i].weights) + noise.next());
                if (power > best_power)
                {
                    best_power = power;
                    best = i;
                }
            }
            hit[t] = member(best, p) ? 1 : 0;
        });

        AccuracyResult r;
        r.trials = trials;
        r.correct = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
        r.probability = static_cast<double>(r.correct) / static_cast<double>(trials);
        r.standard_error = std::sqrt(r.probability * (1.0 - r.probability) / static_cast<double>(trials));
        return r;
    }

    std::vector<Point3> spec_matching_grid(const ExperimentSpec &spec, double *spacing_out)
    {
        const ArrayConfig cfg = spec.array();
        double s = spec.grid_spacing_m;
        if (s <= 0.0)
            s = calibrate_grid_spacing(cfg, spec.grid_target, spec.ue.half_angle_rad).spacing_m;
        if (spacing_out)
            *spacing_out = s;
        return matching_grid(cfg, s, spec.ue.half_angle_rad);
    }

    TrainingOutcome run_method(const ArrayConfig &cfg, const ExperimentSpec &spec, const PilotOracle &oracle,
                               const std::vector<Point3> &grid)
    {
        switch (spec.method)
        {
        case Method::two_phase:
            return two_phase_train(cfg, oracle, spec.M, spec.k_set);
        case Method::three_phase:
            return three_phase_train(cfg, oracle, spec.M, spec.k_set, spec.ue.half_angle_rad);
        default:
            break;
        }
        BenchmarkParams params;
        params.M = spec.M;
        params.k_set = spec.benchmark_k_set;
        if (spec.method == Method::grid_matching)
            params.grid = grid;
        return benchmark_train(cfg, oracle, spec.method, params);
    }

    namespace
    {
        ChannelParams channel_params(const ExperimentSpec &spec, double ref_snr_db)
        {
            ChannelParams p;
            p.rician_db = spec.rician_db;
            p.nlos_paths = spec.nlos_paths;
            p.ref_snr_db = ref_snr_db;
            p.reference = SnrReference::total;
            p.half_angle_rad = spec.ue.half_angle_rad;
            return p;
        }

        std::string snr_scenario(const ExperimentSpec &spec, double snr)
        {
            return spec.scenario + "/" + to_string(spec.method) + "/ref=" + format_db(snr) + "dB";
        }

        void stamp(ResultTable &table, const ExperimentSpec &spec)
        {
            table.seed = spec.seed;
            table.spec_json = spec_to_json(spec);
            table.notes.emplace_back("snr_reference", "total: sum_l |g_l|^2 / sigma^2");
            table.notes.emplace_back("nlos_geometry",
                                     "scatterers uniform in volume over the serving region between the Fresnel and "
                                     "Rayleigh depths; gains circular normal rescaled to the Rician factor");
            table.notes.emplace_back("rf_chains", std::to_string(rf_chains(spec.method, spec.array())));
        }
    }

    SweepResult snr_loss_sweep(const ExperimentSpec &spec)
    {
        spec.validate();
        const ArrayConfig cfg = spec.array();
        double spacing = 0.0;
        const std::vector<Point3> grid =
            spec.method == Method::grid_matching ? spec_matching_grid(spec, &spacing) : std::vector<Point3>{};

        const std::size_t S = spec.ref_snr_db.size();
        const std::size_t T = spec.trials;
        SweepResult result;
        result.records.resize(S * T);

        parallel_for(T, spec.workers, [&](std::size_t t)
        {
            Engine eng = make_engine(spec.seed, streams::ue, t);
            const Point3 ue = spec.ue.sample(eng);
            MultipathChannel ch =
                sample_channel(cfg, ue, channel_params(spec, std::numeric_limits<double>::infinity()), spec.seed, t);
            const CVector h = channel_vector(cfg, ch);
            for (std::size_t s = 0; s < S; ++s)
            {
                ch.noise_power = ch.total_power() / std::pow(10.0, spec.ref_snr_db[s] / 10.0);
                const PilotOracle oracle = oracle_from_channel(cfg, ch, spec.seed, t * 64 + s);
                const TrainingOutcome out = run_method(cfg, spec, oracle, grid);
                TrialRecord &r = result.records[s * T + t];
                r.ref_snr_db = spec.ref_snr_db[s];
                r.trial = t;
                r.ue = ue;
                r.loss_db = snr_metrics(cfg, ch, h, out.chosen).snr_loss_db;
                r.pilots = out.total_pilots();
            }
        });

        ResultTable &table = result.table;
        stamp(table, spec);
        if (spec.method == Method::grid_matching)
            table.notes.emplace_back("grid_spacing_m", format_db(spacing));
        const double floor_db = rician_loss_floor_db(spec.rician_db);
        for (std::size_t s = 0; s < S; ++s)
        {
            std::vector<double> loss(T), pilots(T);
            for (std::size_t t = 0; t < T; ++t)
            {
                loss[t] = result.records[s * T + t].loss_db;
                pilots[t] = static_cast<double>(result.records[s * T + t].pilots);
            }
            const Summary ls = summarize(loss);
            const Summary ps = summarize(pilots);
            const std::string sc = snr_scenario(spec, spec.ref_snr_db[s]);
            table.rows.push_back({sc, "mean_loss_db", ls.mean, T, ls.stddev});
            table.rows.push_back({sc, "median_loss_db", quantile(loss, 0.5), T, ls.stddev});
            table.rows.push_back({sc, "p90_loss_db", quantile(loss, 0.9), T, ls.stddev});
            table.rows.push_back({sc, "loss_floor_db", floor_db, T, 0.0});
            table.rows.push_back({sc, "mean_pilots", ps.mean, T, ps.stddev});
        }
        return result;
    }

    ResultTable bin_losses(const SweepResult &sweep, BinAxis axis, const std::vector<double> &edges)
    {
        if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
            throw std::domain_error("bin_losses: need at least two ascending edges");
        ResultTable table = sweep.table;
        table.rows.clear();

        std::vector<double> snrs;
        for (const TrialRecord &r : sweep.records)
            if (std::find(snrs.begin(), snrs.end(), r.ref_snr_db) == snrs.end())
                snrs.push_back(r.ref_snr_db);

        for (double snr : snrs)
            for (std::size_t b = 0; b + 1 < edges.size(); ++b)
            {
                std::vector<double> loss;
                for (const TrialRecord &r : sweep.records)
                {
                    if (r.ref_snr_db != snr)
                        continue;
                    const DirectionTriplet d = direction_from_point(r.ue);
                    const double key = axis == BinAxis::depth
                                           ? r.ue.y
                                           : std::max(std::abs(d.phi_rad), std::abs(d.theta_rad)) * 180.0 /
                                                 std::numbers::pi;
                    if (key >= edges[b] && key < edges[b + 1])
                        loss.push_back(r.loss_db);
                }
                const Summary s = summarize(loss);
                char name[96];
                std::snprintf(name, sizeof name, "%s[%g,%g)", axis == BinAxis::depth ? "depth_m" : "max_angle_deg",
                              edges[b], edges[b + 1]);
                table.rows.push_back({"ref=" + format_db(snr) + "dB/" + name, "mean_loss_db", s.mean, s.n, s.stddev});
            }
        return table;
    }

    void write_trial_csv(std::ostream &os, const std::vector<TrialRecord> &records)
    {
        os << "ref_snr_db,trial,x_m,y_m,z_m,loss_db,pilots\n";
        char buf[192];
        for (const TrialRecord &r : records)
        {
            std::snprintf(buf, sizeof buf, "%g,%zu,%.9g,%.9g,%.9g,%.9g,%zu\n", r.ref_snr_db, r.trial, r.ue.x, r.ue.y,
                          r.ue.z, r.loss_db, r.pilots);
            os << buf;
        }
    }

    Summary summarize(const std::vector<double> &values)
    {
        Summary s;
        s.n = values.size();
        if (values.empty())
        {
            s.min = s.mean = s.max = s.stddev = std::numeric_limits<double>::quiet_NaN();
            return s;
        }
        s.min = *std::min_element(values.begin(), values.end());
        s.max = *std::max_element(values.begin(), values.end());
        s.mean = stable_sum(values) / static_cast<double>(s.n);
        if (s.n > 1)
        {
            std::vector<double> sq(values.size());
            for (std::size_t i = 0; i < values.size(); ++i)
                sq[i] = (values[i] - s.mean) * (values[i] - s.mean);
            s.stddev = std::sqrt(stable_sum(sq) / static_cast<double>(s.n - 1));
        }
        return s;
    }

    OverheadStats overhead_stats(const ExperimentSpec &spec)
    {
        spec.validate();
        const ArrayConfig cfg = spec.array();
        OverheadStats stats;
        stats.rf_chains = rf_chains(spec.method, cfg);

        if (spec.method == Method::grid_matching)
        {
            // The sweep size does not depend on the channel
            double spacing = spec.grid_spacing_m;
            if (spacing <= 0.0)
                spacing = calibrate_grid_spacing(cfg, spec.grid_target, spec.ue.half_angle_rad).spacing_m;
            const double n = static_cast<double>(matching_grid_size(cfg, spacing, spec.ue.half_angle_rad));
            stats.phase_names = {"grid"};
            stats.per_phase = {summarize(std::vector<double>(spec.trials, n))};
            stats.total = stats.per_phase.front();
            return stats;
        }

        const std::size_t T = spec.trials;
        std::vector<std::vector<std::size_t>> counts(T);
        std::vector<std::string> names;
        std::mutex names_mutex;
        parallel_for(T, spec.workers, [&](std::size_t t)
        {
            Engine eng = make_engine(spec.seed, streams::ue, t);
            const Point3 ue = spec.ue.sample(eng);
            const MultipathChannel ch = sample_channel(cfg, ue, channel_params(spec, spec.ref_snr_db.front()), spec.seed, t);
            const TrainingOutcome out = run_method(cfg, spec, oracle_from_channel(cfg, ch, spec.seed, t * 64), {});
            counts[t] = out.pilots_per_phase;
            std::lock_guard lock(names_mutex);
            if (names.empty())
                names = out.phase_names;
        });

        stats.phase_names = names;
        std::vector<double> total(T, 0.0);
        for (std::size_t p = 0; p < names.size(); ++p)
        {
            std::vector<double> v(T);
            for (std::size_t t = 0; t < T; ++t)
            {
                v[t] = static_cast<double>(counts[t][p]);
                total[t] += v[t];
            }
            stats.per_phase.push_back(summarize(v));
        }
        stats.total = summarize(total);
        return stats;
    }

    ResultTable overhead_report(const ExperimentSpec &spec)
    {
        const OverheadStats stats = overhead_stats(spec);
        ResultTable table;
        stamp(table, spec);
        const std::string sc = spec.scenario + "/" + to_string(spec.method);
        auto add = [&](const std::string &name, const Summary &s)
        {
            table.rows.push_back({sc, name + "_min", s.min, s.n, 0.0});
            table.rows.push_back({sc, name + "_mean", s.mean, s.n, s.stddev});
            table.rows.push_back({sc, name + "_max", s.max, s.n, 0.0});
        };
        for (std::size_t p = 0; p < stats.phase_names.size(); ++p)
            add("pilots_" + stats.phase_names[p], stats.per_phase[p]);
        add("pilots_total", stats.total);
        table.rows.push_back({sc, "rf_chains", static_cast<double>(stats.rf_chains), stats.total.n, 0.0});
        return table;
    }

    std::filesystem::path heatmap_export(const ArrayConfig &cfg, const Codeword &w, const HeatmapRequest &req,
                                         const std::filesystem::path &path)
    {
        const double hx = req.half_extent_x > 0.0 ? req.half_extent_x : req.y_plane;
        const double hz = req.half_extent_z > 0.0 ? req.half_extent_z : req.y_plane;
        const PlaneGrid grid = plane_field_sample(cfg, w, req.y_plane, hx, hz, req.resolution, req.workers);

        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot write " + path.string());
        char buf[32];
        os << "z\\x";
        for (double x : grid.xs)
        {
            std::snprintf(buf, sizeof buf, ",%.9g", x);
            os << buf;
        }
        os << '\n';
        for (std::size_t iz = 0; iz < grid.zs.size(); ++iz)
        {
            std::snprintf(buf, sizeof buf, "%.9g", grid.zs[iz]);
            os << buf;
            for (std::size_t ix = 0; ix < grid.xs.size(); ++ix)
            {
                std::snprintf(buf, sizeof buf, ",%.9g", grid.at(ix, iz));
                os << buf;
            }
            os << '\n';
        }
        if (!os)
            throw std::runtime_error("write failed for " + path.string());

        if (!req.region_focal)
            return {};
        const Point3 v = *req.region_focal;
        if (!(v.y < 0.0))
            throw std::domain_error("heatmap_export: region focal point must satisfy y < 0");

        std::filesystem::path bpath = path;
        bpath.replace_filename(path.stem().string() + "_boundary.csv");
        std::ofstream bs(bpath);
        if (!bs)
            throw std::runtime_error("cannot write " + bpath.string());
        bs << "curve,x_m,z_m\n";
        const double y = req.y_plane;
        const double ax = 0.5 * cfg.aperture_x();
        const double az = 0.5 * cfg.aperture_z();
        auto row = [&](const char *curve, double x, double z)
        {
            char line[96];
            std::snprintf(line, sizeof line, "%s,%.9g,%.9g\n", curve, x, z);
            bs << line;
        };
        if (req.region_kind == RegionKind::frustum_rect)
        {
            const double x_lo = (v.x + ax) * y / v.y - ax;
            const double x_hi = (v.x - ax) * y / v.y + ax;
            const double z_lo = (v.z + az) * y / v.y - az;
            const double z_hi = (v.z - az) * y / v.y + az;
            row("rect", x_lo, z_lo);
            row("rect", x_hi, z_lo);
            row("rect", x_hi, z_hi);
            row("rect", x_lo, z_hi);
            row("rect", x_lo, z_lo);
        }
        else
        {
            constexpr int steps = 200;
            for (const char *curve : {"lower", "upper"})
                for (int i = 0; i <= steps; ++i)
                {
                    const double z = -hz + 2.0 * hz * i / steps;
                    const double r = std::hypot(y, z);
                    const bool lower = curve[0] == 'l';
                    row(curve, lower ? (v.x + ax) * r / v.y - ax : (v.x - ax) * r / v.y + ax, z);
                }
        }
        return bpath;
    }
}
