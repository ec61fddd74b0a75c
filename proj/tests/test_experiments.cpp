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

#include "nfbeam/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace nfbeam;

namespace
{
    const ArrayConfig cfg64{64, 64, 28e9};
    const ArrayConfig cfg32{32, 32, 28e9};

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
    }

    std::filesystem::path scratch_dir(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("nfbeam_test_" + name);
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }

    ExperimentSpec small_spec(Method method)
    {
        ExperimentSpec s;
        s.scenario = "small";
        s.n_x = s.n_z = 32;
        s.M = 8;
        s.k_set = {1, 3};
        s.method = method;
        s.ue = UeSampler::depth_range(1.875, 11.25);
        s.ref_snr_db = {10.0, 30.0};
        s.trials = 16;
        s.seed = 77;
        return s;
    }
}

TEST(UeSamplerTest, SamplesInsideFootprint)
{
    Engine eng = make_engine(1, 1);
    const UeSampler s = UeSampler::depth_range(2.0, 5.0, std::numbers::pi / 3.0);
    for (int i = 0; i < 1000; ++i)
    {
        const Point3 p = s.sample(eng);
        EXPECT_GE(p.y, 2.0);
        EXPECT_LT(p.y, 5.0);
        EXPECT_LE(std::abs(p.x), p.y * std::tan(std::numbers::pi / 3.0));
    }
    const UeSampler plane = UeSampler::plane(3.0);
    EXPECT_EQ(plane.sample(eng).y, 3.0);
    EXPECT_THROW(UeSampler::depth_range(5.0, 2.0).validate(), std::domain_error);
    EXPECT_THROW(UeSampler::plane(-1.0).validate(), std::domain_error);
}

TEST(ScenarioTest, InterpolatedDepthAndFocalSets)
{
    EXPECT_DOUBLE_EQ(interpolated_depth(cfg64, 0.0), fresnel_distance(cfg64));
    EXPECT_DOUBLE_EQ(interpolated_depth(cfg64, 1.0), rayleigh_distance(cfg64));
    const double dx = cfg64.aperture_x();
    const auto rect = rect_focal_set(cfg64, {1}, {1}, 1.0);
    ASSERT_EQ(rect.size(), 4u);
    EXPECT_NEAR(rect[0].x, -dx / 2.0, 1e-15);
    EXPECT_NEAR(rect[0].y, -dx, 1e-15);
    EXPECT_NEAR(rect[0].z, -dx / 2.0, 1e-15);
    EXPECT_NEAR(rect[3].x, dx / 2.0, 1e-15);
    const auto line = line_focal_set(cfg64, {1, 3}, 2.0);
    ASSERT_EQ(line.size(), 4u);
    for (const Point3 &v : line)
    {
        EXPECT_EQ(v.z, 0.0);
        EXPECT_NEAR(v.y, -2.0 * dx, 1e-15);
    }
}

TEST(AccuracyTest, HighAccuracyNearFresnel)
{
    const auto V = rect_focal_set(cfg64, {1}, {1}, 1.0);
    const AccuracyResult r =
        identification_accuracy(cfg64, V, RegionKind::frustum_rect, interpolated_depth(cfg64, 0.0), 10.0, 400, 5);
    EXPECT_EQ(r.trials, 400u);
    EXPECT_GE(r.probability, 0.98);
    EXPECT_NEAR(r.standard_error, std::sqrt(r.probability * (1 - r.probability) / 400.0), 1e-15);
}

TEST(AccuracyTest, NoiselessIsAtLeastNoisy)
{
    const auto V = rect_focal_set(cfg64, {1}, {1}, 1.0);
    const double y = interpolated_depth(cfg64, 0.7);
    const double inf = std::numeric_limits<double>::infinity();
    const AccuracyResult noisy = identification_accuracy(cfg64, V, RegionKind::frustum_rect, y, 10.0, 1000, 9);
    const AccuracyResult clean = identification_accuracy(cfg64, V, RegionKind::frustum_rect, y, inf, 1000, 9);
    const AccuracyResult high = identification_accuracy(cfg64, V, RegionKind::frustum_rect, y, 40.0, 1000, 9);
    EXPECT_GE(clean.probability, noisy.probability);
    EXPECT_GE(high.probability, noisy.probability - 2.0 * noisy.standard_error);
}

TEST(AccuracyTest, ShellRegions)
{
    const ArrayConfig ula{64, 1, 28e9};
    const auto V = line_focal_set(ula, {1}, 1.0);
    const AccuracyResult r =
        identification_accuracy(ula, V, RegionKind::shell, interpolated_depth(ula, 0.3), 40.0, 400, 3);
    EXPECT_GE(r.probability, 0.97);
}

TEST(AccuracyTest, CoverageViolationIsRejected)
{
    auto V = rect_focal_set(cfg64, {1}, {1}, 1.0);
    V.pop_back();
    EXPECT_THROW(identification_accuracy(cfg64, V, RegionKind::frustum_rect, 5.0, 10.0, 10, 1), PreconditionError);
}

TEST(AccuracyTest, WorkerCountDoesNotChangeResult)
{
    const auto V = rect_focal_set(cfg32, {1}, {1}, 1.0);
    const AccuracyResult a = identification_accuracy(cfg32, V, RegionKind::frustum_rect, 3.0, 10.0, 500, 4, 1);
    const AccuracyResult b = identification_accuracy(cfg32, V, RegionKind::frustum_rect, 3.0, 10.0, 500, 4, 8);
    EXPECT_EQ(a.correct, b.correct);
}

TEST(SweepTest, SeededDeterminismAcrossWorkerCounts)
{
    ExperimentSpec s = small_spec(Method::two_phase);
    s.workers = 1;
    const SweepResult a = snr_loss_sweep(s);
    s.workers = 6;
    const SweepResult b = snr_loss_sweep(s);
    std::ostringstream ca, cb;
    a.table.write_csv(ca);
    b.table.write_csv(cb);
    EXPECT_EQ(ca.str(), cb.str());
    EXPECT_EQ(a.table.metadata_json(), b.table.metadata_json());
    ASSERT_EQ(a.records.size(), 32u);
    for (const TrialRecord &r : a.records)
        EXPECT_GE(r.loss_db, -1e-12);
    const ResultRow *row = a.table.find("small/two-phase/ref=30dB", "mean_loss_db");
    ASSERT_NE(row, nullptr);
    EXPECT_EQ(row->n, 16u);
    const ResultRow *floor = a.table.find("small/two-phase/ref=30dB", "loss_floor_db");
    ASSERT_NE(floor, nullptr);
    EXPECT_NEAR(floor->value, rician_loss_floor_db(13.0), 1e-12);
}

TEST(SweepTest, PureLosNoiselessLossIsQuantizationOnly)
{
    ExperimentSpec s = small_spec(Method::two_phase);
    s.rician_db = std::numeric_limits<double>::infinity();
    s.nlos_paths = 0;
    s.ref_snr_db = {std::numeric_limits<double>::infinity()};
    const SweepResult r = snr_loss_sweep(s);
    for (const TrialRecord &t : r.records)
    {
        EXPECT_GE(t.loss_db, -1e-12);
        EXPECT_LT(t.loss_db, 3.0);
    }
}

TEST(SweepTest, BinsPartitionTrials)
{
    const SweepResult r = snr_loss_sweep(small_spec(Method::three_phase));
    const ResultTable bins = bin_losses(r, BinAxis::depth, {1.875, 5.0, 11.25});
    std::size_t n = 0;
    for (const ResultRow &row : bins.rows)
        n += row.n;
    EXPECT_EQ(n, r.records.size());

    std::ostringstream os;
    write_trial_csv(os, r.records);
    const std::string csv = os.str();
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(r.records.size()) + 1);
}

TEST(OverheadTest, LocalizationCountsAreConstant)
{
    for (Method m : {Method::two_phase, Method::three_phase})
    {
        ExperimentSpec s = small_spec(m);
        s.trials = 12;
        const OverheadStats st = overhead_stats(s);
        EXPECT_EQ(st.per_phase[0].min, st.per_phase[0].max);
        if (m == Method::two_phase)
            EXPECT_EQ(st.per_phase[0].mean, 32.0);
        else
            EXPECT_EQ(st.per_phase[0].mean + st.per_phase[1].mean, 32.0);
        EXPECT_EQ(st.rf_chains, rf_chains(m, cfg32));
    }
}

TEST(OverheadTest, ReportRows)
{
    ExperimentSpec s = small_spec(Method::two_phase);
    s.trials = 8;
    const ResultTable t = overhead_report(s);
    ASSERT_NE(t.find("small/two-phase", "pilots_localization_mean"), nullptr);
    ASSERT_NE(t.find("small/two-phase", "pilots_total_max"), nullptr);
    EXPECT_EQ(t.find("small/two-phase", "rf_chains")->value, 1.0);
}

TEST(SummaryTest, Statistics)
{
    const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
    EXPECT_EQ(s.min, 1.0);
    EXPECT_EQ(s.max, 4.0);
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
    EXPECT_EQ(s.n, 4u);

    std::vector<double> v(1000001, 0.1);
    v[0] = 1e16;
    v.push_back(-1e16);
    EXPECT_NEAR(summarize(v).mean * static_cast<double>(v.size()), 100000.0, 1e-3);
}

TEST(ResultTableTest, CsvAndMetadata)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);

    ResultTable t;
    t.seed = 42;
    t.spec_json = "{\"a\":1}";
    t.rows.push_back({"s", "m", 1.5, 10, 0.25});
    std::ostringstream os;
    t.write_csv(os);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "scenario,metric,value,n,stderr");
    const std::string meta = t.metadata_json();
    EXPECT_NE(meta.find("\"seed\""), std::string::npos);
    EXPECT_NE(meta.find("spec_hash"), std::string::npos);

    const auto dir = scratch_dir("table");
    write_result(t, dir / "out.csv");
    EXPECT_TRUE(std::filesystem::exists(dir / "out.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "out.csv.json"));
    EXPECT_EQ(slurp(dir / "out.csv"), os.str());
}

TEST(HeatmapTest, ByteIdenticalAndBoundary)
{
    const auto dir = scratch_dir("heatmap");
    const double dx = cfg32.aperture_x();
    const Point3 v{-dx / 2.0, -dx, -dx / 2.0};
    HeatmapRequest req;
    req.y_plane = 3.0 * cfg32.diagonal();
    req.resolution = 40;
    req.region_focal = v;
    const Codeword w = diverging_codeword(cfg32, v);
    const auto b1 = heatmap_export(cfg32, w, req, dir / "a.csv");
    heatmap_export(cfg32, w, req, dir / "b.csv");
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(b1, dir / "a_boundary.csv");
    const std::string boundary = slurp(b1);
    EXPECT_EQ(boundary.substr(0, boundary.find('\n')), "curve,x_m,z_m");
    EXPECT_EQ(std::count(boundary.begin(), boundary.end(), '\n'), 6);

    const std::string grid = slurp(dir / "a.csv");
    EXPECT_EQ(grid.substr(0, 4), "z\\x,");
    EXPECT_EQ(std::count(grid.begin(), grid.end(), '\n'), 41);

    req.region_focal.reset();
    EXPECT_TRUE(heatmap_export(cfg32, w, req, dir / "c.csv").empty());
}

TEST(HeatmapTest, BrightRegionTracksFocalDepth)
{
    const double dx = cfg64.aperture_x(), dz = cfg64.aperture_z();
    const double y = 3.0 * cfg64.diagonal();
    struct Bright
    {
        std::size_t cells = 0;
        double inside = 0.0;
    };
    auto measure = [&](const Point3 &v)
    {
        const PlaneGrid g = plane_field_sample(cfg64, diverging_codeword(cfg64, v), y, y, y, 96);
        const double r = y / v.y;
        const double xlo = (v.x + dx / 2.0) * r - dx / 2.0, xhi = (v.x - dx / 2.0) * r + dx / 2.0;
        const double zlo = (v.z + dz / 2.0) * r - dz / 2.0, zhi = (v.z - dz / 2.0) * r + dz / 2.0;
        double peak = 0.0;
        for (double a : g.values)
            peak = std::max(peak, a);
        Bright b;
        std::size_t in = 0;
        for (std::size_t iz = 0; iz < g.zs.size(); ++iz)
            for (std::size_t ix = 0; ix < g.xs.size(); ++ix)
                if (g.at(ix, iz) > 0.5 * peak)
                {
                    ++b.cells;
                    in += g.xs[ix] >= xlo && g.xs[ix] < xhi && g.zs[iz] >= zlo && g.zs[iz] < zhi ? 1 : 0;
                }
        b.inside = static_cast<double>(in) / static_cast<double>(b.cells);
        return b;
    };
    const Bright a = measure({-dx / 2.0, -dx, -dz / 2.0});
    const Bright d = measure({-7.0 * dx / 2.0, -8.0 * dx, -7.0 * dz / 2.0});
    EXPECT_GT(a.inside, 0.9);
    EXPECT_GT(d.inside, 0.9);
    // Rectangle side is D + y/|y_v|: the deeper focal point lights a smaller patch
    EXPECT_LT(d.cells, a.cells);
}

TEST(SpecTest, ValidationAndJson)
{
    ExperimentSpec s;
    EXPECT_NO_THROW(s.validate());
    s.trials = 0;
    EXPECT_THROW(s.validate(), std::domain_error);
    s.trials = 1;
    s.ref_snr_db.clear();
    EXPECT_THROW(s.validate(), std::domain_error);
    const std::string j = spec_to_json(ExperimentSpec{});
    EXPECT_NE(j.find("\"rician_db\""), std::string::npos);
}
