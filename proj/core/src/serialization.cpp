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
#include "nfbeam/training.hpp"

#include <json.hpp>

#include <stdexcept>

namespace nfbeam
{
    using nlohmann::json;

    namespace
    {
        json path_json(const Path &p)
        {
            return {{"position", {p.position.x, p.position.y, p.position.z}},
                    {"gain", {p.gain.real(), p.gain.imag()}}};
        }

        Path path_from(const json &j)
        {
            const auto &pos = j.at("position");
            const auto &gain = j.at("gain");
            if (!pos.is_array() || pos.size() != 3 || !gain.is_array() || gain.size() != 2)
                throw std::invalid_argument("channel JSON: position needs 3 numbers and gain needs 2");
            return {{pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()},
                    {gain[0].get<double>(), gain[1].get<double>()}};
        }
    }

    std::string channel_to_json(const MultipathChannel &ch)
    {
        json j;
        j["los"] = path_json(ch.los);
        j["nlos"] = json::array();
        for (const Path &p : ch.nlos)
            j["nlos"].push_back(path_json(p));
        j["noise_power"] = ch.noise_power;
        return j.dump(2);
    }

    MultipathChannel channel_from_json(std::string_view text)
    {
        try
        {
            const json j = json::parse(text);
            MultipathChannel ch;
            ch.los = path_from(j.at("los"));
            for (const json &p : j.at("nlos"))
                ch.nlos.push_back(path_from(p));
            ch.noise_power = j.at("noise_power").get<double>();
            return ch;
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(std::string("channel JSON: ") + e.what());
        }
    }

    std::string outcome_to_json(const TrainingOutcome &outcome, bool include_trace)
    {
        json j;
        j["method"] = to_string(outcome.method);
        j["pilots_per_phase"] = outcome.pilots_per_phase;
        j["phases"] = json::array();
        for (std::size_t i = 0; i < outcome.pilots_per_phase.size(); ++i)
            j["phases"].push_back({{"name", i < outcome.phase_names.size() ? outcome.phase_names[i] : ""},
                                   {"pilots", outcome.pilots_per_phase[i]}});
        j["total_pilots"] = outcome.total_pilots();
        j["chosen_codeword"] = outcome.chosen.id;
        if (outcome.focus_point)
            j["focus_point"] = {{"y_m", outcome.focus_point->y_m},
                                {"phi_rad", outcome.focus_point->phi_rad},
                                {"theta_rad", outcome.focus_point->theta_rad}};
        else
            j["focus_point"] = nullptr;
        if (outcome.frustum)
            j["frustum"] = {{"m", outcome.frustum->m}, {"x", outcome.frustum->x}, {"z", outcome.frustum->z}};
        if (outcome.shells)
            j["shells"] = {{"m", outcome.shells->first.m},
                           {"x", outcome.shells->first.idx},
                           {"z", outcome.shells->second.idx}};
        if (outcome.grid_direction)
            j["grid_direction"] = {outcome.grid_direction->first, outcome.grid_direction->second};
        j["trace_length"] = outcome.trace.size();
        if (include_trace)
        {
            j["trace"] = json::array();
            for (const TraceEntry &t : outcome.trace)
                j["trace"].push_back({{"codeword", t.codeword_id}, {"power", t.power}});
        }
        return j.dump(2);
    }
}
