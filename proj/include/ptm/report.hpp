// Copyright 2026 The poisson-transport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PTM_REPORT_HPP_
#define PTM_REPORT_HPP_

#include <span>
#include <string>

#include "json.hpp"
#include "ptm/inequalities.hpp"
#include "ptm/measures.hpp"
#include "ptm/semigroup.hpp"
#include "ptm/transport.hpp"

namespace ptm {

// nlohmann-convention converters: `nlohmann::json j = value;` works for all
// result structs.  Keys come out sorted, so serialized output is stable.
void to_json(nlohmann::json& j, const InequalityReport& r);
void to_json(nlohmann::json& j, const CheckReport& r);
void to_json(nlohmann::json& j, const ConstantChain& c);
void to_json(nlohmann::json& j, const FokkerPlanckReport& r);
void to_json(nlohmann::json& j, const MarginalReport& r);
void to_json(nlohmann::json& j, const MartingaleStats& s);
void to_json(nlohmann::json& j, const ContractionViolation& v);
void to_json(nlohmann::json& j, const ContractionReport& r);
void to_json(nlohmann::json& j, const SweepRow& r);
void to_json(nlohmann::json& j, const SweepFinding& f);
void to_json(nlohmann::json& j, const SweepSummary& s);

// Aligned fixed-order text table of inequality rows.
std::string render_table(std::span<const InequalityReport> reports);

// CSV emitters (17 significant digits; header row included).
// t,k,value,log_ratio over a uniform time grid and the full support.
std::string semigroup_csv(const UlcMeasure& target, long grid_points);
// index,t,z,intensity,accepted,x_after for every atom of the driving
// configuration, in time order.
std::string path_csv(const TransportPath& path);
// replication,value for simulated final values.
std::string samples_csv(std::span<const long> finals);
// instance,name,lhs,rhs,constant,slack,asserted,passed.
std::string sweep_rows_csv(const SweepSummary& summary);

}  // namespace ptm

#endif  // PTM_REPORT_HPP_
