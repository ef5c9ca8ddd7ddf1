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

#include "ptm/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace ptm {
namespace {

std::string real17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string real6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

void to_json(nlohmann::json& j, const InequalityReport& r) {
  j = nlohmann::json{{"name", r.name},       {"lhs", r.lhs},
                     {"rhs", r.rhs},         {"constant", r.constant},
                     {"slack", r.slack},     {"tolerance", r.tolerance},
                     {"asserted", r.asserted}, {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const CheckReport& r) {
  j = nlohmann::json{{"passed", r.passed},
                     {"first_violation", r.first_violation},
                     {"worst_slack", r.worst_slack}};
}

void to_json(nlohmann::json& j, const ConstantChain& c) {
  j = nlohmann::json{{"mean", c.mean},
                     {"mean_identity", c.mean_identity},
                     {"log_constant", c.log_constant},
                     {"ratio_constant", c.ratio_constant},
                     {"quadrature", c.quadrature}};
}

void to_json(nlohmann::json& j, const FokkerPlanckReport& r) {
  j = nlohmann::json{{"times", r.times},
                     {"sup_errors", r.sup_errors},
                     {"max_error", r.max_error},
                     {"tolerance", r.tolerance},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const MarginalReport& r) {
  j = nlohmann::json{{"time", r.time},
                     {"samples", r.samples},
                     {"counts", r.counts},
                     {"expected", r.expected},
                     {"total_variation", r.total_variation},
                     {"tv_budget", r.tv_budget},
                     {"chi_square", r.chi_square},
                     {"chi_square_dof", r.chi_square_dof},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const MartingaleStats& s) {
  j = nlohmann::json{{"times", s.times},
                     {"mean_intensity", s.mean_intensity},
                     {"stderr_intensity", s.stderr_intensity},
                     {"expected_level", s.expected_level},
                     {"band_width", s.band_width},
                     {"worst_level_gap", s.worst_level_gap},
                     {"worst_flatness_gap", s.worst_flatness_gap},
                     {"mean_final_value", s.mean_final_value},
                     {"level_ok", s.level_ok},
                     {"flat_ok", s.flat_ok}};
}

void to_json(nlohmann::json& j, const ContractionViolation& v) {
  j = nlohmann::json{{"seed", v.seed},
                     {"replication", v.replication},
                     {"probe_t", v.probe.t},
                     {"probe_z", v.probe.z},
                     {"s", v.s},
                     {"delta", v.delta},
                     {"intensity_gap", v.intensity_gap},
                     {"kind", v.kind}};
}

void to_json(nlohmann::json& j, const ContractionReport& r) {
  j = nlohmann::json{{"configurations", r.configurations},
                     {"probes", r.probes},
                     {"triples", r.triples},
                     {"violations", r.violations},
                     {"census", r.census},
                     {"witnesses", r.witnesses},
                     {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const SweepRow& r) {
  j = nlohmann::json{{"instance", r.instance}, {"name", r.name},
                     {"lhs", r.lhs},           {"rhs", r.rhs},
                     {"constant", r.constant}, {"slack", r.slack},
                     {"asserted", r.asserted}, {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const SweepFinding& f) {
  j = nlohmann::json{{"instance", f.instance}, {"name", f.name},
                     {"lhs", f.lhs},           {"rhs", f.rhs},
                     {"slack", f.slack},       {"target", f.target_text},
                     {"aux", f.aux}};
}

void to_json(nlohmann::json& j, const SweepSummary& s) {
  j = nlohmann::json{{"family", s.family},
                     {"instances", s.instances},
                     {"rows_checked", s.rows_checked},
                     {"violations", s.violations},
                     {"worst_slack", s.worst_slack},
                     {"findings", s.findings}};
}

std::string render_table(std::span<const InequalityReport> reports) {
  const char* header[6] = {"name", "lhs", "rhs", "constant", "slack", "status"};
  std::vector<std::array<std::string, 6>> cells;
  for (const InequalityReport& r : reports) {
    std::array<std::string, 6> row = {
        r.name,          real6(r.lhs),   real6(r.rhs), real6(r.constant),
        real6(r.slack),  std::string(r.passed ? "ok" : "FAIL") +
                             (r.asserted ? "" : " (reported)")};
    cells.push_back(std::move(row));
  }
  std::array<std::size_t, 6> width{};
  for (int c = 0; c < 6; ++c) width[static_cast<std::size_t>(c)] = std::string(header[c]).size();
  for (const auto& row : cells) {
    for (int c = 0; c < 6; ++c) {
      width[static_cast<std::size_t>(c)] =
          std::max(width[static_cast<std::size_t>(c)], row[static_cast<std::size_t>(c)].size());
    }
  }
  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::string out;
  for (int c = 0; c < 6; ++c) {
    out += pad(header[c], width[static_cast<std::size_t>(c)]);
    out += c + 1 < 6 ? "  " : "";
  }
  out += "\n";
  for (const auto& row : cells) {
    for (int c = 0; c < 6; ++c) {
      out += pad(row[static_cast<std::size_t>(c)], width[static_cast<std::size_t>(c)]);
      out += c + 1 < 6 ? "  " : "";
    }
    out += "\n";
  }
  return out;
}

std::string semigroup_csv(const UlcMeasure& target, long grid_points) {
  if (grid_points < 2) {
    throw std::invalid_argument("semigroup_csv: need at least 2 grid points");
  }
  SemigroupEvaluator ev(target.density(), target.horizon());
  std::string out = "t,k,value,log_ratio\n";
  for (long i = 0; i < grid_points; ++i) {
    const double t = target.horizon() * static_cast<double>(i) /
                     static_cast<double>(grid_points - 1);
    for (long k = 0; k <= target.support_top(); ++k) {
      out += real17(t);
      out += ",";
      out += std::to_string(k);
      out += ",";
      out += real17(ev.value(t, k));
      out += ",";
      out += real17(ev.log_ratio(t, k));
      out += "\n";
    }
  }
  return out;
}

std::string path_csv(const TransportPath& path) {
  std::string out = "index,t,z,intensity,accepted,x_after\n";
  long x = 0;
  const auto& atoms = path.config().atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const bool acc = path.accepted()[i];
    if (acc) ++x;
    out += std::to_string(i);
    out += ",";
    out += real17(atoms[i].t);
    out += ",";
    out += real17(atoms[i].z);
    out += ",";
    out += real17(path.intensity_at(atoms[i].t));
    out += ",";
    out += acc ? "1" : "0";
    out += ",";
    out += std::to_string(x);
    out += "\n";
  }
  return out;
}

std::string samples_csv(std::span<const long> finals) {
  std::string out = "replication,value\n";
  for (std::size_t i = 0; i < finals.size(); ++i) {
    out += std::to_string(i);
    out += ",";
    out += std::to_string(finals[i]);
    out += "\n";
  }
  return out;
}

std::string sweep_rows_csv(const SweepSummary& summary) {
  std::string out = "instance,name,lhs,rhs,constant,slack,asserted,passed\n";
  for (const SweepRow& r : summary.rows) {
    out += std::to_string(r.instance);
    out += ",";
    out += r.name;
    out += ",";
    out += real17(r.lhs);
    out += ",";
    out += real17(r.rhs);
    out += ",";
    out += real17(r.constant);
    out += ",";
    out += real17(r.slack);
    out += ",";
    out += r.asserted ? "1" : "0";
    out += ",";
    out += r.passed ? "1" : "0";
    out += "\n";
  }
  return out;
}

}  // namespace ptm
