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
//
// Command line front end.  Talks to the library exclusively through the C API
// in ptm.h; JSON/CSV assembly and file handling live here.
//
// Exit codes: 0 clean, 1 at least one verification violation, 2 usage or
// input errors (bad flags, bad --config keys, unreadable files).

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptm.h"

namespace {

using nlohmann::json;

std::string real6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

[[noreturn]] void die_usage(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(2);
}

void check_api(ptm_status rc, const std::string& context) {
  if (rc != PTM_OK) {
    die_usage(context + ": " + ptm_last_error());
  }
}

// Takes ownership of a C-API string.
std::string take_string(char* s) {
  std::string out = s != nullptr ? s : "";
  ptm_string_free(s);
  return out;
}

struct MeasureHandle {
  ptm_measure* m = nullptr;
  MeasureHandle() = default;
  explicit MeasureHandle(ptm_measure* handle) : m(handle) {}
  MeasureHandle(const MeasureHandle&) = delete;
  MeasureHandle& operator=(const MeasureHandle&) = delete;
  MeasureHandle(MeasureHandle&& other) noexcept : m(other.m) { other.m = nullptr; }
  ~MeasureHandle() { ptm_measure_free(m); }
};

double parse_real(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    die_usage(what + ": not a number: '" + token + "'");
  }
}

long parse_integer(const std::string& token, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    die_usage(what + ": not an integer: '" + token + "'");
  }
}

// Grammar: "poisson T" | "binomial n p" | "bernoulli p" | "random [top]"
// | "file PATH".
MeasureHandle make_target(const std::string& spec, std::uint64_t seed,
                          long max_support) {
  std::istringstream in(spec);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  if (tokens.empty()) die_usage("--target: empty specification");
  const std::string& family = tokens[0];
  ptm_measure* m = nullptr;
  if (family == "poisson") {
    if (tokens.size() != 2) die_usage("--target poisson needs exactly one horizon value");
    check_api(ptm_measure_poisson(parse_real(tokens[1], "--target poisson"), &m),
              "--target poisson");
  } else if (family == "binomial") {
    if (tokens.size() != 3) die_usage("--target binomial needs a count and a probability");
    check_api(ptm_measure_binomial(parse_integer(tokens[1], "--target binomial"),
                                   parse_real(tokens[2], "--target binomial"), &m),
              "--target binomial");
  } else if (family == "bernoulli") {
    if (tokens.size() != 2) die_usage("--target bernoulli needs a probability");
    check_api(ptm_measure_bernoulli(parse_real(tokens[1], "--target bernoulli"), &m),
              "--target bernoulli");
  } else if (family == "random") {
    if (tokens.size() > 2) die_usage("--target random takes at most a support bound");
    const long top = tokens.size() == 2
                         ? parse_integer(tokens[1], "--target random")
                         : max_support;
    check_api(ptm_measure_random(seed, top, &m), "--target random");
  } else if (family == "file") {
    if (tokens.size() < 2) die_usage("--target file needs a path");
    const std::string path = spec.substr(spec.find("file") + 5);
    check_api(ptm_measure_read_file(path.c_str(), &m), "--target file");
  } else {
    die_usage("--target: unknown family '" + family +
              "' (expected poisson | binomial | bernoulli | random | file)");
  }
  return MeasureHandle(m);
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die_usage("cannot open for writing: " + path.string());
  out << content;
  if (!out) die_usage("short write: " + path.string());
}

// Fixed-width table over rows shaped like the library's inequality reports.
std::string table_from_results(const json& rows) {
  const char* header[6] = {"name", "lhs", "rhs", "constant", "slack", "status"};
  std::vector<std::vector<std::string>> cells;
  for (const json& r : rows) {
    std::string status = r.value("passed", false) ? "ok" : "FAIL";
    if (!r.value("asserted", true)) status += " (reported)";
    cells.push_back({r.value("name", std::string("?")), real6(r.value("lhs", 0.0)),
                     real6(r.value("rhs", 0.0)), real6(r.value("constant", 0.0)),
                     real6(r.value("slack", 0.0)), status});
  }
  std::vector<std::size_t> width(6);
  for (int c = 0; c < 6; ++c) width[static_cast<std::size_t>(c)] = std::string(header[c]).size();
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < 6; ++c) {
      out += row[c] + std::string(width[c] - row[c].size(), ' ');
      if (c + 1 < 6) out += "  ";
    }
    out += "\n";
  };
  emit({header[0], header[1], header[2], header[3], header[4], header[5]});
  for (const auto& row : cells) emit(row);
  return out;
}

struct Common {
  std::string target_spec = "poisson 1.0";
  std::string out_dir;
  std::uint64_t seed = 1;
  int threads = 1;
  long max_support = 8;
};

// Wraps a runner body in the report envelope, writes artifacts (or prints the
// envelope when no --out), and converts the violation count to an exit code.
int finish(const std::string& command, const Common& c, const ptm_measure* m,
           const double* tol_rel, json body,
           const std::vector<std::pair<std::string, std::string>>& csv_files = {}) {
  const auto violations = body.value("violations", static_cast<std::int64_t>(0));
  json envelope{{"command", command},
                {"seed", c.seed},
                {"threads", c.threads},
                {"version", ptm_version()},
                {"timestamp", iso_timestamp()}};
  if (m != nullptr) {
    char* text = nullptr;
    check_api(ptm_measure_serialize(m, &text), "serialize target");
    envelope["target"] = take_string(text);
  }
  if (tol_rel != nullptr) envelope["tol_rel"] = *tol_rel;
  envelope["body"] = std::move(body);

  if (c.out_dir.empty()) {
    std::cout << envelope.dump(2) << "\n";
  } else {
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    if (ec) die_usage("cannot create output directory: " + c.out_dir);
    const std::string stem = command + "-seed" + std::to_string(c.seed);
    const std::filesystem::path json_path =
        std::filesystem::path(c.out_dir) / (stem + ".json");
    write_text_file(json_path, envelope.dump(2) + "\n");
    std::cout << "wrote " << json_path.string() << "\n";
    for (const auto& [suffix, content] : csv_files) {
      const std::filesystem::path csv_path =
          std::filesystem::path(c.out_dir) / (stem + suffix);
      write_text_file(csv_path, content);
      std::cout << "wrote " << csv_path.string() << "\n";
    }
    const json& b = envelope["body"];
    if (b.contains("results")) std::cout << table_from_results(b["results"]);
    std::cout << "violations: " << violations << "\n";
  }
  return violations > 0 ? 1 : 0;
}

int run_check_ulc(const Common& c) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  check_api(ptm_run_check_ulc(m.m, &body_text), "check-ulc");
  return finish("check-ulc", c, m.m, nullptr, json::parse(take_string(body_text)));
}

int run_chain(const Common& c, double tol_rel) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  check_api(ptm_run_chain(m.m, tol_rel, &body_text), "chain");
  return finish("chain", c, m.m, &tol_rel, json::parse(take_string(body_text)));
}

int run_semigroup(const Common& c, long grid) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* csv = nullptr;
  check_api(ptm_run_semigroup_csv(m.m, grid, &csv), "semigroup");
  std::string csv_text = take_string(csv);
  if (c.out_dir.empty()) {
    std::cout << csv_text;
    return 0;
  }
  json body{{"grid_points", grid}, {"violations", 0}};
  return finish("semigroup", c, m.m, nullptr, std::move(body), {{".csv", csv_text}});
}

int run_fokker_planck(const Common& c, long grid) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  check_api(ptm_run_fokker_planck(m.m, grid, &body_text), "fokker-planck");
  return finish("fokker-planck", c, m.m, nullptr, json::parse(take_string(body_text)));
}

int run_simulate(const Common& c, long n) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  char* csv = nullptr;
  const bool want_csv = !c.out_dir.empty();
  check_api(ptm_run_simulate(m.m, n, c.seed, c.threads, &body_text,
                             want_csv ? &csv : nullptr),
            "simulate");
  std::vector<std::pair<std::string, std::string>> files;
  if (want_csv) files.emplace_back("-samples.csv", take_string(csv));
  return finish("simulate", c, m.m, nullptr, json::parse(take_string(body_text)), files);
}

int run_marginal(const Common& c, double time, long n) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  check_api(ptm_run_marginal(m.m, time, n, c.seed, c.threads, &body_text), "marginal");
  return finish("marginal", c, m.m, nullptr, json::parse(take_string(body_text)));
}

int run_martingale(const Common& c, long n, long grid) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  check_api(ptm_run_martingale(m.m, n, grid, c.seed, c.threads, &body_text),
            "martingale");
  return finish("martingale", c, m.m, nullptr, json::parse(take_string(body_text)));
}

int run_contraction(const Common& c, long configs, long grid) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  char* body_text = nullptr;
  check_api(ptm_run_contraction(m.m, configs, c.seed, grid, c.threads, &body_text),
            "contraction");
  return finish("contraction", c, m.m, nullptr, json::parse(take_string(body_text)));
}

int run_ineq(const Common& c, const std::string& family, long instances,
             double tol_rel) {
  char* body_text = nullptr;
  char* rows_csv = nullptr;
  const bool want_csv = !c.out_dir.empty();
  check_api(ptm_run_ineq_sweep(family.c_str(), instances, c.seed, c.max_support,
                               tol_rel, c.threads, &body_text,
                               want_csv ? &rows_csv : nullptr),
            "ineq");
  std::vector<std::pair<std::string, std::string>> files;
  if (want_csv) files.emplace_back("-rows.csv", take_string(rows_csv));
  return finish("ineq-" + family, c, nullptr, &tol_rel,
                json::parse(take_string(body_text)), files);
}

int run_path(const Common& c, std::uint64_t replication) {
  const MeasureHandle m = make_target(c.target_spec, c.seed, c.max_support);
  ptm_transporter* tr = nullptr;
  check_api(ptm_transporter_new(m.m, &tr), "path");
  ptm_path* p = nullptr;
  const ptm_status rc = ptm_path_new(tr, c.seed, replication, &p);
  if (rc != PTM_OK) {
    const std::string message = ptm_last_error();
    ptm_transporter_free(tr);
    die_usage("path: " + message);
  }
  long final_value = 0;
  char* csv = nullptr;
  check_api(ptm_path_final_value(p, &final_value), "path");
  check_api(ptm_path_csv(p, &csv), "path");
  std::string csv_text = take_string(csv);
  ptm_path_free(p);
  ptm_transporter_free(tr);
  if (c.out_dir.empty()) {
    std::cout << csv_text;
    return 0;
  }
  json body{{"replication", replication},
            {"final_value", final_value},
            {"violations", 0}};
  return finish("path", c, m.m, nullptr, std::move(body), {{".csv", csv_text}});
}

// Merges the per-command envelopes found in --out: one row per (command, seed),
// the newest timestamp winning, into report.json plus a printed digest.
int run_report(const std::string& out_dir) {
  if (!std::filesystem::is_directory(out_dir)) {
    die_usage("report: not a directory: " + out_dir);
  }
  struct Entry {
    std::string timestamp;
    std::string file;
    std::int64_t violations = 0;
  };
  std::map<std::pair<std::string, std::string>, Entry> merged;
  for (const auto& item : std::filesystem::directory_iterator(out_dir)) {
    if (!item.is_regular_file() || item.path().extension() != ".json") continue;
    if (item.path().filename() == "report.json") continue;
    json envelope;
    try {
      std::ifstream in(item.path());
      envelope = json::parse(in);
    } catch (const std::exception&) {
      std::cerr << "warning: skipping unparseable " << item.path().string() << "\n";
      continue;
    }
    if (!envelope.contains("command") || !envelope.contains("seed") ||
        !envelope.contains("body")) {
      std::cerr << "warning: skipping foreign JSON " << item.path().string() << "\n";
      continue;
    }
    Entry e;
    e.timestamp = envelope.value("timestamp", "");
    e.file = item.path().filename().string();
    e.violations = envelope["body"].value("violations", static_cast<std::int64_t>(0));
    const std::pair<std::string, std::string> key(
        envelope["command"].get<std::string>(), envelope["seed"].dump());
    auto it = merged.find(key);
    if (it == merged.end() || e.timestamp > it->second.timestamp ||
        (e.timestamp == it->second.timestamp && e.file > it->second.file)) {
      merged[key] = e;
    }
  }
  json entries = json::array();
  std::int64_t total = 0;
  for (const auto& [key, e] : merged) {
    entries.push_back({{"command", key.first},
                       {"seed", json::parse(key.second)},
                       {"timestamp", e.timestamp},
                       {"file", e.file},
                       {"violations", e.violations}});
    total += e.violations;
    std::cout << key.first << " seed=" << key.second << " violations=" << e.violations
              << " (" << e.file << ")\n";
  }
  const json report{{"generated", iso_timestamp()},
                    {"entries", entries},
                    {"total_violations", total}};
  const std::filesystem::path path = std::filesystem::path(out_dir) / "report.json";
  write_text_file(path, report.dump(2) + "\n");
  std::cout << "wrote " << path.string() << "\n";
  std::cout << "violations: " << total << "\n";
  return total > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Transport maps from a planar Poisson process onto ultra-log-concave "
      "counting measures: simulation, replay audits, and functional-inequality "
      "checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ptm_version());

  Common common;
  long n = 0;
  long grid = 0;
  double time_at = -1.0;
  double tol_rel = 1e-12;
  std::uint64_t replication = 0;
  std::string family;
  std::string report_dir;

  auto add_common = [&](CLI::App* sub, bool with_target) {
    sub->add_option("-s,--seed", common.seed,
                    "Master seed; every replication derives its own substream")
        ->envname("PTM_SEED")
        ->capture_default_str();
    sub->add_option("-o,--out", common.out_dir,
                    "Directory for JSON/CSV artifacts; omit to print JSON to stdout");
    sub->add_option("--threads", common.threads, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    if (with_target) {
      sub->add_option(
             "-t,--target", common.target_spec,
             "Target measure: 'poisson T' | 'binomial n p' | 'bernoulli p' | "
             "'random [top]' | 'file PATH'")
          ->capture_default_str();
    }
    sub->set_config("--config", "",
                    "Flat key=value file using long option names; quote values "
                    "containing spaces");
    sub->allow_config_extras(false);
    return sub;
  };

  CLI::App* sub_check = add_common(
      app.add_subcommand("check-ulc",
                         "Validate a target: normalization, ultra-log-concavity, "
                         "log-concave density"),
      true);

  CLI::App* sub_chain = add_common(
      app.add_subcommand("chain",
                         "Mean, |log mu(0)|, and mu(1)/mu(0) comparisons plus "
                         "closed-form and quadrature identities"),
      true);
  sub_chain->add_option("--tol-rel", tol_rel, "Relative slack tolerance")
      ->capture_default_str();

  CLI::App* sub_semigroup = add_common(
      app.add_subcommand("semigroup",
                         "CSV of smoothed densities and potential gaps on a "
                         "uniform time grid"),
      true);
  sub_semigroup->add_option("-g,--grid", grid, "Time grid points")
      ->check(CLI::Range(2L, 1000000L))
      ->default_val(33L);

  CLI::App* sub_fp = add_common(
      app.add_subcommand("fokker-planck",
                         "Evolve the pure-birth equation and compare with the "
                         "closed-form law"),
      true);
  sub_fp->add_option("-g,--grid", grid, "Comparison grid points")
      ->check(CLI::Range(2L, 100000L))
      ->default_val(21L);

  CLI::App* sub_simulate = add_common(
      app.add_subcommand("simulate", "Sample final values of the transport path"),
      true);
  sub_simulate->add_option("-n,--n", n, "Replications")
      ->check(CLI::PositiveNumber)
      ->default_val(10000L);

  CLI::App* sub_marginal = add_common(
      app.add_subcommand(
          "marginal", "Empirical law of the path at one time vs the closed form"),
      true);
  sub_marginal->add_option("-n,--n", n, "Replications")
      ->check(CLI::PositiveNumber)
      ->default_val(20000L);
  sub_marginal->add_option("--time", time_at,
                           "Evaluation time in [0, T]; negative means T")
      ->capture_default_str();

  CLI::App* sub_martingale = add_common(
      app.add_subcommand("martingale",
                         "Mean acceptance intensity across replications; must sit "
                         "flat at its predicted level"),
      true);
  sub_martingale->add_option("-n,--n", n, "Replications")
      ->check(CLI::Range(2L, 100000000L))
      ->default_val(2000L);
  sub_martingale->add_option("-g,--grid", grid, "Time grid points")
      ->check(CLI::Range(2L, 100000L))
      ->default_val(9L);

  CLI::App* sub_contraction = add_common(
      app.add_subcommand("contraction",
                         "Add-one-atom replay audit: the path derivative must stay "
                         "in {0,1} and intensities must not increase"),
      true);
  sub_contraction->add_option("-n,--n", n, "Driving configurations")
      ->check(CLI::PositiveNumber)
      ->default_val(200L);
  sub_contraction->add_option("-g,--grid", grid, "Probe lattice side")
      ->check(CLI::Range(1L, 10000L))
      ->default_val(40L);

  CLI::App* sub_ineq = add_common(
      app.add_subcommand("ineq",
                         "Randomized sweep of one inequality family over random "
                         "targets and observables"),
      false);
  sub_ineq
      ->add_option("-f,--family", family,
                   "mlsi | phi | transport | chain | poincare")
      ->check(CLI::IsMember({"mlsi", "phi", "transport", "chain", "poincare"}))
      ->required();
  sub_ineq->add_option("-n,--n", n, "Instances")
      ->check(CLI::PositiveNumber)
      ->default_val(1000L);
  sub_ineq->add_option("--max-support", common.max_support,
                       "Largest random-target support point")
      ->check(CLI::Range(1L, 1000L))
      ->capture_default_str();
  sub_ineq->add_option("--tol-rel", tol_rel, "Relative slack tolerance")
      ->capture_default_str();

  CLI::App* sub_path = add_common(
      app.add_subcommand("path",
                         "Replay one driving configuration as CSV: every atom, its "
                         "intensity at arrival, and the running count"),
      true);
  sub_path->add_option("-r,--rep", replication, "Replication index")
      ->capture_default_str();

  CLI::App* sub_report =
      app.add_subcommand("report",
                         "Merge the JSON artifacts in a directory into report.json "
                         "(one row per command and seed, newest wins)");
  sub_report->add_option("-o,--out", report_dir, "Directory holding the artifacts")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (sub_check->parsed()) return run_check_ulc(common);
  if (sub_chain->parsed()) return run_chain(common, tol_rel);
  if (sub_semigroup->parsed()) return run_semigroup(common, grid);
  if (sub_fp->parsed()) return run_fokker_planck(common, grid);
  if (sub_simulate->parsed()) return run_simulate(common, n);
  if (sub_marginal->parsed()) return run_marginal(common, time_at, n);
  if (sub_martingale->parsed()) return run_martingale(common, n, grid);
  if (sub_contraction->parsed()) return run_contraction(common, n, grid);
  if (sub_ineq->parsed()) return run_ineq(common, family, n, tol_rel);
  if (sub_path->parsed()) return run_path(common, replication);
  if (sub_report->parsed()) return run_report(report_dir);
  die_usage("no subcommand selected");
}
