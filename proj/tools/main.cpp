// Copyright 2026 The sbm-gft Authors.
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

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbmgft/sbmgft.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds;
  int scale = 0;  // overrides the experiment's default N when > 0
};

json load_config(const CommonOptions& opts) {
  if (opts.config_path.empty()) return json::object();
  return sbmgft::load_json(opts.config_path);
}

/// A "spec" entry may be an inline object or a path to a JSON file,
/// resolved relative to the config file location.
json resolve_spec_json(const json& config, const std::string& config_path) {
  if (!config.contains("spec"))
    throw sbmgft::validation_error("config is missing a \"spec\" entry");
  const json& spec = config.at("spec");
  if (spec.is_string()) {
    fs::path p = spec.get<std::string>();
    if (p.is_relative() && !config_path.empty())
      p = fs::path(config_path).parent_path() / p;
    if (!fs::exists(p))
      throw sbmgft::validation_error("referenced spec file does not exist: " +
                                     p.string());
    return sbmgft::load_json(p);
  }
  return spec;
}

std::vector<std::uint64_t> effective_seeds(const CommonOptions& opts,
                                           const json& config) {
  if (!opts.seeds.empty()) return opts.seeds;
  if (config.contains("seeds")) {
    std::vector<std::uint64_t> seeds;
    for (const auto& s : config["seeds"]) seeds.push_back(s.get<std::uint64_t>());
    if (seeds.empty())
      throw sbmgft::validation_error("config seed list must not be empty");
    return seeds;
  }
  return {sbmgft::kDefaultSampleSeeds.begin(), sbmgft::kDefaultSampleSeeds.end()};
}

/// Writes the run manifest: config hash, version, wall clock, and a checksum
/// per emitted file. Re-running with equal config and seeds reproduces the
/// same CSV bytes (the manifest itself carries the varying wall clock).
class RunRecorder {
 public:
  RunRecorder(const fs::path& out_dir, json config)
      : out_dir_(out_dir),
        config_(std::move(config)),
        hash_(sbmgft::config_hash(config_)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_dir_);
  }

  const std::string& config_hash() const { return hash_; }
  fs::path path(const std::string& name) const { return out_dir_ / name; }

  void record(const std::string& name) { outputs_.push_back(name); }

  void finish() const {
    json manifest;
    manifest["config_hash"] = hash_;
    manifest["version"] = sbmgft::kArtifactVersion;
    manifest["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start_)
            .count();
    json sums = json::object();
    for (const auto& name : outputs_) {
      std::ifstream in(out_dir_ / name, std::ios::binary);
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      sums[name] = sbmgft::hex64(sbmgft::fnv1a64(bytes));
    }
    manifest["outputs"] = sums;
    std::ofstream out(out_dir_ / "run_manifest.json");
    out << manifest.dump(2) << "\n";
  }

 private:
  fs::path out_dir_;
  json config_;
  std::string hash_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

json describe(const std::string& kind, const CommonOptions& opts,
              const json& config) {
  json all = config;
  all["kind"] = kind;
  if (opts.scale > 0) all["scale"] = opts.scale;
  if (!opts.seeds.empty()) all["seeds"] = opts.seeds;
  return all;
}

int run_z5_table1_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const int n = opts.scale > 0 ? opts.scale : config.value("N", 6000);
  const auto seeds = effective_seeds(opts, config);
  RunRecorder rec(opts.out_dir, describe("z5-table1", opts, config));

  const sbmgft::Table1Result result = sbmgft::run_z5_table1(n, seeds);
  sbmgft::CsvWriter csv(rec.path("table1.csv"), rec.config_hash(),
                        {"row", "lambda1", "lambda2", "lambda3", "lambda4",
                         "lambda5", "lambda6"});
  csv.write_row("model", {result.model.begin(), result.model.end()});
  for (std::size_t s = 0; s < result.seeds.size(); ++s)
    csv.write_row("sample_seed_" + std::to_string(result.seeds[s]),
                  {result.samples[s].begin(), result.samples[s].end()});
  rec.record("table1.csv");
  rec.finish();
  return 0;
}

int run_z5_table2_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const int n = opts.scale > 0 ? opts.scale : config.value("N", 6000);
  const auto seeds = effective_seeds(opts, config);
  RunRecorder rec(opts.out_dir, describe("z5-table2", opts, config));

  const sbmgft::Table2Result result = sbmgft::run_z5_table2(n, seeds);
  sbmgft::CsvWriter csv(rec.path("table2.csv"), rec.config_hash(),
                        {"row", "ip1", "ip2", "ip3", "ip4", "ip5"});
  for (std::size_t s = 0; s < result.seeds.size(); ++s)
    csv.write_row("seed_" + std::to_string(result.seeds[s]),
                  {result.per_seed[s].begin(), result.per_seed[s].end()});
  rec.record("table2.csv");
  rec.finish();
  return 0;
}

void write_agreement_csv(sbmgft::CsvWriter& csv,
                         const std::vector<sbmgft::AgreementRow>& rows) {
  for (const auto& row : rows)
    for (int i = 0; i < 5; ++i)
      csv.write_numeric_row({static_cast<double>(row.parameter),
                             static_cast<double>(i + 1), row.agreement[i]});
}

int run_agreement_cmd(const CommonOptions& opts, const std::string& kind) {
  const json config = load_config(opts);
  RunRecorder rec(opts.out_dir, describe(kind, opts, config));
  std::vector<sbmgft::AgreementRow> rows;
  std::string name;
  std::string parameter_column = "k";
  if (kind == "z5-fig4") {
    rows = sbmgft::run_z5_fig4();
    name = "fig4.csv";
  } else if (kind == "z5-fig5a") {
    rows = sbmgft::run_z5_fig5a();
    name = "fig5a.csv";
  } else {
    rows = sbmgft::run_z5_fig5b();
    name = "fig5b.csv";
    parameter_column = "model";
  }
  sbmgft::CsvWriter csv(rec.path(name), rec.config_hash(),
                        {parameter_column, "i", "agreement"});
  write_agreement_csv(csv, rows);
  rec.record(name);
  rec.finish();
  return 0;
}

int run_perturb_sweep_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const sbmgft::SBMSpec spec =
      config.contains("spec")
          ? sbmgft::spec_from_config(
                sbmgft::parse_spec(resolve_spec_json(config, opts.config_path)))
          : sbmgft::z5_spec(opts.scale > 0 ? opts.scale : 6000);
  sbmgft::PerturbSweepConfig sweep;
  if (config.contains("epsilons"))
    sweep.epsilons = config["epsilons"].get<std::vector<double>>();
  sweep.trials = config.value("trials", sweep.trials);
  sweep.seed = config.value("seed", sweep.seed);
  sweep.signal_trials = config.value("signal_trials", sweep.signal_trials);

  RunRecorder rec(opts.out_dir, describe("perturb-sweep", opts, config));
  const auto rows = sbmgft::run_perturb_sweep(spec, sweep);
  sbmgft::CsvWriter csv(
      rec.path("perturb_sweep.csv"), rec.config_hash(),
      {"trial", "epsilon", "lambda", "d", "gamma", "bound", "empirical_op",
       "empirical_signal", "v_dist", "v_bound"});
  for (const auto& row : rows)
    csv.write_numeric_row({static_cast<double>(row.trial), row.epsilon,
                           row.lambda, static_cast<double>(row.multiplicity),
                           row.gamma, row.bound, row.empirical_op,
                           row.empirical_signal, row.v_dist, row.v_bound});
  rec.record("perturb_sweep.csv");
  rec.finish();
  return 0;
}

int run_convergence_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const sbmgft::SBMSpec base =
      config.contains("spec")
          ? sbmgft::spec_from_config(
                sbmgft::parse_spec(resolve_spec_json(config, opts.config_path)))
          : sbmgft::z5_spec(6000);
  std::vector<int> n_list = {250, 500, 1000, 2000};
  if (config.contains("N_list"))
    n_list = config["N_list"].get<std::vector<int>>();
  const auto seeds = effective_seeds(opts, config);

  RunRecorder rec(opts.out_dir, describe("convergence-check", opts, config));
  const auto rows =
      sbmgft::run_convergence_check(base.a, base.mu, n_list, seeds);
  sbmgft::CsvWriter csv(rec.path("convergence.csv"), rec.config_hash(),
                        {"N", "lambda", "mean_projection_distance"});
  for (const auto& row : rows)
    csv.write_numeric_row({static_cast<double>(row.n_vertices), row.lambda,
                           row.mean_distance});
  rec.record("convergence.csv");
  rec.finish();
  return 0;
}

int run_basis_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const json spec_json = resolve_spec_json(config, opts.config_path);
  const sbmgft::SBMSpec spec =
      sbmgft::spec_from_config(sbmgft::parse_spec(spec_json));
  RunRecorder rec(opts.out_dir, describe("basis", opts, config));
  const sbmgft::SBMFourierBasis basis = sbmgft::sbm_fourier_basis(spec);
  sbmgft::write_basis(basis, rec.path("basis.csv"), rec.path("basis_meta.json"),
                      rec.config_hash());
  rec.record("basis.csv");
  rec.record("basis_meta.json");
  rec.finish();
  return 0;
}

int run_sample_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const json spec_json = resolve_spec_json(config, opts.config_path);
  const sbmgft::SBMSpec spec =
      sbmgft::spec_from_config(sbmgft::parse_spec(spec_json));
  const auto seeds = effective_seeds(opts, config);
  RunRecorder rec(opts.out_dir, describe("sample", opts, config));
  for (std::uint64_t seed : seeds) {
    const sbmgft::SampledGraph graph = sbmgft::sample_graph(spec, seed);
    const std::string edges = "edges_seed_" + std::to_string(seed) + ".csv";
    const std::string header = "graph_seed_" + std::to_string(seed) + ".json";
    sbmgft::write_graph(graph, rec.path(edges), rec.path(header),
                        rec.config_hash());
    rec.record(edges);
    rec.record(header);
  }
  rec.finish();
  return 0;
}

int run_gft_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const json spec_json = resolve_spec_json(config, opts.config_path);
  const sbmgft::SBMSpec spec =
      sbmgft::spec_from_config(sbmgft::parse_spec(spec_json));
  if (!config.contains("signal"))
    throw sbmgft::validation_error("gft config needs a \"signal\" CSV path");
  fs::path signal_path = config["signal"].get<std::string>();
  if (signal_path.is_relative() && !opts.config_path.empty())
    signal_path = fs::path(opts.config_path).parent_path() / signal_path;
  const Eigen::VectorXd x = sbmgft::read_signal_csv(signal_path);

  RunRecorder rec(opts.out_dir, describe("gft", opts, config));
  const sbmgft::SBMFourierBasis basis = sbmgft::sbm_fourier_basis(spec);
  const sbmgft::FourierResult result = sbmgft::sbm_fourier_transform(basis, x);

  sbmgft::CsvWriter csv(rec.path("gft.csv"), rec.config_hash(),
                        {"w_eigenvalue", "projection_norm", "coefficient"});
  for (std::size_t g = 0; g < result.projections.size(); ++g) {
    const double coeff =
        result.coefficients && basis.groups[g].multiplicity() == 1
            ? (*result.coefficients)(basis.groups[g].positions.front()).real()
            : std::numeric_limits<double>::quiet_NaN();
    csv.write_numeric_row({result.lambdas(g) * basis.n_vertices,
                           result.projections[g].norm(), coeff});
  }
  csv.write_numeric_row({0.0, result.zero_component.norm(),
                         result.zero_component.norm()});
  rec.record("gft.csv");
  rec.finish();
  return 0;
}

int run_compare_bases_cmd(const CommonOptions& opts) {
  const json config = load_config(opts);
  const json spec_json = resolve_spec_json(config, opts.config_path);
  const auto parsed = sbmgft::parse_spec(spec_json);
  if (!std::holds_alternative<sbmgft::CayleySpecConfig>(parsed))
    throw sbmgft::validation_error(
        "compare-bases needs a Cayley spec (group + connection)");
  const auto& cayley = std::get<sbmgft::CayleySpecConfig>(parsed);
  const sbmgft::SBMSpec spec = cayley.to_sbm_spec();

  RunRecorder rec(opts.out_dir, describe("compare-bases", opts, config));
  const sbmgft::SBMFourierBasis basis = sbmgft::sbm_fourier_basis(spec);
  const sbmgft::TransferredBasis reference = sbmgft::transferred_character_basis(
      cayley.group, cayley.connection, spec.mu, spec.n_vertices);
  const Eigen::VectorXd agreement =
      sbmgft::transferred_agreement(reference, basis);

  sbmgft::CsvWriter csv(rec.path("compare_bases.csv"), rec.config_hash(),
                        {"i", "agreement", "cayley_eigenvalue"});
  for (int i = 0; i < agreement.size(); ++i)
    csv.write_numeric_row({static_cast<double>(i + 1), agreement(i),
                           reference.source.eigenvalues(i)});
  rec.record("compare_bases.csv");
  rec.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-model Fourier transform toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;
  const std::vector<std::string> kinds = {
      "basis",        "sample",   "gft",      "compare-bases",
      "perturb-sweep", "z5-table1", "z5-table2", "z5-fig4",
      "z5-fig5a",     "z5-fig5b", "convergence-check"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind);
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seeds, "sampling seed(s)");
    sub->add_option("--scale", opts.scale, "override the default graph size N");
    subs[kind] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    if (kind == "z5-table1") return run_z5_table1_cmd(opts);
    if (kind == "z5-table2") return run_z5_table2_cmd(opts);
    if (kind == "z5-fig4" || kind == "z5-fig5a" || kind == "z5-fig5b")
      return run_agreement_cmd(opts, kind);
    if (kind == "perturb-sweep") return run_perturb_sweep_cmd(opts);
    if (kind == "convergence-check") return run_convergence_cmd(opts);
    if (kind == "basis") return run_basis_cmd(opts);
    if (kind == "sample") return run_sample_cmd(opts);
    if (kind == "gft") return run_gft_cmd(opts);
    if (kind == "compare-bases") return run_compare_bases_cmd(opts);
    throw sbmgft::validation_error("unknown subcommand: " + kind);
  } catch (const sbmgft::convergence_error& e) {
    std::cerr << "solver non-convergence: " << e.what()
              << " (achieved residual " << e.achieved_residual() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
