#include "kstep/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUnknown = 2;

void print_registry(std::ostream& out) {
  out << "registered experiments:\n";
  for (const auto& name : kstep::experiment_names()) {
    const auto exp = kstep::make_experiment(name);
    out << fmt::format("  {:<16} {} ({} states, {} policies)\n", name, exp.title, exp.mdp->n_states,
                       exp.cls->size());
  }
}

bool looks_like_config(const std::string& arg) {
  return arg.size() > 5 && arg.substr(arg.size() - 5) == ".json";
}

kstep::Experiment resolve(const std::string& arg, nlohmann::json* config_out) {
  if (kstep::is_experiment(arg)) return kstep::make_experiment(arg);
  if (looks_like_config(arg)) {
    std::ifstream in(arg);
    if (!in) throw std::runtime_error(fmt::format("cannot open config {}", arg));
    auto config = nlohmann::json::parse(in);
    const auto base = std::filesystem::path(arg).parent_path();
    auto exp = kstep::experiment_from_config(config, base);
    if (config_out) *config_out = std::move(config);
    return exp;
  }
  throw kstep::UnknownExperiment(fmt::format("unknown experiment '{}'", arg));
}

int cmd_run(const std::string& target, const std::string& ks, const std::string& optimizer,
            const std::string& out, std::optional<std::uint64_t> seed, std::optional<int> iters,
            int threads) {
  nlohmann::json config = nlohmann::json::object();
  const auto exp = resolve(target, &config);
  kstep::RunConfig run = kstep::run_config_from_json(config, {});
  if (!ks.empty()) run.ks = kstep::parse_k_list(ks);
  if (!optimizer.empty() && optimizer != "both") run.methods = {kstep::parse_method(optimizer)};
  if (!out.empty()) run.out = out;
  if (seed) run.seed = *seed;
  if (iters) run.max_iters = *iters;
  run.threads = threads;
  const auto summary = kstep::run_experiment(exp, run);
  std::cout << fmt::format("{}: wrote {}\n", exp.name, (run.out / exp.name).string());
  for (const auto& r : summary["runs"]) {
    std::cout << fmt::format("  k={:<3} J_k(crit)={:.6f}", r["k"].get<int>(), r["J_k_crit"].get<double>());
    for (const auto& [method, res] : r["optimizers"].items()) {
      std::cout << fmt::format("  {}: gap={:.4f} iters={}", method, res["final_gap"].get<double>(),
                               res["iterations"].get<int>());
    }
    std::cout << "\n";
  }
  if (!exp.golden.empty()) {
    const auto report = kstep::check_golden(exp);
    kstep::write_text(run.out / exp.name / "golden.json", kstep::golden_to_json(report).dump(2) + "\n");
    std::cout << fmt::format("golden: {}\n", report.pass ? "pass" : "FAIL");
    return report.pass ? 0 : kExitMismatch;
  }
  return 0;
}

int cmd_tables(const std::string& target, int k) {
  const auto exp = resolve(target, nullptr);
  const kstep::KStepModel model(exp.mdp, exp.cls, k);
  const auto table = kstep::kstep_advantage_table(model, kstep::dirac(exp.cls, exp.crit).weights());
  std::cout << table.to_csv();
  return 0;
}

int cmd_sweep(const std::string& target, int k, double grid) {
  const auto exp = resolve(target, nullptr);
  const auto curve = kstep::theta_sweep(*exp.mdp, (*exp.cls)[exp.crit], (*exp.cls)[exp.star], k, grid);
  std::cout << "theta,value\n";
  for (std::size_t i = 0; i < curve.theta.size(); ++i) {
    std::cout << fmt::format("{:.6f},{:.12f}\n", curve.theta[i], curve.value[i] + 0.0);
  }
  return 0;
}

void print_mismatches(const kstep::VerifySummary& summary) {
  for (const auto& report : summary.reports) {
    for (const auto& table : report.tables) {
      for (const auto& c : table.cells) {
        if (c.pass) continue;
        std::cerr << fmt::format("  {}/{} [{}, {}]: expected {:.6g}, got {:.6g}\n", report.experiment,
                                 table.table, c.cell.row, c.cell.column, c.cell.expected, c.actual);
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-step policy gradients on finite MDPs"};
  app.require_subcommand(1);

  std::string target;
  std::string ks;
  std::string optimizer;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  int threads = 0;
  int k = 1;
  double grid = 1e-3;

  auto* run = app.add_subcommand("run", "run an experiment or a JSON config and write the output tree");
  run->add_option("target", target, "experiment name or config.json")->required();
  run->add_option("--k", ks, "comma-separated horizons, e.g. 1,3,7");
  run->add_option("--optimizer", optimizer, "pgd, mirror or both")->check(CLI::IsMember({"pgd", "mirror", "both"}));
  run->add_option("--out", out, "output directory");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--iters", iters, "iteration budget per optimizer");
  run->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* tables = app.add_subcommand("tables", "print the advantage table at the critical policy as CSV");
  tables->add_option("target", target, "experiment name or config.json")->required();
  tables->add_option("--k", k, "horizon")->required()->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "print J_k along the segment from the critical to the best policy");
  sweep->add_option("target", target, "experiment name or config.json")->required();
  sweep->add_option("--k", k, "horizon")->required()->check(CLI::PositiveNumber);
  sweep->add_option("--grid", grid, "grid step in (0, 1]")->check(CLI::Range(1e-9, 1.0));

  auto* verify = app.add_subcommand("verify", "run every experiment and compare against the golden tables");
  verify->add_option("--out", out, "output directory");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--threads", threads, "worker threads (0: all cores)");

  app.add_subcommand("list", "show the experiment registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(target, ks, optimizer, out, seed, iters, threads);
    if (*tables) return cmd_tables(target, k);
    if (*sweep) return cmd_sweep(target, k, grid);
    if (*verify) {
      kstep::RunConfig config;
      if (!out.empty()) config.out = out;
      if (seed) config.seed = *seed;
      config.threads = threads;
      const auto summary = kstep::verify_all(config);
      std::cout << summary.line() << "\n";
      if (!summary.pass()) {
        print_mismatches(summary);
        return kExitMismatch;
      }
      return 0;
    }
    print_registry(std::cout);
    return 0;
  } catch (const kstep::UnknownExperiment& e) {
    std::cerr << e.what() << "\n";
    print_registry(std::cerr);
    return kExitUnknown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  }
}
