#pragma once

#include "kstep/landscape.hpp"
#include "kstep/optimizers.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace kstep {

enum class Check { kEqual, kAtLeast, kAtMost, kBelow };

// A reference number addressed by (table, row, column); see measure().
struct GoldenCell {
  std::string table;
  std::string row;
  std::string column;
  double expected = 0.0;
  double tol = 1e-3;
  Check check = Check::kEqual;
};

struct Experiment {
  std::string name;
  std::string title;
  std::shared_ptr<const TabularMdp> mdp;
  std::shared_ptr<const PolicyClass> cls;
  int crit = 0;
  int star = 0;
  std::vector<int> ks;
  std::vector<GoldenCell> golden;
  int k_esc_search_max = 60;
};

class UnknownExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);
Experiment make_experiment(const std::string& name);

Experiment make_two_state();
Experiment make_number_matching();
Experiment make_button_press();
Experiment make_moat_cross();
Experiment make_two_path();

// Config document: {mdp: {...} | "path.json", policy_class: {kind, ...},
// pi_crit: label | index, pi_star?: label | index, k: [...], optimizer: {...},
// out: path, seed: int}. Relative paths resolve against base_dir.
Experiment experiment_from_config(const nlohmann::json& config, const std::filesystem::path& base_dir);
PolicyClass class_from_config(const TabularMdp& mdp, const nlohmann::json& spec);

// Tables understood by measure():
//   values        rows J_crit, J_star, J_best            column mu
//   J_crit        row = state label                      column J
//   occupancy     row = state label                      column d
//   grad_coef     row = state label                      column coef  (d / (1 - gamma))
//   advantage_k1  row = policy label                     column state label | weighted
//   advantage_min row weighted_k1                        column min
//   q_k1, a_k1    row = state label                      column action label
//   kstar         row "k=<k>"                            column state label | weighted
//   k_esc         row toward_best | any_direction        column k | k_kstep
//   sweep         row "k=<k>"                            column interior_max_theta |
//                 stationary_points | start_is_min | end_is_min | forward_difference |
//                 chord_deviation
double measure(const Experiment& exp, const std::string& table, const std::string& row,
               const std::string& column);

struct CellResult {
  GoldenCell cell;
  double actual = 0.0;
  bool pass = false;
};

struct TableResult {
  std::string table;
  std::vector<CellResult> cells;
  bool pass = true;
};

struct GoldenReport {
  std::string experiment;
  std::vector<TableResult> tables;
  bool pass = true;
};

GoldenReport check_golden(const Experiment& exp);
nlohmann::json golden_to_json(const GoldenReport& report);

struct RunConfig {
  std::vector<int> ks;  // empty: the experiment's defaults
  std::vector<Method> methods{Method::kProjectedGd, Method::kMirrorEntropy};
  int max_iters = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  int threads = 0;  // 0: hardware concurrency
};

// Writes <out>/<name>/k<k>/{tables.csv, trace_pgd.csv, trace_mirror.csv,
// report.json} and <out>/<name>/summary.json; returns the summary.
nlohmann::json run_experiment(const Experiment& exp, const RunConfig& config);

struct VerifySummary {
  int experiments_passed = 0;
  int experiments_total = 0;
  int tables_matched = 0;
  int tables_total = 0;
  std::vector<GoldenReport> reports;

  bool pass() const { return experiments_passed == experiments_total && tables_matched == tables_total; }
  std::string line() const;
};

// Overlays the "k", "optimizer" {method, max_iters}, "out" and "seed" keys of a
// config document on top of `defaults`.
RunConfig run_config_from_json(const nlohmann::json& config, RunConfig defaults);

// Runs every registered experiment and golden check, writing the output tree
// and <out>/verify.json.
VerifySummary verify_all(const RunConfig& config);

// Deterministic file helpers used by the runners.
void write_text(const std::filesystem::path& path, const std::string& text);
std::vector<int> parse_k_list(const std::string& text);

}  // namespace kstep
