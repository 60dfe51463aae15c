#include "support.hpp"

#include "kstep/mdp_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace kstep;
using namespace kstep::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("kstep_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("registry holds exactly the five experiments") {
  CHECK(experiment_names() ==
        std::vector<std::string>{"two_state", "number_matching", "button_press", "moat_cross", "two_path"});
  CHECK(is_experiment("moat_cross"));
  CHECK_FALSE(is_experiment("nosuch"));
  CHECK_THROWS_AS(make_experiment("nosuch"), UnknownExperiment);
}

TEST_CASE("every registered experiment passes its golden tables") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    const auto exp = make_experiment(name);
    CHECK(exp.crit != exp.star);
    CHECK_FALSE(exp.golden.empty());
    const auto report = check_golden(exp);
    for (const auto& table : report.tables) {
      for (const auto& cell : table.cells) {
        CAPTURE(table.table);
        CAPTURE(cell.cell.row);
        CAPTURE(cell.cell.column);
        CHECK(cell.pass);
      }
    }
  }
}

TEST_CASE("measure exposes the printed reference numbers") {
  const auto nm = make_experiment("number_matching");
  CHECK(measure(nm, "values", "J_crit", "mu") == doctest::Approx(-24.2).epsilon(1e-4));
  CHECK(measure(nm, "values", "J_star", "mu") == doctest::Approx(-95.8).epsilon(1e-4));
  CHECK(std::abs(measure(nm, "advantage_k1", "(a0,a1)", "weighted") - 11.92) < 1e-3);
  CHECK(std::abs(measure(nm, "kstar", "k=25", "weighted") + 55.4168) < 1e-3);

  const auto moat = make_experiment("moat_cross");
  CHECK(std::abs(measure(moat, "q_k1", "4", "0") + 6.561) < 1e-3);
  CHECK(std::abs(measure(moat, "q_k1", "4", "+1") + 3.205) < 1e-3);

  const auto two_state = make_experiment("two_state");
  CHECK(measure(two_state, "grad_coef", "sL", "coef") == doctest::Approx(4.6));
  CHECK(measure(two_state, "grad_coef", "sR", "coef") == doctest::Approx(0.4));
  CHECK_THROWS_AS(measure(two_state, "nosuch", "x", "y"), std::invalid_argument);
}

TEST_CASE("config documents build experiments from inline or file MDPs") {
  const auto dir = scratch("config");
  const auto nm = make_experiment("number_matching");
  fs::create_directories(dir);
  save_mdp(*nm.mdp, dir / "nm.json");
  nlohmann::json config = {
      {"name", "nm_copy"},
      {"mdp", "nm.json"},
      {"policy_class", {{"kind", "independent_agents"}, {"state_sizes", {2, 2}}, {"action_sizes", {2, 2}}}},
      {"pi_crit", "00,00"},
      {"k", {1, 3}},
      {"optimizer", {{"method", "mirror"}, {"max_iters", 50}}},
      {"seed", 4},
      {"golden", {{{"table", "k_esc"}, {"row", "toward_best"}, {"column", "k"}, {"expected", 3}}}}};
  const auto exp = experiment_from_config(config, dir);
  CHECK(exp.cls->size() == 16);
  CHECK(policy_value(*exp.mdp, (*exp.cls)[exp.star]) == doctest::Approx(-95.8).epsilon(1e-4));
  CHECK(check_golden(exp).pass);

  const auto run = run_config_from_json(config, RunConfig{});
  CHECK(run.ks == std::vector<int>{1, 3});
  CHECK(run.methods == std::vector<Method>{Method::kMirrorEntropy});
  CHECK(run.max_iters == 50);
  CHECK(run.seed == 4);

  config["mdp"] = mdp_to_json(*nm.mdp);
  config["pi_crit"] = "99";
  CHECK_THROWS_AS(experiment_from_config(config, dir), std::invalid_argument);
  config["pi_crit"] = 0;
  config["policy_class"] = {{"kind", "wavelets"}};
  CHECK_THROWS_AS(experiment_from_config(config, dir), std::invalid_argument);
  config["k"] = {0};
  CHECK_THROWS_AS(run_config_from_json(config, RunConfig{}), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("run_experiment writes the per-k tree and is thread-count independent") {
  const auto exp = make_experiment("two_path");
  RunConfig config;
  config.ks = {1, 4};
  config.max_iters = 100;
  config.out = scratch("run_a");
  config.threads = 1;
  const auto summary = run_experiment(exp, config);
  CHECK(summary["k_esc"]["toward_best"] == 4);
  for (const char* file : {"tables.csv", "trace_pgd.csv", "trace_mirror.csv", "report.json"}) {
    CHECK(fs::exists(config.out / "two_path" / "k4" / file));
  }
  CHECK(fs::exists(config.out / "two_path" / "summary.json"));
  CHECK(slurp(config.out / "two_path" / "k1" / "tables.csv").rfind("policy,(1,1),", 0) == 0);

  auto parallel = config;
  parallel.out = scratch("run_b");
  parallel.threads = 4;
  run_experiment(exp, parallel);
  for (const char* file : {"tables.csv", "trace_pgd.csv", "trace_mirror.csv", "report.json"}) {
    CHECK(slurp(config.out / "two_path" / "k4" / file) == slurp(parallel.out / "two_path" / "k4" / file));
  }
  fs::remove_all(config.out);
  fs::remove_all(parallel.out);
}

TEST_CASE("k list parsing") {
  CHECK(parse_k_list("1,3,7") == std::vector<int>{1, 3, 7});
  CHECK_THROWS_AS(parse_k_list("1,0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_list("2x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_k_list(""), std::invalid_argument);
}
