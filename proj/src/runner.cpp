#include "kstep/experiments.hpp"

#include "kstep/mdp_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace kstep {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << text;
}

std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> ks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int k = std::stoi(item, &used);
    if (used != item.size() || k < 1) throw std::invalid_argument(fmt::format("bad k value '{}'", item));
    ks.push_back(k);
  }
  if (ks.empty()) throw std::invalid_argument("empty k list");
  return ks;
}

namespace {

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json optional_k(const std::optional<int>& k) { return k ? nlohmann::json(*k) : nlohmann::json(); }

nlohmann::json top_weights(const PolicyClass& cls, const Vector& w, int count) {
  std::vector<int> order(static_cast<std::size_t>(w.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
  auto out = nlohmann::json::array();
  for (int i = 0; i < std::min<int>(count, static_cast<int>(order.size())); ++i) {
    const int idx = order[static_cast<std::size_t>(i)];
    out.push_back({{"policy", cls.label(idx)}, {"weight", w(idx)}});
  }
  return out;
}

nlohmann::json run_k(const Experiment& exp, const RunConfig& config, int k, const Vector& values,
                     int best) {
  const auto& mdp = *exp.mdp;
  const auto& cls = *exp.cls;
  const auto dir = config.out / exp.name / fmt::format("k{}", k);
  const KStepModel model(exp.mdp, exp.cls, k);
  const Vector crit_w = dirac(exp.cls, exp.crit).weights();
  const auto table = kstep_advantage_table(model, crit_w);
  write_text(dir / "tables.csv", table.to_csv());

  const double gk = std::pow(mdp.gamma, k);
  nlohmann::json report;
  report["experiment"] = exp.name;
  report["k"] = k;
  report["pi_crit"] = cls.label(exp.crit);
  report["pi_star"] = cls.label(exp.star);
  report["pi_best"] = cls.label(best);
  report["J_crit"] = values(exp.crit);
  report["J_star"] = values(exp.star);
  report["J_best"] = values(best);
  report["J_k_crit"] = model.value(crit_w);
  report["gap_bound"] = critical_gap_bound(mdp, k);
  report["star_weighted_advantage"] = table.weighted(exp.star);
  report["star_weighted_advantage_kstep"] = table.weighted_kstep(exp.star);
  report["directional_derivative_to_star"] = table.weighted_kstep(exp.star) / (1.0 - gk);
  for (const auto weighting : {Weighting::kBaseOccupancy, Weighting::kKStepOccupancy}) {
    const auto crit = certify_critical(model, crit_w, kCriticalTolerance, weighting);
    report[weighting == Weighting::kBaseOccupancy ? "critical_base_occupancy" : "critical_kstep_occupancy"] = {
        {"certified", crit.certified},
        {"worst_policy", cls.label(crit.worst_index)},
        {"worst_value", crit.worst_value}};
  }

  auto optimizers = nlohmann::json::object();
  for (const auto method : config.methods) {
    OptimizerConfig opt;
    opt.method = method;
    opt.k = k;
    opt.max_iters = config.max_iters;
    opt.seed = config.seed;
    opt.keep_vectors = false;
    const auto trace = descent_run(model, crit_w, opt);
    write_text(dir / fmt::format("trace_{}.csv", method_name(method)), trace.to_csv());
    const auto& last = trace.last();
    optimizers[method_name(method)] = {
        {"iterations", last.iter},
        {"beta", trace.beta},
        {"step_size", trace.step_size},
        {"beta_doublings", trace.beta_doublings},
        {"monotonicity_violations", trace.monotonicity_violations},
        {"final_J_k", last.value_k},
        {"final_E_J1", last.expected_value},
        {"final_gap", last.gap},
        {"within_bound", last.gap <= critical_gap_bound(mdp, k) + 1e-9},
        {"top_weights", top_weights(cls, trace.final_weights, 5)}};
  }
  report["optimizers"] = std::move(optimizers);
  write_text(dir / "report.json", report.dump(2) + "\n");
  return report;
}

}  // namespace

nlohmann::json run_experiment(const Experiment& exp, const RunConfig& config) {
  const auto ks = config.ks.empty() ? exp.ks : config.ks;
  const auto& mdp = *exp.mdp;
  const Vector values = deterministic_values(mdp, *exp.cls);
  Eigen::Index best = 0;
  values.minCoeff(&best);

  std::vector<nlohmann::json> per_k(ks.size());
  parallel_for(static_cast<int>(ks.size()), config.threads, [&](int i) {
    per_k[static_cast<std::size_t>(i)] = run_k(exp, config, ks[static_cast<std::size_t>(i)], values, static_cast<int>(best));
  });

  const auto crit = dirac(exp.cls, exp.crit);
  nlohmann::json summary;
  summary["experiment"] = exp.name;
  summary["title"] = exp.title;
  summary["n_states"] = mdp.n_states;
  summary["n_actions"] = mdp.n_actions;
  summary["n_policies"] = exp.cls->size();
  summary["gamma"] = mdp.gamma;
  summary["g_max"] = mdp.g_max;
  summary["pi_crit"] = exp.cls->label(exp.crit);
  summary["pi_star"] = exp.cls->label(exp.star);
  summary["J_crit"] = values(exp.crit);
  summary["J_star"] = values(exp.star);
  summary["J_best"] = values(best);
  summary["occupancy_crit"] = to_std(occupancy(mdp, (*exp.cls)[exp.crit]));
  summary["state_labels"] = [&] {
    std::vector<std::string> labels;
    for (int s = 0; s < mdp.n_states; ++s) labels.push_back(mdp.state_label(s));
    return labels;
  }();
  summary["k_esc"] = {
      {"toward_best", optional_k(find_k_esc(mdp, crit, exp.k_esc_search_max, EscapeMode::kTowardBest,
                                            Weighting::kBaseOccupancy, exp.star))},
      {"any_direction", optional_k(find_k_esc(mdp, crit, exp.k_esc_search_max, EscapeMode::kAnyDirection,
                                              Weighting::kBaseOccupancy, exp.star))},
      {"toward_best_kstep", optional_k(find_k_esc(mdp, crit, exp.k_esc_search_max, EscapeMode::kTowardBest,
                                                  Weighting::kKStepOccupancy, exp.star))},
      {"any_direction_kstep", optional_k(find_k_esc(mdp, crit, exp.k_esc_search_max,
                                                    EscapeMode::kAnyDirection, Weighting::kKStepOccupancy, exp.star))}};
  summary["ks"] = ks;
  summary["runs"] = per_k;
  write_text(config.out / exp.name / "summary.json", summary.dump(2) + "\n");
  return summary;
}

std::string VerifySummary::line() const {
  return fmt::format("{}/{} experiments, {}/{} tables matched", experiments_passed, experiments_total,
                     tables_matched, tables_total);
}

VerifySummary verify_all(const RunConfig& config) {
  VerifySummary summary;
  nlohmann::json doc;
  auto experiments = nlohmann::json::array();
  for (const auto& name : experiment_names()) {
    const auto exp = make_experiment(name);
    run_experiment(exp, config);
    auto report = check_golden(exp);
    write_text(config.out / name / "golden.json", golden_to_json(report).dump(2) + "\n");
    ++summary.experiments_total;
    if (report.pass) ++summary.experiments_passed;
    int matched = 0;
    for (const auto& table : report.tables) matched += table.pass ? 1 : 0;
    summary.tables_matched += matched;
    summary.tables_total += static_cast<int>(report.tables.size());
    experiments.push_back({{"experiment", name},
                           {"pass", report.pass},
                           {"tables_matched", matched},
                           {"tables_total", report.tables.size()}});
    summary.reports.push_back(std::move(report));
  }
  doc["experiments"] = std::move(experiments);
  doc["summary"] = summary.line();
  doc["seed"] = config.seed;
  write_text(config.out / "verify.json", doc.dump(2) + "\n");
  return summary;
}

RunConfig run_config_from_json(const nlohmann::json& config, RunConfig defaults) {
  if (config.contains("k")) {
    defaults.ks = config["k"].get<std::vector<int>>();
    for (int k : defaults.ks) {
      if (k < 1) throw std::invalid_argument("k entries must be at least 1");
    }
  }
  if (config.contains("optimizer")) {
    const auto& opt = config["optimizer"];
    if (opt.contains("method")) defaults.methods = {parse_method(opt["method"].get<std::string>())};
    if (opt.contains("max_iters")) defaults.max_iters = opt["max_iters"].get<int>();
  }
  if (config.contains("out")) defaults.out = config["out"].get<std::string>();
  if (config.contains("seed")) defaults.seed = config["seed"].get<std::uint64_t>();
  return defaults;
}

namespace {

std::vector<std::vector<int>> int_matrix(const nlohmann::json& j) { return j.get<std::vector<std::vector<int>>>(); }

FactoredSpace factored_from(const nlohmann::json& spec) {
  FactoredSpace space;
  space.state_sizes = spec.at("state_sizes").get<std::vector<int>>();
  space.action_sizes = spec.at("action_sizes").get<std::vector<int>>();
  if (spec.contains("admissible")) {
    space.admissible = spec["admissible"].get<std::vector<std::vector<std::vector<int>>>>();
  }
  return space;
}

int policy_ref(const PolicyClass& cls, const nlohmann::json& ref, const char* what) {
  if (ref.is_number_integer()) {
    const int idx = ref.get<int>();
    if (idx < 0 || idx >= cls.size()) throw std::invalid_argument(fmt::format("{} index {} out of range", what, idx));
    return idx;
  }
  const auto label = ref.get<std::string>();
  const auto idx = cls.index_of(label);
  if (!idx) throw std::invalid_argument(fmt::format("{} '{}' is not in the policy class", what, label));
  return *idx;
}

Check parse_check(const std::string& name) {
  if (name == "equal") return Check::kEqual;
  if (name == "at_least") return Check::kAtLeast;
  if (name == "at_most") return Check::kAtMost;
  if (name == "below") return Check::kBelow;
  throw std::invalid_argument(fmt::format("unknown check '{}'", name));
}

}  // namespace

PolicyClass class_from_config(const TabularMdp& mdp, const nlohmann::json& spec) {
  const auto kind = spec.at("kind").get<std::string>();
  const auto cap = spec.value("cap", kDefaultEnumerationCap);
  if (kind == "unrestricted") return build_unrestricted_class(mdp, cap);
  if (kind == "state_aggregation") {
    return build_state_aggregation_class(mdp, ObservationMap{spec.at("obs").get<std::vector<int>>()}, cap);
  }
  if (kind == "independent_agents") return build_independent_agents_class(mdp, factored_from(spec), cap);
  if (kind == "decentralized") {
    std::vector<ObservationMap> maps;
    for (auto& row : int_matrix(spec.at("obs_maps"))) maps.push_back({std::move(row)});
    return build_decentralized_class(mdp, factored_from(spec), maps, cap);
  }
  if (kind == "group_decentralized") {
    GroupingFunction grouping{spec.at("groups_at").get<std::vector<std::vector<std::vector<int>>>>()};
    return build_group_decentralized_class(mdp, factored_from(spec), grouping, cap);
  }
  if (kind == "explicit") {
    auto cls = class_from_json(spec);
    require_valid_class(mdp, cls);
    return cls;
  }
  throw std::invalid_argument(fmt::format("unknown policy class kind '{}'", kind));
}

Experiment experiment_from_config(const nlohmann::json& config, const std::filesystem::path& base_dir) {
  Experiment exp;
  exp.name = config.value("name", std::string("custom"));
  exp.title = config.value("title", exp.name);
  const auto& mdp_doc = config.at("mdp");
  auto mdp = mdp_doc.is_string() ? load_mdp(base_dir / mdp_doc.get<std::string>()) : mdp_from_json(mdp_doc);
  auto cls = class_from_config(mdp, config.at("policy_class"));
  exp.crit = policy_ref(cls, config.at("pi_crit"), "pi_crit");
  exp.star = config.contains("pi_star") ? policy_ref(cls, config["pi_star"], "pi_star")
                                        : best_deterministic(mdp, cls).index;
  exp.mdp = std::make_shared<const TabularMdp>(std::move(mdp));
  exp.cls = std::make_shared<const PolicyClass>(std::move(cls));
  exp.ks = config.contains("k") ? config["k"].get<std::vector<int>>() : std::vector<int>{1};
  if (config.contains("golden")) {
    for (const auto& cell : config["golden"]) {
      exp.golden.push_back({cell.at("table").get<std::string>(), cell.at("row").get<std::string>(),
                            cell.at("column").get<std::string>(), cell.at("expected").get<double>(),
                            cell.value("tol", 1e-3), parse_check(cell.value("check", std::string("equal")))});
    }
  }
  return exp;
}

}  // namespace kstep
