#include "kstep/experiments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>

namespace kstep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int state_index(const TabularMdp& mdp, const std::string& label) {
  auto s = mdp.find_state(label);
  if (!s) throw std::invalid_argument(fmt::format("unknown state '{}'", label));
  return *s;
}

int parse_k_row(const std::string& row) {
  if (row.rfind("k=", 0) != 0) throw std::invalid_argument(fmt::format("expected row 'k=<k>', got '{}'", row));
  return std::stoi(row.substr(2));
}

// Advantage of class member `idx` against the critical policy at horizon k.
AdvantageTable advantage_row(const Experiment& exp, int k, int idx) {
  auto pair = std::make_shared<PolicyClass>();
  pair->policies.push_back((*exp.cls)[exp.crit]);
  pair->labels.push_back(exp.cls->label(exp.crit));
  if (idx != exp.crit) {
    pair->policies.push_back((*exp.cls)[idx]);
    pair->labels.push_back(exp.cls->label(idx));
  }
  const KStepModel model(exp.mdp, pair, k);
  Vector base = Vector::Zero(pair->size());
  base(0) = 1.0;
  return kstep_advantage_table(model, base);
}

double table_cell(const Experiment& exp, const AdvantageTable& table, const std::string& column) {
  const auto row = static_cast<Eigen::Index>(table.policy_labels.size() - 1);
  if (column == "weighted") return table.weighted(row);
  if (column == "weighted_kstep") return table.weighted_kstep(row);
  return table.advantage(row, state_index(*exp.mdp, column));
}

double sweep_metric(const Experiment& exp, int k, const std::string& column) {
  const auto curve = theta_sweep(*exp.mdp, (*exp.cls)[exp.crit], (*exp.cls)[exp.star], k);
  if (column == "interior_max_theta") {
    const auto maxima = interior_local_maxima(curve);
    if (maxima.empty()) return kNaN;
    int best = maxima.front();
    for (int i : maxima) {
      if (curve.value[static_cast<std::size_t>(i)] > curve.value[static_cast<std::size_t>(best)]) best = i;
    }
    return curve.theta[static_cast<std::size_t>(best)];
  }
  if (column == "stationary_points") return static_cast<double>(interior_stationary_points(curve).size());
  if (column == "start_is_min") return local_min_at_start(curve) ? 1.0 : 0.0;
  if (column == "end_is_min") return local_min_at_end(curve) ? 1.0 : 0.0;
  if (column == "forward_difference") return forward_difference_at_start(curve);
  if (column == "chord_deviation") return max_chord_deviation(curve);
  throw std::invalid_argument(fmt::format("unknown sweep metric '{}'", column));
}

}  // namespace

double measure(const Experiment& exp, const std::string& table, const std::string& row,
               const std::string& column) {
  const auto& mdp = *exp.mdp;
  const auto& cls = *exp.cls;
  const auto& crit = cls[exp.crit];
  if (table == "values") {
    if (row == "J_crit") return policy_value(mdp, crit);
    if (row == "J_star") return policy_value(mdp, cls[exp.star]);
    if (row == "J_best") return best_deterministic(mdp, cls).value;
  } else if (table == "J_crit") {
    return evaluate_policy(mdp, crit)(state_index(mdp, row));
  } else if (table == "occupancy") {
    return occupancy(mdp, crit)(state_index(mdp, row));
  } else if (table == "grad_coef") {
    return occupancy(mdp, crit)(state_index(mdp, row)) / (1.0 - mdp.gamma);
  } else if (table == "advantage_k1") {
    const auto idx = cls.index_of(row);
    if (!idx) throw std::invalid_argument(fmt::format("unknown policy '{}'", row));
    return table_cell(exp, advantage_row(exp, 1, *idx), column);
  } else if (table == "advantage_min") {
    const KStepModel model(exp.mdp, exp.cls, 1);
    const auto report = certify_critical(model, dirac(exp.cls, exp.crit).weights());
    return report.worst_value;
  } else if (table == "q_k1" || table == "a_k1") {
    const int s = state_index(mdp, row);
    const auto a = mdp.find_action(column);
    if (!a) throw std::invalid_argument(fmt::format("unknown action '{}'", column));
    const Matrix q = q_values(mdp, crit);
    return table == "q_k1" ? q(s, *a) : q(s, *a) - evaluate_policy(mdp, crit)(s);
  } else if (table == "kstar") {
    return table_cell(exp, advantage_row(exp, parse_k_row(row), exp.star), column);
  } else if (table == "k_esc") {
    const auto mode = row == "toward_best" ? EscapeMode::kTowardBest : EscapeMode::kAnyDirection;
    const auto weighting = column == "k_kstep" ? Weighting::kKStepOccupancy : Weighting::kBaseOccupancy;
    const auto k = find_k_esc(mdp, dirac(exp.cls, exp.crit), exp.k_esc_search_max, mode, weighting, exp.star);
    return k ? static_cast<double>(*k) : kNaN;
  } else if (table == "sweep") {
    return sweep_metric(exp, parse_k_row(row), column);
  }
  throw std::invalid_argument(fmt::format("unknown golden cell {}/{}/{}", table, row, column));
}

GoldenReport check_golden(const Experiment& exp) {
  GoldenReport report;
  report.experiment = exp.name;
  std::map<std::string, std::size_t> slot;
  for (const auto& cell : exp.golden) {
    auto [it, fresh] = slot.try_emplace(cell.table, report.tables.size());
    if (fresh) report.tables.push_back({cell.table, {}, true});
    auto& table = report.tables[it->second];
    CellResult result{cell, measure(exp, cell.table, cell.row, cell.column), false};
    switch (cell.check) {
      case Check::kEqual:
        result.pass = std::abs(result.actual - cell.expected) <= cell.tol;
        break;
      case Check::kAtLeast:
        result.pass = result.actual >= cell.expected;
        break;
      case Check::kAtMost:
        result.pass = result.actual <= cell.expected;
        break;
      case Check::kBelow:
        result.pass = result.actual < cell.expected;
        break;
    }
    table.pass = table.pass && result.pass;
    report.pass = report.pass && result.pass;
    table.cells.push_back(std::move(result));
  }
  return report;
}

namespace {

const char* check_name(Check check) {
  switch (check) {
    case Check::kEqual: return "equal";
    case Check::kAtLeast: return "at_least";
    case Check::kAtMost: return "at_most";
    case Check::kBelow: return "below";
  }
  return "?";
}

}  // namespace

nlohmann::json golden_to_json(const GoldenReport& report) {
  nlohmann::json doc;
  doc["experiment"] = report.experiment;
  doc["pass"] = report.pass;
  auto tables = nlohmann::json::array();
  for (const auto& table : report.tables) {
    auto cells = nlohmann::json::array();
    for (const auto& c : table.cells) {
      cells.push_back({{"row", c.cell.row},
                       {"column", c.cell.column},
                       {"check", check_name(c.cell.check)},
                       {"expected", c.cell.expected},
                       {"tol", c.cell.tol},
                       {"actual", std::isfinite(c.actual) ? nlohmann::json(c.actual) : nlohmann::json()},
                       {"pass", c.pass}});
    }
    tables.push_back({{"table", table.table}, {"pass", table.pass}, {"cells", std::move(cells)}});
  }
  doc["tables"] = std::move(tables);
  return doc;
}

}  // namespace kstep
