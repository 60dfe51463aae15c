#include "kstep/landscape.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace kstep {

Vector deterministic_values(const TabularMdp& mdp, const PolicyClass& cls) {
  Vector values(cls.size());
  for (int i = 0; i < cls.size(); ++i) values(i) = policy_value(mdp, cls[i]);
  return values;
}

BestDeterministic best_deterministic(const TabularMdp& mdp, const PolicyClass& cls) {
  if (cls.size() == 0) throw std::invalid_argument("policy class is empty");
  const Vector values = deterministic_values(mdp, cls);
  BestDeterministic best{0, values(0)};
  for (int i = 1; i < cls.size(); ++i) {
    if (values(i) < best.value) best = {i, values(i)};
  }
  return best;
}

CriticalityReport certify_critical(const KStepModel& model, const Vector& w, double tol,
                                   Weighting weighting) {
  const auto table = kstep_advantage_table(model, w);
  CriticalityReport report;
  report.k = model.k();
  report.weighting = weighting;
  report.weighted = table.weighted_by(weighting);
  for (int i = 0; i < model.size(); ++i) {
    if (w(i) == 1.0) report.base_index = i;
  }
  Eigen::Index worst = 0;
  report.worst_value = report.weighted.minCoeff(&worst);
  report.worst_index = static_cast<int>(worst);
  report.certified = report.worst_value >= -tol;
  return report;
}

CriticalityReport certify_critical(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
                                   double tol, Weighting weighting) {
  return certify_critical(KStepModel(std::make_shared<const TabularMdp>(mdp), pi.class_ptr(), k),
                          pi.weights(), tol, weighting);
}

std::optional<int> find_k_esc(const TabularMdp& mdp, const CorrelatedPolicy& crit, int k_max,
                              EscapeMode mode, Weighting weighting, std::optional<int> target) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  if (!target) target = best_deterministic(mdp, crit.policy_class()).index;
  if (*target < 0 || *target >= crit.policy_class().size()) throw std::out_of_range("target index out of range");
  const auto shared = std::make_shared<const TabularMdp>(mdp);
  for (int k = 1; k <= k_max; ++k) {
    const auto report = certify_critical(KStepModel(shared, crit.class_ptr(), k), crit.weights(),
                                         kCriticalTolerance, weighting);
    const double value =
        mode == EscapeMode::kTowardBest ? report.weighted(*target) : report.worst_value;
    if (value < -kCriticalTolerance) return k;
  }
  return std::nullopt;
}

std::vector<double> theta_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
  const int n = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> grid(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
  return grid;
}

SweepCurve theta_sweep(const TabularMdp& mdp, const DeterministicPolicy& pi_a,
                       const DeterministicPolicy& pi_b, int k, double step) {
  if (pi_a == pi_b) throw std::invalid_argument("sweep endpoints must be distinct policies");
  auto pair = std::make_shared<PolicyClass>();
  pair->policies = {pi_a, pi_b};
  const KStepModel model(std::make_shared<const TabularMdp>(mdp), pair, k);
  SweepCurve curve;
  curve.k = k;
  curve.theta = theta_grid(step);
  for (double theta : curve.theta) {
    Vector w(2);
    w << 1.0 - theta, theta;
    curve.value.push_back(model.value(w));
  }
  return curve;
}

namespace {

template <typename Cmp>
std::vector<int> interior_extrema(const SweepCurve& curve, Cmp better) {
  std::vector<int> out;
  const auto& v = curve.value;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const bool not_worse = !better(v[i - 1], v[i]) && !better(v[i + 1], v[i]);
    const bool strictly = better(v[i], v[i - 1]) || better(v[i], v[i + 1]);
    if (not_worse && strictly) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

std::vector<int> interior_local_maxima(const SweepCurve& curve) {
  return interior_extrema(curve, [](double a, double b) { return a > b; });
}

std::vector<int> interior_local_minima(const SweepCurve& curve) {
  return interior_extrema(curve, [](double a, double b) { return a < b; });
}

std::vector<int> interior_stationary_points(const SweepCurve& curve) {
  auto out = interior_local_maxima(curve);
  const auto minima = interior_local_minima(curve);
  out.insert(out.end(), minima.begin(), minima.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool local_min_at_start(const SweepCurve& curve) { return curve.value.at(1) >= curve.value.at(0); }

bool local_min_at_end(const SweepCurve& curve) {
  const auto n = curve.value.size();
  return curve.value.at(n - 2) >= curve.value.at(n - 1);
}

double forward_difference_at_start(const SweepCurve& curve) {
  return curve.value.at(1) - curve.value.at(0);
}

double max_chord_deviation(const SweepCurve& curve) {
  const double first = curve.value.front();
  const double last = curve.value.back();
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.value.size(); ++i) {
    const double chord = (1.0 - curve.theta[i]) * first + curve.theta[i] * last;
    worst = std::max(worst, std::abs(curve.value[i] - chord));
  }
  return worst;
}

double chained_value(const TabularMdp& mdp, const DeterministicPolicy& pi_a,
                     const DeterministicPolicy& pi_b, const std::vector<double>& thetas) {
  require_compatible(mdp, pi_a);
  require_compatible(mdp, pi_b);
  const int k = static_cast<int>(thetas.size());
  if (k < 1) throw std::invalid_argument("chained scheme needs at least one slot");
  const int n = mdp.n_states;
  // Augmented state (s, slot) at index slot * n + s.
  Matrix p = Matrix::Zero(n * k, n * k);
  Vector g = Vector::Zero(n * k);
  for (int j = 0; j < k; ++j) {
    const double theta = thetas[static_cast<std::size_t>(j)];
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("slot probabilities must lie in [0, 1]");
    const int next_slot = (j + 1) % k;
    for (int s = 0; s < n; ++s) {
      const int row = j * n + s;
      const std::pair<int, double> choices[] = {{pi_a(s), 1.0 - theta}, {pi_b(s), theta}};
      for (const auto& [a, prob] : choices) {
        if (prob == 0.0) continue;
        g(row) += prob * mdp.cost(s, a);
        p.block(row, next_slot * n, 1, n) += prob * mdp.transition[static_cast<std::size_t>(a)].row(s);
      }
    }
  }
  const Matrix lhs = Matrix::Identity(n * k, n * k) - mdp.gamma * p;
  const Vector j = lhs.partialPivLu().solve(g);
  return mdp.mu.dot(j.head(n));
}

ChainedControl chained_policy_control(const TabularMdp& mdp, const DeterministicPolicy& pi_a,
                                      const DeterministicPolicy& pi_b, int k, double step) {
  if (k < 1) throw std::invalid_argument(fmt::format("k must be at least 1, got {}", k));
  ChainedControl control;
  control.k = k;
  control.step = step;
  control.theta = theta_grid(step);
  const std::vector<double> zeros(static_cast<std::size_t>(k), 0.0);
  control.origin_value = chained_value(mdp, pi_a, pi_b, zeros);
  for (double theta : control.theta) {
    control.diagonal.push_back(chained_value(mdp, pi_a, pi_b, std::vector<double>(zeros.size(), theta)));
  }
  for (int j = 0; j < k; ++j) {
    std::vector<double> slice;
    auto thetas = zeros;
    for (double theta : control.theta) {
      thetas[static_cast<std::size_t>(j)] = theta;
      slice.push_back(chained_value(mdp, pi_a, pi_b, thetas));
    }
    control.forward_differences.push_back(slice.at(1) - slice.at(0));
    control.slices.push_back(std::move(slice));
  }
  return control;
}

}  // namespace kstep
