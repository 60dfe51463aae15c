#include "kstep/mdp.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace kstep {

namespace {

constexpr double kProbabilityTol = 1e-12;

}  // namespace

std::string TabularMdp::state_label(int s) const {
  if (s >= 0 && static_cast<std::size_t>(s) < state_labels.size()) return state_labels[s];
  return fmt::format("s{}", s);
}

std::string TabularMdp::action_label(int a) const {
  if (a >= 0 && static_cast<std::size_t>(a) < action_labels.size()) return action_labels[a];
  return fmt::format("a{}", a);
}

std::optional<int> TabularMdp::find_state(const std::string& label) const {
  for (int s = 0; s < n_states; ++s) {
    if (state_label(s) == label) return s;
  }
  return std::nullopt;
}

std::optional<int> TabularMdp::find_action(const std::string& label) const {
  for (int a = 0; a < n_actions; ++a) {
    if (action_label(a) == label) return a;
  }
  return std::nullopt;
}

std::optional<std::string> validate_mdp(const TabularMdp& mdp) {
  if (mdp.n_states <= 0) return "n_states must be positive";
  if (mdp.n_actions <= 0) return "n_actions must be positive";
  if (!(mdp.gamma > 0.0 && mdp.gamma < 1.0)) return "gamma out of (0,1)";
  if (static_cast<int>(mdp.transition.size()) != mdp.n_actions) {
    return fmt::format("transition has {} action matrices, expected {}", mdp.transition.size(),
                       mdp.n_actions);
  }
  for (int a = 0; a < mdp.n_actions; ++a) {
    const Matrix& pa = mdp.transition[a];
    if (pa.rows() != mdp.n_states || pa.cols() != mdp.n_states) {
      return fmt::format("transition for a={} is {}x{}, expected {}x{}", a, pa.rows(), pa.cols(),
                         mdp.n_states, mdp.n_states);
    }
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const auto row = mdp.transition[a].row(s);
      for (int next = 0; next < mdp.n_states; ++next) {
        if (!std::isfinite(row(next)) || row(next) < 0.0) {
          return fmt::format("P(s'={} | s={},a={}) = {:.6g} is not a probability", next, s, a,
                             row(next));
        }
      }
      const double sum = row.sum();
      if (std::abs(sum - 1.0) > kProbabilityTol) {
        return fmt::format("row (s={},a={}) sums to {:.6g}", s, a, sum);
      }
    }
  }
  if (mdp.mu.size() != mdp.n_states) {
    return fmt::format("mu has length {}, expected {}", mdp.mu.size(), mdp.n_states);
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    if (!std::isfinite(mdp.mu(s)) || mdp.mu(s) < 0.0) {
      return fmt::format("mu({}) = {:.6g} is negative", s, mdp.mu(s));
    }
  }
  if (std::abs(mdp.mu.sum() - 1.0) > kProbabilityTol) {
    return fmt::format("mu sums to {:.6g}", mdp.mu.sum());
  }
  if (mdp.cost.rows() != mdp.n_states || mdp.cost.cols() != mdp.n_actions) {
    return fmt::format("cost is {}x{}, expected {}x{}", mdp.cost.rows(), mdp.cost.cols(),
                       mdp.n_states, mdp.n_actions);
  }
  if (!(mdp.g_max >= 0.0)) return "g_max must be nonnegative";
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double g = mdp.cost(s, a);
      if (!std::isfinite(g)) return fmt::format("cost (s={},a={}) is not finite", s, a);
      if (std::abs(g) > mdp.g_max) {
        return fmt::format("|g(s={},a={})| = {:.6g} exceeds g_max = {:.6g}", s, a, std::abs(g),
                           mdp.g_max);
      }
    }
  }
  if (!mdp.state_labels.empty() && static_cast<int>(mdp.state_labels.size()) != mdp.n_states) {
    return "state_labels must have one entry per state";
  }
  if (!mdp.action_labels.empty() && static_cast<int>(mdp.action_labels.size()) != mdp.n_actions) {
    return "action_labels must have one entry per action";
  }
  return std::nullopt;
}

void require_valid(const TabularMdp& mdp) {
  if (auto err = validate_mdp(mdp)) throw std::invalid_argument("invalid MDP: " + *err);
}

void require_compatible(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  if (pi.n_states() != mdp.n_states) {
    throw std::invalid_argument(
        fmt::format("policy covers {} states, MDP has {}", pi.n_states(), mdp.n_states));
  }
  for (int s = 0; s < mdp.n_states; ++s) {
    if (pi(s) < 0 || pi(s) >= mdp.n_actions) {
      throw std::invalid_argument(fmt::format("policy action {} at state {} out of range", pi(s), s));
    }
  }
}

double max_abs_cost(const TabularMdp& mdp) {
  return mdp.cost.size() == 0 ? 0.0 : mdp.cost.cwiseAbs().maxCoeff();
}

TabularMdp make_deterministic_mdp(int n_states, int n_actions,
                                  const std::function<int(int, int)>& next_state,
                                  const std::function<double(int, int)>& cost, double gamma,
                                  Vector mu) {
  TabularMdp mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.mu = std::move(mu);
  mdp.transition.assign(n_actions, Matrix::Zero(n_states, n_states));
  mdp.cost = Matrix::Zero(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      const int next = next_state(s, a);
      if (next < 0 || next >= n_states) {
        throw std::invalid_argument(fmt::format("successor of (s={},a={}) out of range", s, a));
      }
      mdp.transition[a](s, next) = 1.0;
      mdp.cost(s, a) = cost(s, a);
    }
  }
  mdp.g_max = max_abs_cost(mdp);
  return mdp;
}

Matrix policy_transition(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  require_compatible(mdp, pi);
  Matrix p(mdp.n_states, mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) p.row(s) = mdp.transition[pi(s)].row(s);
  return p;
}

Vector policy_cost(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  require_compatible(mdp, pi);
  Vector g(mdp.n_states);
  for (int s = 0; s < mdp.n_states; ++s) g(s) = mdp.cost(s, pi(s));
  return g;
}

Vector evaluate_policy(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  const Matrix p = policy_transition(mdp, pi);
  const Matrix lhs = Matrix::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * p;
  return lhs.partialPivLu().solve(policy_cost(mdp, pi));
}

double policy_value(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  return mdp.mu.dot(evaluate_policy(mdp, pi));
}

Matrix q_values(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  const Vector j = evaluate_policy(mdp, pi);
  Matrix q(mdp.n_states, mdp.n_actions);
  for (int a = 0; a < mdp.n_actions; ++a) {
    q.col(a) = mdp.cost.col(a) + mdp.gamma * (mdp.transition[a] * j);
  }
  return q;
}

Vector occupancy(const TabularMdp& mdp, const DeterministicPolicy& pi) {
  const Matrix p = policy_transition(mdp, pi);
  const Matrix lhs = Matrix::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * p.transpose();
  return lhs.partialPivLu().solve((1.0 - mdp.gamma) * mdp.mu);
}

}  // namespace kstep
