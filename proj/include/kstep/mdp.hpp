#pragma once

#include <Eigen/Dense>

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kstep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A total map from states to actions.
struct DeterministicPolicy {
  std::vector<int> action_of;

  int operator()(int state) const { return action_of[static_cast<std::size_t>(state)]; }
  int n_states() const { return static_cast<int>(action_of.size()); }

  friend bool operator==(const DeterministicPolicy&, const DeterministicPolicy&) = default;
  friend auto operator<=>(const DeterministicPolicy&, const DeterministicPolicy&) = default;
};

/**
 * Finite discounted MDP with a per-(state, action) cost.
 *
 * Costs are collected at every timestep including t = 0 and discounted by
 * gamma^t; the objective is minimized. Transitions are stored one dense
 * |S| x |S| matrix per action so that transition[a](s, s') = P(s' | s, a).
 */
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<Matrix> transition;
  Matrix cost;
  double gamma = 0.9;
  Vector mu;
  double g_max = 0.0;
  std::vector<std::string> state_labels;
  std::vector<std::string> action_labels;

  double p(int s, int a, int next) const { return transition[static_cast<std::size_t>(a)](s, next); }

  std::string state_label(int s) const;
  std::string action_label(int a) const;
  std::optional<int> find_state(const std::string& label) const;
  std::optional<int> find_action(const std::string& label) const;
};

/// Returns the first violated invariant, or nullopt when the model is valid.
std::optional<std::string> validate_mdp(const TabularMdp& mdp);

/// Throws std::invalid_argument carrying the validate_mdp message.
void require_valid(const TabularMdp& mdp);

/// Throws std::invalid_argument if the policy does not fit the model.
void require_compatible(const TabularMdp& mdp, const DeterministicPolicy& pi);

/// Largest |g(s, a)|.
double max_abs_cost(const TabularMdp& mdp);

/**
 * Builds a model with deterministic dynamics from a successor function.
 * g_max defaults to max |g| and state/action labels are left empty.
 */
TabularMdp make_deterministic_mdp(int n_states, int n_actions,
                                  const std::function<int(int, int)>& next_state,
                                  const std::function<double(int, int)>& cost, double gamma,
                                  Vector mu);

Matrix policy_transition(const TabularMdp& mdp, const DeterministicPolicy& pi);
Vector policy_cost(const TabularMdp& mdp, const DeterministicPolicy& pi);

/// Exact J^pi(s) from (I - gamma P^pi) J = g^pi.
Vector evaluate_policy(const TabularMdp& mdp, const DeterministicPolicy& pi);

/// mu . J^pi
double policy_value(const TabularMdp& mdp, const DeterministicPolicy& pi);

/// Q^pi(s, a) = g(s, a) + gamma sum_s' P(s' | s, a) J^pi(s').
Matrix q_values(const TabularMdp& mdp, const DeterministicPolicy& pi);

/// Normalized discounted state occupancy d_mu^pi; solves d = (1 - gamma) mu + gamma (P^pi)^T d.
Vector occupancy(const TabularMdp& mdp, const DeterministicPolicy& pi);

}  // namespace kstep
