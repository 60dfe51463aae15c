#pragma once

#include "kstep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <vector>

namespace kstep::testing {

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

inline int int_in(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(unit_uniform(rng) * (hi - lo + 1));
}

inline Vector random_distribution(std::mt19937_64& rng, int n, double zero_prob = 0.0) {
  Vector w(n);
  for (int i = 0; i < n; ++i) {
    w(i) = unit_uniform(rng) < zero_prob ? 0.0 : -std::log1p(-unit_uniform(rng));
  }
  if (w.sum() <= 0.0) w(int_in(rng, 0, n - 1)) = 1.0;
  return w / w.sum();
}

inline TabularMdp random_mdp(std::mt19937_64& rng, int max_states = 5, int max_actions = 3) {
  TabularMdp mdp;
  mdp.n_states = int_in(rng, 1, max_states);
  mdp.n_actions = int_in(rng, 1, max_actions);
  mdp.gamma = uniform_in(rng, 0.3, 0.97);
  for (int a = 0; a < mdp.n_actions; ++a) {
    Matrix p(mdp.n_states, mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) p.row(s) = random_distribution(rng, mdp.n_states, 0.4).transpose();
    mdp.transition.push_back(p);
  }
  mdp.cost = Matrix(mdp.n_states, mdp.n_actions);
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) mdp.cost(s, a) = uniform_in(rng, -10.0, 10.0);
  }
  mdp.mu = random_distribution(rng, mdp.n_states, 0.3);
  mdp.g_max = max_abs_cost(mdp);
  return mdp;
}

inline DeterministicPolicy random_policy(std::mt19937_64& rng, const TabularMdp& mdp) {
  DeterministicPolicy pi;
  for (int s = 0; s < mdp.n_states; ++s) pi.action_of.push_back(int_in(rng, 0, mdp.n_actions - 1));
  return pi;
}

// Up to `max_size` distinct random members; at least one.
inline std::shared_ptr<const PolicyClass> random_class(std::mt19937_64& rng, const TabularMdp& mdp,
                                                       int max_size = 6) {
  std::set<DeterministicPolicy> seen;
  auto cls = std::make_shared<PolicyClass>();
  const int target = int_in(rng, 1, max_size);
  for (int tries = 0; tries < 4 * target && cls->size() < target; ++tries) {
    auto pi = random_policy(rng, mdp);
    if (seen.insert(pi).second) cls->policies.push_back(std::move(pi));
  }
  return cls;
}

// J(mu) under k-step semantics by forward propagation of the joint law of
// (state, active member), truncated when the remaining tail is below eps.
inline double rollout_value(const TabularMdp& mdp, const PolicyClass& cls, const Vector& w, int k,
                            double eps = 1e-12) {
  const int n = cls.size();
  Matrix joint = Matrix::Zero(mdp.n_states, n);
  double total = 0.0;
  double discount = 1.0;
  const double bound = std::max(mdp.g_max, 1e-12) / (1.0 - mdp.gamma);
  for (int t = 0; discount * bound > eps; ++t) {
    if (t % k == 0) {
      const Vector marginal = t == 0 ? mdp.mu : Vector(joint.rowwise().sum());
      joint = marginal * w.transpose();
    }
    Matrix next = Matrix::Zero(mdp.n_states, n);
    for (int i = 0; i < n; ++i) {
      for (int s = 0; s < mdp.n_states; ++s) {
        const double mass = joint(s, i);
        if (mass == 0.0) continue;
        const int a = cls[i](s);
        total += discount * mass * mdp.cost(s, a);
        next.col(i) += mass * mdp.transition[static_cast<std::size_t>(a)].row(s).transpose();
      }
    }
    joint = next;
    discount *= mdp.gamma;
  }
  return total;
}

inline Vector vertex(int n, int i) {
  Vector w = Vector::Zero(n);
  w(i) = 1.0;
  return w;
}

// All points of the simplex in R^n whose coordinates are multiples of 1/m.
inline std::vector<Vector> simplex_grid(int n, int m) {
  std::vector<Vector> out;
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n - 1) {
      counts[static_cast<std::size_t>(i)] = left;
      Vector w(n);
      for (int j = 0; j < n; ++j) w(j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) / m;
      out.push_back(w);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, left - c);
    }
  };
  rec(rec, 0, m);
  return out;
}

}  // namespace kstep::testing
