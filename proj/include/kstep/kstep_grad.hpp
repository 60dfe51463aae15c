#pragma once

#include "kstep/kstep_eval.hpp"

namespace kstep {

// Partial derivatives of J^{w,k}(mu) in the free coordinates w_i:
// (1 / (1 - gamma^k)) d^{w,k} . Q^{w,k}(., pi_i).
// Valid on the simplex boundary; the simplex constraint is left to the caller.
struct GradientVector {
  int k = 1;
  Vector weights;
  Vector partials;
};

GradientVector kstep_gradient(const KStepModel& model, const Vector& w);
GradientVector kstep_gradient(const KStepModel& model, const KStepEvaluation& eval);
GradientVector kstep_gradient(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k);

// (target - w) . gradient
double directional_derivative(const KStepModel& model, const Vector& w, const Vector& target);
double directional_derivative(const TabularMdp& mdp, const CorrelatedPolicy& pi,
                              const CorrelatedPolicy& target, int k);

// (1 / (1 - gamma^k)) E_{s ~ d^{w,k}}[Q^{w,k}(s, target) - J^{w,k}(s)]
double directional_derivative_closed_form(const KStepModel& model, const Vector& w,
                                          const Vector& target);

// Slack of the approximate gradient dominance inequality, RHS - LHS, where
// LHS is the directional derivative toward target and
// RHS = (J^{target,k} - J^{w,k}) / (1 - gamma^k) + 6 gamma^k g_max / ((1 - gamma^k)(1 - gamma)).
double gradient_dominance_residual(const KStepModel& model, const Vector& w, const Vector& target);
double gradient_dominance_residual(const TabularMdp& mdp, const CorrelatedPolicy& pi,
                                   const CorrelatedPolicy& target, int k);

}  // namespace kstep
