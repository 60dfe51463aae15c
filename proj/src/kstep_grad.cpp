#include "kstep/kstep_grad.hpp"

#include <memory>
#include <stdexcept>

namespace kstep {

GradientVector kstep_gradient(const KStepModel& model, const KStepEvaluation& eval) {
  GradientVector grad;
  grad.k = model.k();
  grad.weights = eval.weights;
  grad.partials.resize(model.size());
  // d . (c_i + gamma^k P_i J) without forming each Q column.
  const double scale = 1.0 / (1.0 - model.discount());
  for (int i = 0; i < model.size(); ++i) {
    const auto& op = model.op(i);
    const double q_avg =
        eval.occupancy.dot(op.cost) + model.discount() * eval.occupancy.dot(op.transition * eval.value);
    grad.partials(i) = scale * q_avg;
  }
  return grad;
}

GradientVector kstep_gradient(const KStepModel& model, const Vector& w) {
  return kstep_gradient(model, model.evaluate(w));
}

namespace {

KStepModel model_for(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k) {
  return KStepModel(std::make_shared<const TabularMdp>(mdp), pi.class_ptr(), k);
}

void require_same_class(const CorrelatedPolicy& a, const CorrelatedPolicy& b) {
  if (a.class_ptr() != b.class_ptr() && a.policy_class().policies != b.policy_class().policies) {
    throw std::invalid_argument("correlated policies are over different policy classes");
  }
}

}  // namespace

GradientVector kstep_gradient(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k) {
  return kstep_gradient(model_for(mdp, pi, k), pi.weights());
}

double directional_derivative(const KStepModel& model, const Vector& w, const Vector& target) {
  require_distribution(target, model.size());
  return (target - w).dot(kstep_gradient(model, w).partials);
}

double directional_derivative(const TabularMdp& mdp, const CorrelatedPolicy& pi,
                              const CorrelatedPolicy& target, int k) {
  require_same_class(pi, target);
  return directional_derivative(model_for(mdp, pi, k), pi.weights(), target.weights());
}

double directional_derivative_closed_form(const KStepModel& model, const Vector& w,
                                          const Vector& target) {
  const auto eval = model.evaluate(w);
  const Vector advantage = model.q_mixed(eval, target) - eval.value;
  return eval.occupancy.dot(advantage) / (1.0 - model.discount());
}

double gradient_dominance_residual(const KStepModel& model, const Vector& w, const Vector& target) {
  const double gk = model.discount();
  const double gamma = model.mdp().gamma;
  const double lhs = directional_derivative(model, w, target);
  const double rhs = (model.value(target) - model.value(w)) / (1.0 - gk) +
                     6.0 * gk * model.mdp().g_max / ((1.0 - gk) * (1.0 - gamma));
  return rhs - lhs;
}

double gradient_dominance_residual(const TabularMdp& mdp, const CorrelatedPolicy& pi,
                                   const CorrelatedPolicy& target, int k) {
  require_same_class(pi, target);
  return gradient_dominance_residual(model_for(mdp, pi, k), pi.weights(), target.weights());
}

}  // namespace kstep
