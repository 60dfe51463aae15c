#pragma once

#include "kstep/mdp.hpp"
#include "kstep/policy_class.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kstep {

// Running one deterministic policy for k steps: transition = (P^pi)^k and
// cost(s) = sum_{t<k} gamma^t E[g(s_t, pi(s_t)) | s_0 = s].
struct KStepOperator {
  int k = 1;
  Matrix transition;
  Vector cost;
};

KStepOperator kstep_operator(const TabularMdp& mdp, const DeterministicPolicy& pi, int k);

// Exact k-step quantities of one correlated policy. The mixed operator
// averages the per-policy k-step operators, which is not the same as
// raising the averaged one-step kernel to the k-th power.
struct KStepEvaluation {
  int k = 1;
  Vector weights;
  Matrix mixed_transition;
  Vector mixed_cost;
  Vector value;
  Vector occupancy;
  double value_at_mu = 0.0;
};

// Caches the k-step operator of every class member so that repeated
// evaluations (descent runs, sweeps, gradients) only pay for the mixing.
class KStepModel {
 public:
  KStepModel(std::shared_ptr<const TabularMdp> mdp, std::shared_ptr<const PolicyClass> cls, int k);
  KStepModel(const TabularMdp& mdp, const PolicyClass& cls, int k);

  const TabularMdp& mdp() const { return *mdp_; }
  const PolicyClass& policy_class() const { return *cls_; }
  const std::shared_ptr<const PolicyClass>& class_ptr() const { return cls_; }
  int k() const { return k_; }
  int size() const { return cls_->size(); }
  double discount() const { return discount_; }
  const KStepOperator& op(int i) const { return ops_[static_cast<std::size_t>(i)]; }

  KStepEvaluation evaluate(const Vector& w) const;
  double value(const Vector& w) const;

  // Q^{w,k}(., pi_i) = c_k^i + gamma^k P_k^i J
  Vector q(const KStepEvaluation& eval, int i) const;
  // One column per class member.
  Matrix q_all(const KStepEvaluation& eval) const;
  // Affine extension in the second argument: sum_i w'_i Q(., pi_i).
  Vector q_mixed(const KStepEvaluation& eval, const Vector& target) const;

 private:
  std::shared_ptr<const TabularMdp> mdp_;
  std::shared_ptr<const PolicyClass> cls_;
  int k_;
  double discount_;
  std::vector<KStepOperator> ops_;
};

Vector kstep_value(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k);
Vector kstep_q(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
               const DeterministicPolicy& pi_prime);
Vector kstep_q(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
               const CorrelatedPolicy& pi_prime);
Vector kstep_occupancy(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k);

// Which state distribution averages per-state advantages into one number.
// kBaseOccupancy uses the one-step discounted occupancy of the base policy
// for every k (the convention of the golden tables); kKStepOccupancy
// uses the k-step occupancy and is (1 - gamma^k) times the true directional
// derivative.
enum class Weighting { kBaseOccupancy, kKStepOccupancy };

struct AdvantageTable {
  int k = 1;
  std::vector<std::string> policy_labels;
  std::vector<std::string> state_labels;
  Matrix advantage;  // rows: class members, columns: states
  Vector weighted;
  Vector weighted_kstep;
  Vector base_occupancy;
  Vector kstep_occupancy;

  const Vector& weighted_by(Weighting w) const {
    return w == Weighting::kBaseOccupancy ? weighted : weighted_kstep;
  }
  // Header "policy,<state labels>,weighted".
  std::string to_csv(int precision = 6) const;
};

AdvantageTable kstep_advantage_table(const KStepModel& model, const Vector& base);
AdvantageTable kstep_advantage_table(const TabularMdp& mdp, const CorrelatedPolicy& base, int k);

struct McOptions {
  int n_rollouts = 10'000;
  double truncation_eps = 1e-6;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  // When set, the first k steps follow this policy instead of a sample.
  std::optional<DeterministicPolicy> first_window;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // NaN for a single rollout
  int n_rollouts = 0;
  int horizon = 0;
};

// Smallest H with gamma^H g_max / (1 - gamma) < eps.
int truncation_horizon(const TabularMdp& mdp, double eps);

// Rollouts resample the deterministic policy every k steps. Rollout i draws
// from its own engine seeded by (seed, i), so results do not depend on the
// thread count.
McEstimate mc_estimate(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
                       const McOptions& options = {});

}  // namespace kstep
