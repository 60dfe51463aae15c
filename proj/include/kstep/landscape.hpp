#pragma once

#include "kstep/kstep_eval.hpp"

#include <optional>
#include <vector>

namespace kstep {

struct BestDeterministic {
  int index = 0;
  double value = 0.0;
};

// argmin_i mu . J^{pi_i}; ties go to the smallest index.
BestDeterministic best_deterministic(const TabularMdp& mdp, const PolicyClass& cls);
Vector deterministic_values(const TabularMdp& mdp, const PolicyClass& cls);

inline constexpr double kCriticalTolerance = 1e-9;

struct CriticalityReport {
  std::optional<int> base_index;  // set when the weights are a vertex
  int k = 1;
  Weighting weighting = Weighting::kBaseOccupancy;
  Vector weighted;  // averaged advantage toward every class member
  bool certified = false;
  int worst_index = 0;
  double worst_value = 0.0;
};

CriticalityReport certify_critical(const KStepModel& model, const Vector& w,
                                   double tol = kCriticalTolerance,
                                   Weighting weighting = Weighting::kBaseOccupancy);
CriticalityReport certify_critical(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
                                   double tol = kCriticalTolerance,
                                   Weighting weighting = Weighting::kBaseOccupancy);

enum class EscapeMode { kTowardBest, kAnyDirection };

// Smallest k in [1, k_max] at which the averaged advantage turns negative,
// either toward the best deterministic member or toward any member. Several
// members can tie for best; `target` picks one explicitly, otherwise the
// lowest index wins.
std::optional<int> find_k_esc(const TabularMdp& mdp, const CorrelatedPolicy& crit, int k_max,
                              EscapeMode mode = EscapeMode::kTowardBest,
                              Weighting weighting = Weighting::kBaseOccupancy,
                              std::optional<int> target = std::nullopt);

struct SweepCurve {
  int k = 1;
  std::vector<double> theta;
  std::vector<double> value;
};

std::vector<double> theta_grid(double step);

// J^{k}(mu) along (1 - theta) delta(pi_a) + theta delta(pi_b).
SweepCurve theta_sweep(const TabularMdp& mdp, const DeterministicPolicy& pi_a,
                       const DeterministicPolicy& pi_b, int k, double step = 1e-3);

// Interior grid points no lower (resp. no higher) than both neighbours and
// strictly above (resp. below) at least one of them.
std::vector<int> interior_local_maxima(const SweepCurve& curve);
std::vector<int> interior_local_minima(const SweepCurve& curve);
std::vector<int> interior_stationary_points(const SweepCurve& curve);
bool local_min_at_start(const SweepCurve& curve);
bool local_min_at_end(const SweepCurve& curve);
double forward_difference_at_start(const SweepCurve& curve);
// max_theta |J(theta) - ((1 - theta) J(0) + theta J(1))|
double max_chord_deviation(const SweepCurve& curve);

// Cycling through k independent stochastic one-step policies; slot j plays
// pi_b with probability thetas[j] and pi_a otherwise, at every state, afresh
// at every step.
double chained_value(const TabularMdp& mdp, const DeterministicPolicy& pi_a,
                     const DeterministicPolicy& pi_b, const std::vector<double>& thetas);

struct ChainedControl {
  int k = 1;
  double step = 1e-3;
  double origin_value = 0.0;
  std::vector<double> theta;
  std::vector<double> diagonal;
  std::vector<std::vector<double>> slices;  // slices[j]: only slot j moves
  std::vector<double> forward_differences;  // per slot, at the all-zeros point
};

ChainedControl chained_policy_control(const TabularMdp& mdp, const DeterministicPolicy& pi_a,
                                      const DeterministicPolicy& pi_b, int k, double step = 1e-3);

}  // namespace kstep
