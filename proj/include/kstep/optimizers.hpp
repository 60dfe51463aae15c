#pragma once

#include "kstep/kstep_grad.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kstep {

enum class Method { kProjectedGd, kMirrorEntropy };

std::string method_name(Method method);
Method parse_method(const std::string& name);

struct OptimizerConfig {
  Method method = Method::kProjectedGd;
  int k = 1;
  // Step size; when unset it is 1 / beta (strong convexity 1 for both geometries).
  std::optional<double> step_size;
  // Smoothness constant; when unset it is estimated by certify_smoothness.
  std::optional<double> beta;
  int max_iters = 1000;
  double floor = 1e-12;
  // Stop once an update moves less than this: l1 distance for projected
  // descent, largest |log w' - log w| for the entropic method.
  double stop_tol = 1e-12;
  // With an automatic step size, double beta and rerun until the k-step
  // value never increases along the trace.
  bool ensure_monotone = true;
  int smoothness_probes = 64;
  std::uint64_t seed = 0;
  bool keep_vectors = true;

  void validate(int class_size) const;
};

struct IterationRecord {
  int iter = 0;
  double value_k = 0.0;
  double expected_value = 0.0;
  double gap = 0.0;
  double dirderiv_to_star = 0.0;
  double step_norm = 0.0;  // l1 distance to the previous iterate
  double bregman_to_star = 0.0;
  Vector weights;   // empty unless keep_vectors
  Vector gradient;  // empty unless keep_vectors
};

struct DescentTrace {
  Method method = Method::kProjectedGd;
  int k = 1;
  double step_size = 0.0;
  double beta = 0.0;
  int beta_doublings = 0;
  int star_index = 0;
  double star_value = 0.0;
  Vector final_weights;
  std::vector<IterationRecord> records;
  int monotonicity_violations = 0;

  const IterationRecord& last() const { return records.back(); }
  // Header "iter,J_k,E_J1,gap,dirderiv_to_star,step_norm".
  std::string to_csv(int precision = 10) const;
  nlohmann::json to_json() const;
};

// Euclidean projection onto the probability simplex (sort and threshold).
Vector project_to_simplex(const Vector& v);

double kl_divergence(const Vector& p, const Vector& q);
double euclidean_divergence(const Vector& p, const Vector& q);
double bregman_divergence(Method method, const Vector& p, const Vector& q);

// Clamp to at least `floor`, then renormalize.
Vector floor_weights(const Vector& w, double floor);

// One update from w given the gradient.
Vector projected_gd_step(const Vector& w, const Vector& grad, double eta);
Vector mirror_step(const Vector& w, const Vector& grad, double eta, double floor);

// Twice the largest sampled ratio ||grad(w) - grad(w')||_* / ||w - w'|| over
// random pairs of interior points. The l2 geometry compares gradients with
// their mean removed; the l1 geometry uses half the range of the difference.
double certify_smoothness(const KStepModel& model, Method geometry, int probes, std::uint64_t seed);

inline constexpr double kBetaFloor = 1e-6;

struct GapRecord {
  double expected_value = 0.0;
  double kstep_value = 0.0;
  double best_value = 0.0;
  double expected_gap = 0.0;
  double kstep_gap = 0.0;
  double bound = 0.0;  // 8 gamma^k g_max / (1 - gamma)
};

double critical_gap_bound(const TabularMdp& mdp, int k);
GapRecord performance_gap(const KStepModel& model, const Vector& w);
GapRecord performance_gap(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k);

DescentTrace projected_gd_run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config);
DescentTrace mirror_descent_run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config);
// Dispatches on config.method; config.k must match the model.
DescentTrace descent_run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config);

}  // namespace kstep
