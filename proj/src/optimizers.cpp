#include "kstep/optimizers.hpp"

#include "kstep/landscape.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>

namespace kstep {

std::string method_name(Method method) {
  return method == Method::kProjectedGd ? "pgd" : "mirror";
}

Method parse_method(const std::string& name) {
  if (name == "pgd" || name == "projected-gd") return Method::kProjectedGd;
  if (name == "mirror" || name == "mirror-entropy") return Method::kMirrorEntropy;
  throw std::invalid_argument(fmt::format("unknown optimizer '{}' (expected pgd or mirror)", name));
}

void OptimizerConfig::validate(int class_size) const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (step_size && !(*step_size > 0.0)) throw std::invalid_argument("step size must be positive");
  if (beta && !(*beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (method == Method::kMirrorEntropy && !(floor > 0.0 && floor < 1.0 / class_size)) {
    throw std::invalid_argument("weight floor must lie in (0, 1/|class|)");
  }
  if (smoothness_probes < 2) throw std::invalid_argument("smoothness probes must be at least 2");
}

Vector project_to_simplex(const Vector& v) {
  const auto n = v.size();
  if (n == 0) throw std::invalid_argument("cannot project an empty vector");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(v(i))) throw std::invalid_argument("cannot project a non-finite vector");
  }
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) tau = candidate;
  }
  Vector out = (v.array() - tau).max(0.0).matrix();
  return out / out.sum();
}

double kl_divergence(const Vector& p, const Vector& q) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) total += p(i) * std::log(p(i) / q(i));
  }
  return total;
}

double euclidean_divergence(const Vector& p, const Vector& q) { return 0.5 * (p - q).squaredNorm(); }

double bregman_divergence(Method method, const Vector& p, const Vector& q) {
  return method == Method::kProjectedGd ? euclidean_divergence(p, q) : kl_divergence(p, q);
}

Vector floor_weights(const Vector& w, double floor) {
  Vector out = w.cwiseMax(floor);
  return out / out.sum();
}

Vector projected_gd_step(const Vector& w, const Vector& grad, double eta) {
  return project_to_simplex(w - eta * grad);
}

Vector mirror_step(const Vector& w, const Vector& grad, double eta, double floor) {
  Vector logits = w.array().log().matrix() - eta * grad;
  logits.array() -= logits.maxCoeff();
  Vector out = logits.array().exp().matrix();
  out /= out.sum();
  return floor_weights(out, floor);
}

namespace {

Vector random_interior(std::mt19937_64& rng, Eigen::Index n) {
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = -std::log1p(-unit_uniform(rng)) + 1e-12;
  return w / w.sum();
}

double dual_gap(Method geometry, const Vector& diff) {
  if (geometry == Method::kProjectedGd) return (diff.array() - diff.mean()).matrix().norm();
  return 0.5 * (diff.maxCoeff() - diff.minCoeff());
}

double primal_gap(Method geometry, const Vector& diff) {
  return geometry == Method::kProjectedGd ? diff.norm() : diff.lpNorm<1>();
}

}  // namespace

double certify_smoothness(const KStepModel& model, Method geometry, int probes, std::uint64_t seed) {
  if (probes < 2) throw std::invalid_argument("smoothness probes must be at least 2");
  const int n = model.size();
  if (n < 2) return 0.0;
  std::mt19937_64 rng(seed);
  double ratio = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector w = random_interior(rng, n);
    const Vector z = random_interior(rng, n);
    // Alternate far pairs and nearby pairs to see both global and local curvature.
    const double t = (p % 2 == 0) ? 1.0 : 1e-3;
    const Vector w2 = (1.0 - t) * w + t * z;
    const Vector dw = w2 - w;
    const double denom = primal_gap(geometry, dw);
    if (denom <= 0.0) continue;
    const Vector dg = kstep_gradient(model, w2).partials - kstep_gradient(model, w).partials;
    ratio = std::max(ratio, dual_gap(geometry, dg) / denom);
  }
  return 2.0 * ratio;
}

double critical_gap_bound(const TabularMdp& mdp, int k) {
  return 8.0 * std::pow(mdp.gamma, k) * mdp.g_max / (1.0 - mdp.gamma);
}

GapRecord performance_gap(const KStepModel& model, const Vector& w) {
  const auto& mdp = model.mdp();
  const Vector values = deterministic_values(mdp, model.policy_class());
  GapRecord gap;
  gap.expected_value = w.dot(values);
  gap.kstep_value = model.value(w);
  gap.best_value = values.minCoeff();
  gap.expected_gap = gap.expected_value - gap.best_value;
  gap.kstep_gap = gap.kstep_value - gap.best_value;
  gap.bound = critical_gap_bound(mdp, model.k());
  return gap;
}

GapRecord performance_gap(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k) {
  return performance_gap(KStepModel(std::make_shared<const TabularMdp>(mdp), pi.class_ptr(), k),
                         pi.weights());
}

std::string DescentTrace::to_csv(int precision) const {
  std::string out = "iter,J_k,E_J1,gap,dirderiv_to_star,step_norm\n";
  for (const auto& r : records) {
    out += fmt::format("{},{:.{}f},{:.{}f},{:.{}f},{:.{}f},{:.{}e}\n", r.iter, r.value_k + 0.0,
                       precision, r.expected_value + 0.0, precision, r.gap + 0.0, precision,
                       r.dirderiv_to_star + 0.0, precision, r.step_norm, 6);
  }
  return out;
}

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::json DescentTrace::to_json() const {
  nlohmann::json doc;
  doc["method"] = method_name(method);
  doc["k"] = k;
  doc["step_size"] = step_size;
  doc["beta"] = beta;
  doc["beta_doublings"] = beta_doublings;
  doc["star_index"] = star_index;
  doc["star_value"] = star_value;
  doc["monotonicity_violations"] = monotonicity_violations;
  doc["final_weights"] = to_std(final_weights);
  auto rows = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json row{{"iter", r.iter},
                       {"J_k", r.value_k},
                       {"E_J1", r.expected_value},
                       {"gap", r.gap},
                       {"dirderiv_to_star", r.dirderiv_to_star},
                       {"step_norm", r.step_norm},
                       {"bregman_to_star", r.bregman_to_star}};
    if (r.weights.size() > 0) row["weights"] = to_std(r.weights);
    if (r.gradient.size() > 0) row["gradient"] = to_std(r.gradient);
    rows.push_back(std::move(row));
  }
  doc["records"] = std::move(rows);
  return doc;
}

namespace {

using StepFn = std::function<Vector(const Vector&, const Vector&, double)>;

DescentTrace run_once(const KStepModel& model, const Vector& start, const OptimizerConfig& config,
                      const Vector& values, int star, double eta, const StepFn& step) {
  DescentTrace trace;
  trace.method = config.method;
  trace.k = model.k();
  trace.step_size = eta;
  trace.star_index = star;
  trace.star_value = values(star);
  Vector star_w = Vector::Zero(model.size());
  star_w(star) = 1.0;

  Vector w = start;
  double previous_step = 0.0;
  double movement = 0.0;
  for (int t = 0;; ++t) {
    const auto eval = model.evaluate(w);
    const auto grad = kstep_gradient(model, eval);
    IterationRecord r;
    r.iter = t;
    r.value_k = eval.value_at_mu;
    r.expected_value = w.dot(values);
    r.gap = r.expected_value - trace.star_value;
    r.dirderiv_to_star = (star_w - w).dot(grad.partials);
    r.step_norm = previous_step;
    r.bregman_to_star = bregman_divergence(config.method, star_w, w);
    if (config.keep_vectors) {
      r.weights = w;
      r.gradient = grad.partials;
    }
    if (!trace.records.empty() && r.value_k > trace.records.back().value_k + 1e-10) {
      ++trace.monotonicity_violations;
    }
    trace.records.push_back(std::move(r));
    if (t == config.max_iters || (t > 0 && movement < config.stop_tol)) break;
    const Vector next = step(w, grad.partials, eta);
    previous_step = (next - w).lpNorm<1>();
    movement = config.method == Method::kMirrorEntropy
                   ? (next.array().log() - w.array().log()).abs().maxCoeff()
                   : previous_step;
    w = next;
  }
  trace.final_weights = w;
  return trace;
}

DescentTrace run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config,
                 const Vector& start, const StepFn& step) {
  if (config.k != model.k()) {
    throw std::invalid_argument(fmt::format("config k={} does not match model k={}", config.k, model.k()));
  }
  config.validate(model.size());
  require_distribution(w0, model.size());
  const Vector values = deterministic_values(model.mdp(), model.policy_class());
  Eigen::Index star = 0;
  values.minCoeff(&star);

  if (config.step_size) {
    auto trace = run_once(model, start, config, values, static_cast<int>(star), *config.step_size, step);
    trace.beta = 1.0 / *config.step_size;
    return trace;
  }
  double beta = config.beta ? *config.beta
                            : certify_smoothness(model, config.method, config.smoothness_probes, config.seed);
  beta = std::max(beta, kBetaFloor);
  for (int doublings = 0;; ++doublings) {
    auto trace = run_once(model, start, config, values, static_cast<int>(star), 1.0 / beta, step);
    trace.beta = beta;
    trace.beta_doublings = doublings;
    if (!config.ensure_monotone || trace.monotonicity_violations == 0 || doublings >= 60) return trace;
    beta *= 2.0;
  }
}

}  // namespace

DescentTrace projected_gd_run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config) {
  auto cfg = config;
  cfg.method = Method::kProjectedGd;
  return run(model, w0, cfg, w0, projected_gd_step);
}

DescentTrace mirror_descent_run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config) {
  auto cfg = config;
  cfg.method = Method::kMirrorEntropy;
  const double floor = cfg.floor;
  return run(model, w0, cfg, floor_weights(w0, floor),
             [floor](const Vector& w, const Vector& g, double eta) { return mirror_step(w, g, eta, floor); });
}

DescentTrace descent_run(const KStepModel& model, const Vector& w0, const OptimizerConfig& config) {
  return config.method == Method::kProjectedGd ? projected_gd_run(model, w0, config)
                                               : mirror_descent_run(model, w0, config);
}

}  // namespace kstep
