#include "kstep/kstep_eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace kstep {

KStepOperator kstep_operator(const TabularMdp& mdp, const DeterministicPolicy& pi, int k) {
  if (k < 1) throw std::invalid_argument(fmt::format("k must be at least 1, got {}", k));
  const Matrix p = policy_transition(mdp, pi);
  const Vector g = policy_cost(mdp, pi);
  KStepOperator op;
  op.k = k;
  op.transition = Matrix::Identity(mdp.n_states, mdp.n_states);
  op.cost = Vector::Zero(mdp.n_states);
  double discount = 1.0;
  for (int t = 0; t < k; ++t) {
    op.cost += discount * (op.transition * g);
    op.transition = op.transition * p;
    discount *= mdp.gamma;
  }
  return op;
}

namespace {

Vector solve_value(const Matrix& mixed_transition, const Vector& mixed_cost, double discount) {
  const auto n = mixed_transition.rows();
  const Matrix lhs = Matrix::Identity(n, n) - discount * mixed_transition;
  return lhs.partialPivLu().solve(mixed_cost);
}

Vector solve_occupancy(const Matrix& mixed_transition, const Vector& mu, double discount) {
  const auto n = mixed_transition.rows();
  const Matrix lhs = Matrix::Identity(n, n) - discount * mixed_transition.transpose();
  return lhs.partialPivLu().solve((1.0 - discount) * mu);
}

// One-step occupancy of the mixture, averaging the per-policy kernels.
Vector base_occupancy(const TabularMdp& mdp, const PolicyClass& cls, const Vector& w) {
  Matrix mixed = Matrix::Zero(mdp.n_states, mdp.n_states);
  for (int i = 0; i < cls.size(); ++i) {
    if (w(i) != 0.0) mixed += w(i) * policy_transition(mdp, cls[i]);
  }
  return solve_occupancy(mixed, mdp.mu, mdp.gamma);
}

}  // namespace

KStepModel::KStepModel(std::shared_ptr<const TabularMdp> mdp, std::shared_ptr<const PolicyClass> cls,
                       int k)
    : mdp_(std::move(mdp)), cls_(std::move(cls)), k_(k), discount_(std::pow(mdp_->gamma, k)) {
  if (k < 1) throw std::invalid_argument(fmt::format("k must be at least 1, got {}", k));
  require_valid(*mdp_);
  require_valid_class(*mdp_, *cls_);
  ops_.resize(static_cast<std::size_t>(cls_->size()));
  for (int i = 0; i < cls_->size(); ++i) ops_[static_cast<std::size_t>(i)] = kstep_operator(*mdp_, (*cls_)[i], k);
}

KStepModel::KStepModel(const TabularMdp& mdp, const PolicyClass& cls, int k)
    : KStepModel(std::make_shared<const TabularMdp>(mdp), std::make_shared<const PolicyClass>(cls), k) {}

KStepEvaluation KStepModel::evaluate(const Vector& w) const {
  require_distribution(w, size());
  const int n = mdp_->n_states;
  KStepEvaluation eval;
  eval.k = k_;
  eval.weights = w;
  eval.mixed_transition = Matrix::Zero(n, n);
  eval.mixed_cost = Vector::Zero(n);
  for (int i = 0; i < size(); ++i) {
    if (w(i) == 0.0) continue;
    eval.mixed_transition += w(i) * op(i).transition;
    eval.mixed_cost += w(i) * op(i).cost;
  }
  eval.value = solve_value(eval.mixed_transition, eval.mixed_cost, discount_);
  eval.occupancy = solve_occupancy(eval.mixed_transition, mdp_->mu, discount_);
  eval.value_at_mu = mdp_->mu.dot(eval.value);
  return eval;
}

double KStepModel::value(const Vector& w) const { return evaluate(w).value_at_mu; }

Vector KStepModel::q(const KStepEvaluation& eval, int i) const {
  return op(i).cost + discount_ * (op(i).transition * eval.value);
}

Matrix KStepModel::q_all(const KStepEvaluation& eval) const {
  Matrix out(mdp_->n_states, size());
  for (int i = 0; i < size(); ++i) out.col(i) = q(eval, i);
  return out;
}

Vector KStepModel::q_mixed(const KStepEvaluation& eval, const Vector& target) const {
  require_distribution(target, size());
  Vector out = Vector::Zero(mdp_->n_states);
  for (int i = 0; i < size(); ++i) {
    if (target(i) != 0.0) out += target(i) * q(eval, i);
  }
  return out;
}

namespace {

struct Mixed {
  Matrix transition;
  Vector cost;
};

Mixed mix_support(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k) {
  Mixed m{Matrix::Zero(mdp.n_states, mdp.n_states), Vector::Zero(mdp.n_states)};
  for (int i = 0; i < pi.size(); ++i) {
    const double w = pi.weights()(i);
    if (w == 0.0) continue;
    const auto op = kstep_operator(mdp, pi.policy_class()[i], k);
    m.transition += w * op.transition;
    m.cost += w * op.cost;
  }
  return m;
}

}  // namespace

Vector kstep_value(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k) {
  const auto m = mix_support(mdp, pi, k);
  return solve_value(m.transition, m.cost, std::pow(mdp.gamma, k));
}

Vector kstep_q(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
               const DeterministicPolicy& pi_prime) {
  const Vector j = kstep_value(mdp, pi, k);
  const auto op = kstep_operator(mdp, pi_prime, k);
  return op.cost + std::pow(mdp.gamma, k) * (op.transition * j);
}

Vector kstep_q(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
               const CorrelatedPolicy& pi_prime) {
  const Vector j = kstep_value(mdp, pi, k);
  const auto m = mix_support(mdp, pi_prime, k);
  return m.cost + std::pow(mdp.gamma, k) * (m.transition * j);
}

Vector kstep_occupancy(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k) {
  const auto m = mix_support(mdp, pi, k);
  return solve_occupancy(m.transition, mdp.mu, std::pow(mdp.gamma, k));
}

std::string AdvantageTable::to_csv(int precision) const {
  std::string out = "policy";
  for (const auto& s : state_labels) out += "," + s;
  out += ",weighted\n";
  for (std::size_t i = 0; i < policy_labels.size(); ++i) {
    out += policy_labels[i];
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index s = 0; s < advantage.cols(); ++s) {
      out += fmt::format(",{:.{}f}", advantage(row, s) + 0.0, precision);
    }
    out += fmt::format(",{:.{}f}\n", weighted(row) + 0.0, precision);
  }
  return out;
}

AdvantageTable kstep_advantage_table(const KStepModel& model, const Vector& base) {
  const auto& mdp = model.mdp();
  const auto& cls = model.policy_class();
  const auto eval = model.evaluate(base);
  AdvantageTable table;
  table.k = model.k();
  for (int i = 0; i < cls.size(); ++i) table.policy_labels.push_back(cls.label(i));
  for (int s = 0; s < mdp.n_states; ++s) table.state_labels.push_back(mdp.state_label(s));
  table.advantage = model.q_all(eval).transpose();
  table.advantage.rowwise() -= eval.value.transpose();
  table.kstep_occupancy = eval.occupancy;
  table.base_occupancy = base_occupancy(mdp, cls, base);
  table.weighted = table.advantage * table.base_occupancy;
  table.weighted_kstep = table.advantage * table.kstep_occupancy;
  return table;
}

AdvantageTable kstep_advantage_table(const TabularMdp& mdp, const CorrelatedPolicy& base, int k) {
  return kstep_advantage_table(
      KStepModel(std::make_shared<const TabularMdp>(mdp), base.class_ptr(), k), base.weights());
}

int truncation_horizon(const TabularMdp& mdp, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("truncation eps must be positive");
  const double scale = mdp.g_max / (1.0 - mdp.gamma);
  int h = 0;
  double tail = scale;
  while (!(tail < eps)) {
    tail *= mdp.gamma;
    ++h;
  }
  return std::max(h, 1);
}

namespace {

int sample_next(const TabularMdp& mdp, int s, int a, std::mt19937_64& rng) {
  const auto row = mdp.transition[static_cast<std::size_t>(a)].row(s);
  const double u = unit_uniform(rng);
  double acc = 0.0;
  int last = s;
  for (int next = 0; next < mdp.n_states; ++next) {
    if (row(next) <= 0.0) continue;
    acc += row(next);
    last = next;
    if (u < acc) return next;
  }
  return last;
}

int sample_state(const Vector& mu, std::mt19937_64& rng) { return sample_index(mu, rng); }

}  // namespace

McEstimate mc_estimate(const TabularMdp& mdp, const CorrelatedPolicy& pi, int k,
                       const McOptions& options) {
  if (k < 1) throw std::invalid_argument(fmt::format("k must be at least 1, got {}", k));
  if (options.n_rollouts < 1) throw std::invalid_argument("n_rollouts must be at least 1");
  require_valid(mdp);
  if (options.first_window) require_compatible(mdp, *options.first_window);

  McEstimate est;
  est.n_rollouts = options.n_rollouts;
  est.horizon = truncation_horizon(mdp, options.truncation_eps);
  const auto& cls = pi.policy_class();

  std::vector<double> returns(static_cast<std::size_t>(options.n_rollouts));
  auto rollout = [&](int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::mt19937_64 rng(seq);
    int s = sample_state(mdp.mu, rng);
    const DeterministicPolicy* current = nullptr;
    double total = 0.0;
    double discount = 1.0;
    for (int t = 0; t < est.horizon; ++t) {
      if (t % k == 0) {
        current = (t == 0 && options.first_window) ? &*options.first_window
                                                   : &cls[sample_index(pi.weights(), rng)];
      }
      const int a = (*current)(s);
      total += discount * mdp.cost(s, a);
      discount *= mdp.gamma;
      s = sample_next(mdp, s, a, rng);
    }
    returns[static_cast<std::size_t>(index)] = total;
  };

  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, options.n_rollouts);
  if (threads <= 1) {
    for (int i = 0; i < options.n_rollouts; ++i) rollout(i);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < options.n_rollouts; i += threads) rollout(i);
      });
    }
  }

  double sum = 0.0;
  for (double r : returns) sum += r;
  est.mean = sum / options.n_rollouts;
  if (options.n_rollouts > 1) {
    double ss = 0.0;
    for (double r : returns) ss += (r - est.mean) * (r - est.mean);
    est.std_error = std::sqrt(ss / (options.n_rollouts - 1) / options.n_rollouts);
  } else {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

}  // namespace kstep
