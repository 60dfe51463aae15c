#include "support.hpp"

#include <doctest.h>

using namespace kstep;
using namespace kstep::testing;

TEST_CASE("k-step operator composes the one-step kernel") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto pi = random_policy(rng, mdp);
    const Matrix p = policy_transition(mdp, pi);
    const Vector g = policy_cost(mdp, pi);
    const int k = int_in(rng, 1, 6);
    const auto op = kstep_operator(mdp, pi, k);
    Matrix power = Matrix::Identity(mdp.n_states, mdp.n_states);
    Vector cost = Vector::Zero(mdp.n_states);
    for (int t = 0; t < k; ++t) {
      cost += std::pow(mdp.gamma, t) * power * g;
      power = power * p;
    }
    CHECK((op.transition - power).norm() < 1e-12);
    CHECK((op.cost - cost).norm() < 1e-10);
  }
  const auto mdp = random_mdp(rng);
  CHECK_THROWS_AS(kstep_operator(mdp, random_policy(rng, mdp), 0), std::invalid_argument);
}

TEST_CASE("k-step value agrees with a truncated rollout of the resampling process") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto cls = random_class(rng, mdp);
    const Vector w = random_distribution(rng, cls->size(), 0.2);
    const int k = int_in(rng, 1, 7);
    const KStepModel model(std::make_shared<const TabularMdp>(mdp), cls, k);
    const double exact = model.value(w);
    CHECK(exact == doctest::Approx(rollout_value(mdp, *cls, w, k)).epsilon(1e-9));
    CHECK(exact == doctest::Approx(mdp.mu.dot(kstep_value(mdp, CorrelatedPolicy(cls, w), k))));
  }
}

TEST_CASE("Dirac weights reproduce the deterministic value at every horizon") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto cls = random_class(rng, mdp);
    for (int k : {1, 2, 5, 17, 100}) {
      const KStepModel model(std::make_shared<const TabularMdp>(mdp), cls, k);
      for (int i = 0; i < cls->size(); ++i) {
        const Vector j = model.evaluate(vertex(cls->size(), i)).value;
        CHECK((j - evaluate_policy(mdp, (*cls)[i])).lpNorm<Eigen::Infinity>() < 1e-9);
      }
    }
  }
}

TEST_CASE("k-step Q is affine in its second argument and consistent with J") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto cls = random_class(rng, mdp);
    const int k = int_in(rng, 1, 5);
    const KStepModel model(std::make_shared<const TabularMdp>(mdp), cls, k);
    const Vector w = random_distribution(rng, cls->size());
    const auto eval = model.evaluate(w);
    // Averaging Q over the policy's own weights gives J back.
    CHECK((model.q_mixed(eval, w) - eval.value).lpNorm<Eigen::Infinity>() < 1e-9);
    const Vector target = random_distribution(rng, cls->size());
    const Matrix q = model.q_all(eval);
    CHECK((model.q_mixed(eval, target) - q * target).norm() < 1e-9);
    const CorrelatedPolicy pi(cls, w);
    CHECK((kstep_q(mdp, pi, k, (*cls)[0]) - q.col(0)).norm() < 1e-9);
    CHECK((kstep_q(mdp, pi, k, CorrelatedPolicy(cls, target)) - q * target).norm() < 1e-9);
  }
}

TEST_CASE("performance difference identity over k-step windows") {
  std::mt19937_64 rng(35);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto cls = random_class(rng, mdp);
    const int k = int_in(rng, 1, 8);
    const KStepModel model(std::make_shared<const TabularMdp>(mdp), cls, k);
    const Vector w = random_distribution(rng, cls->size(), 0.3);
    const Vector v = random_distribution(rng, cls->size(), 0.3);
    const auto ew = model.evaluate(w);
    const auto ev = model.evaluate(v);
    const double rhs = ev.occupancy.dot(model.q_mixed(ew, v) - ew.value) / (1.0 - model.discount());
    worst = std::max(worst, std::abs(ev.value_at_mu - ew.value_at_mu - rhs));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("k-step occupancy is a distribution within 2 gamma^k of mu") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto cls = random_class(rng, mdp);
    const int k = int_in(rng, 1, 10);
    const CorrelatedPolicy pi(cls, random_distribution(rng, cls->size(), 0.3));
    const Vector d = kstep_occupancy(mdp, pi, k);
    CHECK(d.sum() == doctest::Approx(1.0));
    CHECK(d.minCoeff() >= -1e-12);
    CHECK((d - mdp.mu).lpNorm<1>() <= 2.0 * std::pow(mdp.gamma, k) + 1e-12);
  }
}

TEST_CASE("k = 1 occupancy is the one-step occupancy of the averaged kernel") {
  std::mt19937_64 rng(37);
  const auto mdp = random_mdp(rng);
  const auto cls = random_class(rng, mdp);
  const KStepModel model(std::make_shared<const TabularMdp>(mdp), cls, 1);
  const auto eval = model.evaluate(uniform(cls).weights());
  Matrix p = Matrix::Zero(mdp.n_states, mdp.n_states);
  for (const auto& pi : cls->policies) p += policy_transition(mdp, pi) / cls->size();
  const Vector d = (Matrix::Identity(mdp.n_states, mdp.n_states) - mdp.gamma * p.transpose())
                       .lu()
                       .solve((1.0 - mdp.gamma) * mdp.mu);
  CHECK((eval.occupancy - d).norm() < 1e-12);
}

TEST_CASE("Monte Carlo rollouts bracket the exact k-step value") {
  std::mt19937_64 rng(38);
  const auto mdp = random_mdp(rng, 4, 2);
  const auto cls = random_class(rng, mdp, 4);
  const CorrelatedPolicy pi(cls, random_distribution(rng, cls->size()));
  for (int k : {1, 3}) {
    McOptions options;
    options.n_rollouts = 20000;
    options.seed = 7;
    const auto est = mc_estimate(mdp, pi, k, options);
    const double exact = mdp.mu.dot(kstep_value(mdp, pi, k));
    CHECK(std::abs(est.mean - exact) <= 4.0 * est.std_error + 1e-6);
    CHECK(est.horizon == truncation_horizon(mdp, options.truncation_eps));

    auto single = options;
    single.threads = 1;
    auto many = options;
    many.threads = 5;
    CHECK(mc_estimate(mdp, pi, k, single).mean == mc_estimate(mdp, pi, k, many).mean);
  }
}

TEST_CASE("Monte Carlo standard error shrinks like one over root n") {
  std::mt19937_64 rng(39);
  const auto mdp = random_mdp(rng, 4, 2);
  const auto cls = random_class(rng, mdp, 4);
  const CorrelatedPolicy pi(cls, random_distribution(rng, cls->size()));
  McOptions small;
  small.n_rollouts = 16;
  small.seed = 3;
  auto large = small;
  large.n_rollouts = 160000;
  const double ratio = mc_estimate(mdp, pi, 2, small).std_error / mc_estimate(mdp, pi, 2, large).std_error;
  CHECK(ratio > 50.0);
  CHECK(ratio < 200.0);
  McOptions one;
  one.n_rollouts = 1;
  CHECK(std::isnan(mc_estimate(mdp, pi, 2, one).std_error));
}

TEST_CASE("advantage table rows, weighting and CSV layout") {
  const auto exp = make_experiment("number_matching");
  const KStepModel model(exp.mdp, exp.cls, 3);
  const auto table = kstep_advantage_table(model, vertex(exp.cls->size(), exp.crit));
  CHECK(table.advantage.rows() == 16);
  CHECK(table.advantage.row(exp.crit).norm() < 1e-12);
  CHECK(table.weighted(exp.crit) == doctest::Approx(0.0));
  CHECK((table.weighted - table.advantage * table.base_occupancy).norm() < 1e-12);
  CHECK((table.weighted_kstep - table.advantage * table.kstep_occupancy).norm() < 1e-12);
  CHECK(&table.weighted_by(Weighting::kKStepOccupancy) == &table.weighted_kstep);
  const auto csv = table.to_csv();
  CHECK(csv.rfind("policy,(0,0),(0,1),(1,0),(1,1),weighted\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
}
