#include "support.hpp"

#include <doctest.h>

using namespace kstep;
using namespace kstep::testing;

TEST_CASE("simplex projection beats every point of a simplex grid") {
  std::mt19937_64 rng(61);
  const auto grid = simplex_grid(3, 60);
  for (int trial = 0; trial < 200; ++trial) {
    Vector v(3);
    for (int i = 0; i < 3; ++i) v(i) = uniform_in(rng, -1.5, 1.5);
    const Vector p = project_to_simplex(v);
    CHECK(p.sum() == doctest::Approx(1.0));
    CHECK(p.minCoeff() >= 0.0);
    const double d = (p - v).norm();
    for (const auto& g : grid) CHECK(d <= (g - v).norm() + 1e-12);
  }
  Vector inside(3);
  inside << 0.2, 0.3, 0.5;
  CHECK((project_to_simplex(inside) - inside).norm() < 1e-15);
  CHECK_THROWS_AS(project_to_simplex(Vector()), std::invalid_argument);
}

TEST_CASE("divergences and floors") {
  Vector p(3), q(3);
  p << 0.5, 0.5, 0.0;
  q << 0.25, 0.25, 0.5;
  CHECK(kl_divergence(p, q) == doctest::Approx(std::log(2.0)));
  CHECK(kl_divergence(q, q) == 0.0);
  CHECK(euclidean_divergence(p, q) == doctest::Approx(0.5 * (0.0625 * 2 + 0.25)));
  const Vector f = floor_weights(p, 1e-3);
  CHECK(f.minCoeff() > 0.0);
  CHECK(f.sum() == doctest::Approx(1.0));
}

TEST_CASE("single steps move against the gradient and stay on the simplex") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = int_in(rng, 2, 8);
    const Vector w = random_distribution(rng, n);
    Vector g(n);
    for (int i = 0; i < n; ++i) g(i) = uniform_in(rng, -1, 1);
    const Vector mirror = mirror_step(w, g, 0.5, 1e-12);
    CHECK(mirror.sum() == doctest::Approx(1.0));
    // Multiplicative update: ratios follow exp(-eta (g_i - g_j)).
    CHECK(std::log(mirror(0) / mirror(1)) == doctest::Approx(std::log(w(0) / w(1)) - 0.5 * (g(0) - g(1))));
    const Vector pgd = projected_gd_step(w, g, 0.1);
    CHECK(pgd.sum() == doctest::Approx(1.0));
    CHECK((pgd - w).dot(g) <= 1e-12);
  }
}

TEST_CASE("certified smoothness bounds sampled gradient changes") {
  const auto exp = make_experiment("number_matching");
  const KStepModel model(exp.mdp, exp.cls, 3);
  const double beta = certify_smoothness(model, Method::kProjectedGd, 64, 1);
  CHECK(beta > 0.0);
  CHECK(beta == certify_smoothness(model, Method::kProjectedGd, 64, 1));
}

TEST_CASE("mirror descent traces never increase the k-step value") {
  for (const auto& name : experiment_names()) {
    const auto exp = make_experiment(name);
    for (int k : {1, exp.ks.back()}) {
      const KStepModel model(exp.mdp, exp.cls, k);
      OptimizerConfig config;
      config.method = Method::kMirrorEntropy;
      config.k = k;
      config.max_iters = 200;
      config.keep_vectors = false;
      const auto trace = mirror_descent_run(model, vertex(exp.cls->size(), exp.crit), config);
      CHECK(trace.monotonicity_violations == 0);
      CHECK(trace.records.size() <= 201);
      for (std::size_t t = 1; t < trace.records.size(); ++t) {
        CHECK(trace.records[t].value_k <= trace.records[t - 1].value_k + 1e-10);
      }
    }
  }
}

TEST_CASE("projected descent stalls at the number-matching vertex for k = 1") {
  const auto exp = make_experiment("number_matching");
  const KStepModel model(exp.mdp, exp.cls, 1);
  OptimizerConfig config;
  config.k = 1;
  config.max_iters = 100;
  config.stop_tol = 0.0;
  const Vector start = vertex(16, exp.crit);
  const auto trace = projected_gd_run(model, start, config);
  CHECK(trace.records.size() == 101);
  for (const auto& r : trace.records) CHECK((r.weights - start).lpNorm<1>() == 0.0);
}

TEST_CASE("descent escapes once k reaches the escape horizon") {
  const auto exp = make_experiment("number_matching");
  for (const auto method : {Method::kProjectedGd, Method::kMirrorEntropy}) {
    const KStepModel model(exp.mdp, exp.cls, 3);
    OptimizerConfig config;
    config.method = method;
    config.k = 3;
    config.max_iters = 2000;
    const auto trace = descent_run(model, vertex(16, exp.crit), config);
    CHECK(trace.last().gap <= critical_gap_bound(*exp.mdp, 3));
    CHECK(trace.last().expected_value < policy_value(*exp.mdp, (*exp.cls)[exp.crit]) - 1.0);
  }
}

TEST_CASE("fixed step sizes, validation and CSV layout") {
  const auto exp = make_experiment("two_state");
  const KStepModel model(exp.mdp, exp.cls, 3);
  OptimizerConfig config;
  config.k = 3;
  config.step_size = 0.01;
  config.max_iters = 5;
  const auto trace = projected_gd_run(model, vertex(2, exp.crit), config);
  CHECK(trace.step_size == 0.01);
  CHECK(trace.records.size() <= 6);
  const auto csv = trace.to_csv();
  CHECK(csv.rfind("iter,J_k,E_J1,gap,dirderiv_to_star,step_norm\n", 0) == 0);
  CHECK(trace.to_json()["records"].size() == trace.records.size());

  auto bad = config;
  bad.k = 2;
  CHECK_THROWS_AS(projected_gd_run(model, vertex(2, 0), bad), std::invalid_argument);
  bad = config;
  bad.step_size = -1.0;
  CHECK_THROWS_AS(projected_gd_run(model, vertex(2, 0), bad), std::invalid_argument);
  CHECK_THROWS_AS(projected_gd_run(model, Vector::Constant(2, 0.7), config), std::invalid_argument);
  CHECK(parse_method("mirror") == Method::kMirrorEntropy);
  CHECK_THROWS_AS(parse_method("adam"), std::invalid_argument);
}

TEST_CASE("performance gap record") {
  const auto exp = make_experiment("moat_cross");
  const auto gap = performance_gap(*exp.mdp, dirac(exp.cls, exp.crit), 6);
  CHECK(std::abs(gap.best_value + 140.67) < 5e-3);
  CHECK(std::abs(gap.expected_gap - (140.67 - 7.29)) < 1e-2);
  CHECK(gap.bound == doctest::Approx(8 * std::pow(exp.mdp->gamma, 6) * exp.mdp->g_max / (1 - exp.mdp->gamma)));
}
