#include "support.hpp"

#include "kstep/mdp_io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace kstep;
using namespace kstep::testing;

namespace {

TabularMdp chain() {
  // 0 -> 1 -> 2 (absorbing) under action 0, action 1 stays put.
  return make_deterministic_mdp(
      3, 2, [](int s, int a) { return a == 0 ? std::min(s + 1, 2) : s; },
      [](int s, int a) { return s == 2 ? 0.0 : (a == 0 ? 1.0 : 2.0); }, 0.5, Vector::Unit(3, 0));
}

// sum_t gamma^t mu^T (P^pi)^t g^pi, truncated.
double truncated_value(const TabularMdp& mdp, const DeterministicPolicy& pi, int horizon) {
  const Matrix p = policy_transition(mdp, pi);
  const Vector g = policy_cost(mdp, pi);
  Vector rho = mdp.mu;
  double total = 0.0;
  double disc = 1.0;
  for (int t = 0; t < horizon; ++t) {
    total += disc * rho.dot(g);
    rho = p.transpose() * rho;
    disc *= mdp.gamma;
  }
  return total;
}

}  // namespace

TEST_CASE("closed-form values on a deterministic chain") {
  const auto mdp = chain();
  CHECK(validate_mdp(mdp) == std::nullopt);
  CHECK(mdp.g_max == doctest::Approx(2.0));
  const DeterministicPolicy go{{0, 0, 0}};
  const Vector j = evaluate_policy(mdp, go);
  CHECK(j(2) == doctest::Approx(0.0));
  CHECK(j(1) == doctest::Approx(1.0));
  CHECK(j(0) == doctest::Approx(1.5));
  const DeterministicPolicy stay{{1, 1, 1}};
  CHECK(policy_value(mdp, stay) == doctest::Approx(2.0 / (1.0 - 0.5)));
  const Vector d = occupancy(mdp, go);
  CHECK(d(0) == doctest::Approx(0.5));
  CHECK(d(1) == doctest::Approx(0.25));
  CHECK(d(2) == doctest::Approx(0.25));
}

TEST_CASE("exact evaluation agrees with truncated rollouts") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto pi = random_policy(rng, mdp);
    const int horizon = static_cast<int>(std::ceil(std::log(1e-13) / std::log(mdp.gamma)));
    CHECK(policy_value(mdp, pi) == doctest::Approx(truncated_value(mdp, pi, horizon)).epsilon(1e-9));
  }
}

TEST_CASE("Q at the policy's own action recovers J, and occupancy is a fixed point") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto mdp = random_mdp(rng);
    const auto pi = random_policy(rng, mdp);
    const Vector j = evaluate_policy(mdp, pi);
    const Matrix q = q_values(mdp, pi);
    for (int s = 0; s < mdp.n_states; ++s) CHECK(q(s, pi(s)) == doctest::Approx(j(s)).epsilon(1e-10));

    const Vector d = occupancy(mdp, pi);
    CHECK(d.sum() == doctest::Approx(1.0));
    CHECK(d.minCoeff() >= -1e-12);
    const Vector fixed = (1.0 - mdp.gamma) * mdp.mu + mdp.gamma * policy_transition(mdp, pi).transpose() * d;
    CHECK((fixed - d).lpNorm<Eigen::Infinity>() < 1e-12);
    // Occupancy-weighted cost equals (1 - gamma) J(mu).
    CHECK(d.dot(policy_cost(mdp, pi)) == doctest::Approx((1.0 - mdp.gamma) * policy_value(mdp, pi)));
  }
}

TEST_CASE("validation names the first broken invariant") {
  auto mdp = chain();
  SUBCASE("discount") {
    mdp.gamma = 1.0;
    REQUIRE(validate_mdp(mdp));
    CHECK(validate_mdp(mdp)->find("gamma") != std::string::npos);
    CHECK_THROWS_AS(require_valid(mdp), std::invalid_argument);
  }
  SUBCASE("row sums") {
    mdp.transition[0](1, 2) = 0.5;
    REQUIRE(validate_mdp(mdp));
    CHECK(validate_mdp(mdp)->find("(s=1,a=0)") != std::string::npos);
  }
  SUBCASE("initial distribution") {
    mdp.mu = Vector::Constant(3, 0.5);
    CHECK(validate_mdp(mdp));
  }
  SUBCASE("cost bound") {
    mdp.g_max = 1.0;
    CHECK(validate_mdp(mdp));
  }
  SUBCASE("incompatible policy") {
    CHECK_THROWS_AS(require_compatible(mdp, DeterministicPolicy{{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(require_compatible(mdp, DeterministicPolicy{{0, 2, 0}}), std::invalid_argument);
  }
}

TEST_CASE("labels default to indices and can be looked up") {
  auto mdp = chain();
  CHECK(mdp.state_label(1) == "s1");
  CHECK(mdp.action_label(0) == "a0");
  mdp.state_labels = {"start", "mid", "goal"};
  CHECK(mdp.find_state("goal") == 2);
  CHECK_FALSE(mdp.find_state("nowhere"));
}

TEST_CASE("JSON round trip preserves the model") {
  std::mt19937_64 rng(13);
  auto mdp = random_mdp(rng);
  mdp.state_labels.clear();
  for (int s = 0; s < mdp.n_states; ++s) mdp.state_labels.push_back("x" + std::to_string(s));
  const auto back = mdp_from_json(mdp_to_json(mdp));
  CHECK(back.n_states == mdp.n_states);
  CHECK(back.gamma == mdp.gamma);
  CHECK(back.state_labels == mdp.state_labels);
  CHECK((back.cost - mdp.cost).norm() == 0.0);
  for (int a = 0; a < mdp.n_actions; ++a) CHECK((back.transition[a] - mdp.transition[a]).norm() == 0.0);

  const auto path = std::filesystem::temp_directory_path() / "kstep_mdp_roundtrip.json";
  save_mdp(mdp, path);
  const auto loaded = load_mdp(path);
  CHECK((loaded.mu - mdp.mu).norm() == 0.0);
  std::filesystem::remove(path);

  auto doc = mdp_to_json(mdp);
  doc.erase("cost");
  CHECK_THROWS_AS(mdp_from_json(doc), std::invalid_argument);
}
