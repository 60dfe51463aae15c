#include "support.hpp"

#include <doctest.h>

#include <map>

using namespace kstep;
using namespace kstep::testing;

namespace {

TabularMdp sized_mdp(std::mt19937_64& rng, int n_states, int n_actions) {
  TabularMdp mdp;
  do {
    mdp = random_mdp(rng, n_states, n_actions);
  } while (mdp.n_states != n_states || mdp.n_actions != n_actions);
  return mdp;
}

// Every total map S -> A, filtered by `keep`.
std::set<std::vector<int>> brute_force(const TabularMdp& mdp,
                                       const std::function<bool(const std::vector<int>&)>& keep) {
  std::set<std::vector<int>> out;
  std::vector<int> actions(static_cast<std::size_t>(mdp.n_states), 0);
  while (true) {
    if (keep(actions)) out.insert(actions);
    int s = 0;
    while (s < mdp.n_states && ++actions[static_cast<std::size_t>(s)] == mdp.n_actions) {
      actions[static_cast<std::size_t>(s)] = 0;
      ++s;
    }
    if (s == mdp.n_states) break;
  }
  return out;
}

std::set<std::vector<int>> members(const PolicyClass& cls) {
  std::set<std::vector<int>> out;
  for (const auto& pi : cls.policies) out.insert(pi.action_of);
  CHECK(out.size() == cls.policies.size());
  return out;
}

// Two local states for agent 0, three for agent 1; two local actions each.
FactoredSpace small_space() { return FactoredSpace{{2, 3}, {2, 2}, {}}; }

}  // namespace

TEST_CASE("unrestricted class is the full product") {
  std::mt19937_64 rng(21);
  const auto mdp = sized_mdp(rng, 4, 3);
  const auto cls = build_unrestricted_class(mdp);
  CHECK(cls.size() == 81);
  CHECK(members(cls) == brute_force(mdp, [](const auto&) { return true; }));
  CHECK_THROWS_AS(build_unrestricted_class(mdp, 80), std::length_error);
}

TEST_CASE("state aggregation matches brute-force filtering") {
  std::mt19937_64 rng(22);
  const auto mdp = sized_mdp(rng, 5, 2);
  const ObservationMap obs{{0, 1, 0, 2, 1}};
  const auto cls = build_state_aggregation_class(mdp, obs);
  const auto expected = brute_force(mdp, [&](const std::vector<int>& a) {
    for (int s = 0; s < 5; ++s) {
      for (int t = 0; t < 5; ++t) {
        if (obs.obs_of[s] == obs.obs_of[t] && a[s] != a[t]) return false;
      }
    }
    return true;
  });
  CHECK(cls.size() == 8);
  CHECK(members(cls) == expected);
  CHECK_THROWS_AS(build_state_aggregation_class(mdp, ObservationMap{{0, 2, 0, 2, 0}}), std::invalid_argument);
}

TEST_CASE("factored index conversions are row-major with agent 0 most significant") {
  const auto space = small_space();
  CHECK(space.n_joint_states() == 6);
  CHECK(space.joint_state({1, 2}) == 5);
  CHECK(space.state_tuple(4) == std::vector<int>{1, 1});
  for (int j = 0; j < space.n_joint_actions(); ++j) CHECK(space.joint_action(space.action_tuple(j)) == j);
}

TEST_CASE("independent and decentralized agents match brute-force filtering") {
  std::mt19937_64 rng(23);
  const auto mdp = sized_mdp(rng, 6, 4);
  auto space = small_space();

  auto consistent = [&](const std::vector<int>& a, const std::vector<std::vector<int>>& obs) {
    for (int s = 0; s < 6; ++s) {
      const auto as = space.action_tuple(a[s]);
      const auto ls = space.state_tuple(s);
      for (int i = 0; i < 2; ++i) {
        const auto allowed = space.allowed_actions(i, ls[i]);
        if (std::find(allowed.begin(), allowed.end(), as[i]) == allowed.end()) return false;
        for (int t = 0; t < 6; ++t) {
          if (obs[i][s] == obs[i][t] && space.action_tuple(a[t])[i] != as[i]) return false;
        }
      }
    }
    return true;
  };
  const std::vector<std::vector<int>> own{{0, 0, 0, 1, 1, 1}, {0, 1, 2, 0, 1, 2}};

  SUBCASE("independent") {
    const auto cls = build_independent_agents_class(mdp, space);
    CHECK(cls.size() == 4 * 8);
    CHECK(members(cls) == brute_force(mdp, [&](const auto& a) { return consistent(a, own); }));
  }
  SUBCASE("independent with admissible sets") {
    space.admissible = {{{0, 1}, {1}}, {{0}, {0, 1}, {1}}};
    const auto cls = build_independent_agents_class(mdp, space);
    CHECK(cls.size() == 2 * 2);
    CHECK(members(cls) == brute_force(mdp, [&](const auto& a) { return consistent(a, own); }));
  }
  SUBCASE("decentralized with coarse observations") {
    space.admissible = {{{0, 1}, {0, 1}}, {{0, 1}, {1}, {0, 1}}};
    const std::vector<std::vector<int>> obs{{0, 1, 1, 0, 1, 1}, {0, 0, 1, 0, 0, 1}};
    const auto cls = build_decentralized_class(mdp, space, {{obs[0]}, {obs[1]}});
    CHECK(members(cls) == brute_force(mdp, [&](const auto& a) { return consistent(a, obs); }));
    CHECK(cls.size() == 4 * 2);
  }
}

TEST_CASE("group-decentralized class matches brute-force filtering") {
  std::mt19937_64 rng(24);
  const auto mdp = sized_mdp(rng, 6, 4);
  const auto space = small_space();
  // Agents act jointly in local state pair (*, 2) and separately elsewhere.
  GroupingFunction grouping;
  for (int s = 0; s < 6; ++s) {
    if (space.state_tuple(s)[1] == 2) {
      grouping.groups_at.push_back({{1, 0}});
    } else {
      grouping.groups_at.push_back({{0}, {1}});
    }
  }
  const auto cls = build_group_decentralized_class(mdp, space, grouping);
  const auto expected = brute_force(mdp, [&](const std::vector<int>& a) {
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<int>> seen;
    for (int s = 0; s < 6; ++s) {
      const auto ls = space.state_tuple(s);
      const auto as = space.action_tuple(a[s]);
      for (auto group : grouping.groups_at[s]) {
        std::sort(group.begin(), group.end());
        std::vector<int> key;
        std::vector<int> act;
        for (int i : group) {
          key.push_back(ls[i]);
          act.push_back(as[i]);
        }
        auto [it, fresh] = seen.try_emplace({group, key}, act);
        if (!fresh && it->second != act) return false;
      }
    }
    return true;
  });
  CHECK(members(cls) == expected);
  CHECK(cls.size() == 2 * 2 * 2 * 2 * 4 * 4);
}

TEST_CASE("labels, lookup and validation") {
  std::mt19937_64 rng(25);
  const auto mdp = sized_mdp(rng, 3, 2);
  auto cls = build_unrestricted_class(mdp);
  CHECK(cls.label(0) == "000");
  CHECK(cls.index_of("101") == cls.find(DeterministicPolicy{{1, 0, 1}}));
  CHECK_FALSE(cls.index_of("777"));
  require_valid_class(mdp, cls);

  const auto round = class_from_json(class_to_json(cls));
  CHECK(round.labels == cls.labels);
  CHECK(round.policies == cls.policies);

  auto dup = cls;
  dup.policies[1] = dup.policies[0];
  CHECK_THROWS_AS(require_valid_class(mdp, dup), std::invalid_argument);
  CHECK_THROWS_AS(require_valid_class(mdp, PolicyClass{}), std::invalid_argument);
  PolicyClass unlabeled{cls.policies, {}};
  CHECK(unlabeled.label(3) == "pi3");
}

TEST_CASE("correlated policies are validated distributions") {
  std::mt19937_64 rng(26);
  const auto mdp = sized_mdp(rng, 2, 2);
  const auto cls = std::make_shared<const PolicyClass>(build_unrestricted_class(mdp));
  CHECK(dirac(cls, 2).weights()(2) == 1.0);
  CHECK(uniform(cls).weights().sum() == doctest::Approx(1.0));
  CHECK_THROWS_AS(dirac(cls, 4), std::out_of_range);
  CHECK_THROWS_AS(CorrelatedPolicy(cls, Vector::Constant(4, 0.3)), std::invalid_argument);
  CHECK_THROWS_AS(CorrelatedPolicy(cls, Vector::Constant(3, 1.0 / 3)), std::invalid_argument);
  Vector w(4);
  w << 0.5, 0.7, -0.2, 0.0;
  CHECK_THROWS_AS(CorrelatedPolicy(cls, w), std::invalid_argument);

  const Vector ww = random_distribution(rng, 4);
  const CorrelatedPolicy pi(cls, ww);
  CHECK(sample(pi, 99) == sample(pi, 99));
  double expected = 0.0;
  for (int i = 0; i < 4; ++i) expected += ww(i) * policy_value(mdp, (*cls)[i]);
  CHECK(expected_value(mdp, pi) == doctest::Approx(expected));

  std::vector<int> counts(4, 0);
  std::mt19937_64 draw(5);
  for (int n = 0; n < 40000; ++n) ++counts[static_cast<std::size_t>(sample_index(ww, draw))];
  for (int i = 0; i < 4; ++i) CHECK(counts[i] / 40000.0 == doctest::Approx(ww(i)).epsilon(0.05));
}

TEST_CASE("registered experiments enumerate the expected class sizes") {
  CHECK(make_experiment("two_state").cls->size() == 2);
  CHECK(make_experiment("number_matching").cls->size() == 16);
  CHECK(make_experiment("button_press").cls->size() == 576);
  CHECK(make_experiment("moat_cross").cls->size() == 2187);
  CHECK(make_experiment("two_path").cls->size() == 243);
}
