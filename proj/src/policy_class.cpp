#include "kstep/policy_class.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace kstep {

std::string PolicyClass::label(int i) const {
  if (i >= 0 && static_cast<std::size_t>(i) < labels.size()) return labels[static_cast<std::size_t>(i)];
  return fmt::format("pi{}", i);
}

std::optional<int> PolicyClass::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (label(i) == name) return i;
  }
  return std::nullopt;
}

std::optional<int> PolicyClass::find(const DeterministicPolicy& pi) const {
  for (int i = 0; i < size(); ++i) {
    if (policies[static_cast<std::size_t>(i)] == pi) return i;
  }
  return std::nullopt;
}

void require_valid_class(const TabularMdp& mdp, const PolicyClass& cls) {
  if (cls.policies.empty()) throw std::invalid_argument("policy class is empty");
  if (!cls.labels.empty() && cls.labels.size() != cls.policies.size()) {
    throw std::invalid_argument("policy class labels do not match the policy count");
  }
  std::set<std::vector<int>> seen;
  for (const auto& pi : cls.policies) {
    require_compatible(mdp, pi);
    if (!seen.insert(pi.action_of).second) {
      throw std::invalid_argument(fmt::format("duplicate policy {}", pi.action_of));
    }
  }
}

nlohmann::json class_to_json(const PolicyClass& cls) {
  nlohmann::json doc;
  auto arr = nlohmann::json::array();
  for (const auto& pi : cls.policies) arr.push_back(pi.action_of);
  doc["policies"] = std::move(arr);
  std::vector<std::string> labels;
  for (int i = 0; i < cls.size(); ++i) labels.push_back(cls.label(i));
  doc["labels"] = labels;
  return doc;
}

PolicyClass class_from_json(const nlohmann::json& doc) {
  PolicyClass cls;
  for (const auto& row : doc.at("policies")) cls.policies.push_back({row.get<std::vector<int>>()});
  if (doc.contains("labels")) cls.labels = doc["labels"].get<std::vector<std::string>>();
  return cls;
}

int ObservationMap::n_observations() const {
  if (obs_of.empty()) return 0;
  return *std::max_element(obs_of.begin(), obs_of.end()) + 1;
}

void ObservationMap::validate(int n_states) const {
  if (static_cast<int>(obs_of.size()) != n_states) {
    throw std::invalid_argument(
        fmt::format("observation map covers {} states, expected {}", obs_of.size(), n_states));
  }
  std::vector<bool> used(static_cast<std::size_t>(n_observations()), false);
  for (int o : obs_of) {
    if (o < 0) throw std::invalid_argument("observation ids must be nonnegative");
    used[static_cast<std::size_t>(o)] = true;
  }
  for (std::size_t o = 0; o < used.size(); ++o) {
    if (!used[o]) throw std::invalid_argument(fmt::format("observation id {} is unused", o));
  }
}

namespace {

int product(const std::vector<int>& sizes) {
  long long p = 1;
  for (int n : sizes) {
    p *= n;
    if (p > std::numeric_limits<int>::max()) throw std::invalid_argument("factor product overflows");
  }
  return static_cast<int>(p);
}

std::vector<int> unravel(int index, const std::vector<int>& sizes) {
  std::vector<int> out(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    out[i] = index % sizes[i];
    index /= sizes[i];
  }
  return out;
}

int ravel(const std::vector<int>& locals, const std::vector<int>& sizes) {
  if (locals.size() != sizes.size()) throw std::invalid_argument("tuple length mismatch");
  int index = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (locals[i] < 0 || locals[i] >= sizes[i]) throw std::invalid_argument("tuple entry out of range");
    index = index * sizes[i] + locals[i];
  }
  return index;
}

}  // namespace

int FactoredSpace::n_joint_states() const { return product(state_sizes); }
int FactoredSpace::n_joint_actions() const { return product(action_sizes); }
std::vector<int> FactoredSpace::state_tuple(int joint) const { return unravel(joint, state_sizes); }
std::vector<int> FactoredSpace::action_tuple(int joint) const { return unravel(joint, action_sizes); }
int FactoredSpace::joint_state(const std::vector<int>& locals) const { return ravel(locals, state_sizes); }
int FactoredSpace::joint_action(const std::vector<int>& locals) const { return ravel(locals, action_sizes); }

std::vector<int> FactoredSpace::allowed_actions(int agent, int local_state) const {
  const auto i = static_cast<std::size_t>(agent);
  if (!admissible.empty() && !admissible[i].empty()) {
    return admissible[i][static_cast<std::size_t>(local_state)];
  }
  std::vector<int> all(static_cast<std::size_t>(action_sizes[i]));
  for (int a = 0; a < action_sizes[i]; ++a) all[static_cast<std::size_t>(a)] = a;
  return all;
}

void FactoredSpace::validate(const TabularMdp& mdp) const {
  if (state_sizes.empty() || state_sizes.size() != action_sizes.size()) {
    throw std::invalid_argument("factored space needs one state and action size per agent");
  }
  if (n_joint_states() != mdp.n_states) {
    throw std::invalid_argument(
        fmt::format("factored states multiply to {}, MDP has {}", n_joint_states(), mdp.n_states));
  }
  if (n_joint_actions() != mdp.n_actions) {
    throw std::invalid_argument(
        fmt::format("factored actions multiply to {}, MDP has {}", n_joint_actions(), mdp.n_actions));
  }
  if (admissible.empty()) return;
  if (admissible.size() != state_sizes.size()) {
    throw std::invalid_argument("admissible action sets must be given for every agent or none");
  }
  for (int i = 0; i < n_agents(); ++i) {
    const auto& per_state = admissible[static_cast<std::size_t>(i)];
    if (per_state.empty()) continue;
    if (static_cast<int>(per_state.size()) != state_sizes[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument(fmt::format("agent {} admissible sets cover the wrong states", i));
    }
    for (const auto& allowed : per_state) {
      if (allowed.empty()) throw std::invalid_argument(fmt::format("agent {} has an empty action set", i));
      for (int a : allowed) {
        if (a < 0 || a >= action_sizes[static_cast<std::size_t>(i)]) {
          throw std::invalid_argument(fmt::format("agent {} admissible action {} out of range", i, a));
        }
      }
    }
  }
}

void GroupingFunction::validate(int n_states, int n_agents) const {
  if (static_cast<int>(groups_at.size()) != n_states) {
    throw std::invalid_argument("grouping must give a partition for every joint state");
  }
  for (int s = 0; s < n_states; ++s) {
    std::vector<int> seen(static_cast<std::size_t>(n_agents), 0);
    for (const auto& group : groups_at[static_cast<std::size_t>(s)]) {
      if (group.empty()) throw std::invalid_argument(fmt::format("empty group at state {}", s));
      for (int agent : group) {
        if (agent < 0 || agent >= n_agents) {
          throw std::invalid_argument(fmt::format("agent {} out of range at state {}", agent, s));
        }
        ++seen[static_cast<std::size_t>(agent)];
      }
    }
    for (int agent = 0; agent < n_agents; ++agent) {
      if (seen[static_cast<std::size_t>(agent)] != 1) {
        throw std::invalid_argument(
            fmt::format("grouping at state {} does not cover agent {} exactly once", s, agent));
      }
    }
  }
}

namespace {

// One free choice in the enumeration. Choosing option j fixes the local
// actions of `agents` to options[j] at every state listed in `states`.
struct Slot {
  int component = 0;
  std::vector<int> agents;
  std::vector<std::vector<int>> options;
  std::vector<int> states;
};

// Mixed-radix enumeration over slots with slot 0 most significant. Slots are
// grouped by component in ascending key order, so the result is lexicographic
// in the per-component policy indices.
PolicyClass enumerate(const TabularMdp& mdp, const std::vector<int>& action_sizes,
                      const std::vector<Slot>& slots, std::size_t cap) {
  double total = 1.0;
  for (const auto& slot : slots) {
    if (slot.options.empty()) throw std::invalid_argument("a policy component has no admissible action");
    total *= static_cast<double>(slot.options.size());
  }
  if (total > static_cast<double>(cap)) {
    throw std::length_error(
        fmt::format("policy class would have {:.0f} policies, above the cap of {}", total, cap));
  }

  const int n_agents = static_cast<int>(action_sizes.size());
  std::vector<std::vector<int>> local(static_cast<std::size_t>(mdp.n_states),
                                      std::vector<int>(static_cast<std::size_t>(n_agents), -1));
  int n_components = 0;
  for (const auto& slot : slots) n_components = std::max(n_components, slot.component + 1);

  PolicyClass cls;
  std::set<std::vector<int>> seen;
  std::vector<std::size_t> digits(slots.size(), 0);
  const auto n_total = static_cast<std::size_t>(total);
  for (std::size_t count = 0; count < n_total; ++count) {
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const auto& slot = slots[j];
      const auto& choice = slot.options[digits[j]];
      for (int s : slot.states) {
        for (std::size_t m = 0; m < slot.agents.size(); ++m) {
          local[static_cast<std::size_t>(s)][static_cast<std::size_t>(slot.agents[m])] = choice[m];
        }
      }
    }
    DeterministicPolicy pi;
    pi.action_of.resize(static_cast<std::size_t>(mdp.n_states));
    for (int s = 0; s < mdp.n_states; ++s) {
      const auto& row = local[static_cast<std::size_t>(s)];
      if (std::find(row.begin(), row.end(), -1) != row.end()) {
        throw std::logic_error(fmt::format("state {} is not covered by any policy component", s));
      }
      pi.action_of[static_cast<std::size_t>(s)] = ravel(row, action_sizes);
    }
    if (seen.insert(pi.action_of).second) {
      std::vector<std::vector<int>> chosen(static_cast<std::size_t>(n_components));
      for (std::size_t j = 0; j < slots.size(); ++j) {
        const auto& choice = slots[j].options[digits[j]];
        auto& part = chosen[static_cast<std::size_t>(slots[j].component)];
        part.insert(part.end(), choice.begin(), choice.end());
      }
      std::vector<std::string> parts;
      for (const auto& part : chosen) {
        const bool wide = std::any_of(part.begin(), part.end(), [](int a) { return a >= 10; });
        parts.push_back(fmt::format("{}", fmt::join(part, wide ? "." : "")));
      }
      cls.labels.push_back(fmt::format("{}", fmt::join(parts, ",")));
      cls.policies.push_back(std::move(pi));
    }
    for (std::size_t j = slots.size(); j-- > 0;) {
      if (++digits[j] < slots[j].options.size()) break;
      digits[j] = 0;
    }
  }
  return cls;
}

std::vector<std::vector<int>> singleton_options(const std::vector<int>& actions) {
  std::vector<std::vector<int>> out;
  for (int a : actions) out.push_back({a});
  return out;
}

std::vector<int> intersect(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> all_actions(int n) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) out[static_cast<std::size_t>(a)] = a;
  return out;
}

}  // namespace

PolicyClass build_unrestricted_class(const TabularMdp& mdp, std::size_t cap) {
  ObservationMap identity;
  for (int s = 0; s < mdp.n_states; ++s) identity.obs_of.push_back(s);
  return build_state_aggregation_class(mdp, identity, cap);
}

PolicyClass build_state_aggregation_class(const TabularMdp& mdp, const ObservationMap& obs,
                                          std::size_t cap) {
  require_valid(mdp);
  obs.validate(mdp.n_states);
  std::vector<Slot> slots(static_cast<std::size_t>(obs.n_observations()));
  for (auto& slot : slots) {
    slot.agents = {0};
    slot.options = singleton_options(all_actions(mdp.n_actions));
  }
  for (int s = 0; s < mdp.n_states; ++s) slots[static_cast<std::size_t>(obs.obs_of[static_cast<std::size_t>(s)])].states.push_back(s);
  return enumerate(mdp, {mdp.n_actions}, slots, cap);
}

PolicyClass build_independent_agents_class(const TabularMdp& mdp, const FactoredSpace& factored,
                                           std::size_t cap) {
  require_valid(mdp);
  factored.validate(mdp);
  std::vector<Slot> slots;
  for (int i = 0; i < factored.n_agents(); ++i) {
    for (int local = 0; local < factored.state_sizes[static_cast<std::size_t>(i)]; ++local) {
      Slot slot;
      slot.component = i;
      slot.agents = {i};
      slot.options = singleton_options(factored.allowed_actions(i, local));
      for (int s = 0; s < mdp.n_states; ++s) {
        if (factored.state_tuple(s)[static_cast<std::size_t>(i)] == local) slot.states.push_back(s);
      }
      slots.push_back(std::move(slot));
    }
  }
  return enumerate(mdp, factored.action_sizes, slots, cap);
}

PolicyClass build_decentralized_class(const TabularMdp& mdp, const FactoredSpace& factored,
                                      const std::vector<ObservationMap>& obs_maps, std::size_t cap) {
  require_valid(mdp);
  factored.validate(mdp);
  if (static_cast<int>(obs_maps.size()) != factored.n_agents()) {
    throw std::invalid_argument("need one observation map per agent");
  }
  std::vector<Slot> slots;
  for (int i = 0; i < factored.n_agents(); ++i) {
    const auto& obs = obs_maps[static_cast<std::size_t>(i)];
    obs.validate(mdp.n_states);
    for (int o = 0; o < obs.n_observations(); ++o) {
      Slot slot;
      slot.component = i;
      slot.agents = {i};
      std::optional<std::vector<int>> allowed;
      for (int s = 0; s < mdp.n_states; ++s) {
        if (obs.obs_of[static_cast<std::size_t>(s)] != o) continue;
        slot.states.push_back(s);
        const auto here = factored.allowed_actions(i, factored.state_tuple(s)[static_cast<std::size_t>(i)]);
        allowed = allowed ? intersect(*allowed, here) : here;
      }
      slot.options = singleton_options(*allowed);
      slots.push_back(std::move(slot));
    }
  }
  return enumerate(mdp, factored.action_sizes, slots, cap);
}

PolicyClass build_group_decentralized_class(const TabularMdp& mdp, const FactoredSpace& factored,
                                            const GroupingFunction& grouping, std::size_t cap) {
  require_valid(mdp);
  factored.validate(mdp);
  grouping.validate(mdp.n_states, factored.n_agents());

  // (sorted group, local states of the group's agents) -> states sharing that key
  std::map<std::vector<int>, std::map<std::vector<int>, std::vector<int>>> keyed;
  for (int s = 0; s < mdp.n_states; ++s) {
    const auto locals = factored.state_tuple(s);
    for (auto group : grouping.groups_at[static_cast<std::size_t>(s)]) {
      std::sort(group.begin(), group.end());
      std::vector<int> key;
      for (int agent : group) key.push_back(locals[static_cast<std::size_t>(agent)]);
      keyed[group][key].push_back(s);
    }
  }

  std::vector<Slot> slots;
  int component = 0;
  for (const auto& [group, by_key] : keyed) {
    for (const auto& [key, states] : by_key) {
      Slot slot;
      slot.component = component;
      slot.agents = group;
      slot.states = states;
      std::vector<std::vector<int>> per_agent;
      std::vector<int> radix;
      for (std::size_t m = 0; m < group.size(); ++m) {
        per_agent.push_back(factored.allowed_actions(group[m], key[m]));
        radix.push_back(static_cast<int>(per_agent.back().size()));
      }
      const int n_options = product(radix);
      for (int j = 0; j < n_options; ++j) {
        const auto digits = unravel(j, radix);
        std::vector<int> choice;
        for (std::size_t m = 0; m < group.size(); ++m) {
          choice.push_back(per_agent[m][static_cast<std::size_t>(digits[m])]);
        }
        slot.options.push_back(std::move(choice));
      }
      slots.push_back(std::move(slot));
    }
    ++component;
  }
  return enumerate(mdp, factored.action_sizes, slots, cap);
}

void require_distribution(const Vector& w, Eigen::Index expected_size) {
  if (w.size() != expected_size) {
    throw std::invalid_argument(fmt::format("weight vector has length {}, expected {}", w.size(), expected_size));
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i)) || w(i) < 0.0) {
      throw std::invalid_argument(fmt::format("weight {} = {:.6g} is negative", i, w(i)));
    }
  }
  if (std::abs(w.sum() - 1.0) > 1e-10) {
    throw std::invalid_argument(fmt::format("weights sum to {:.12g}", w.sum()));
  }
}

CorrelatedPolicy::CorrelatedPolicy(std::shared_ptr<const PolicyClass> cls, Vector weights)
    : cls_(std::move(cls)), weights_(std::move(weights)) {
  if (!cls_) throw std::invalid_argument("correlated policy needs a policy class");
  require_distribution(weights_, cls_->size());
}

CorrelatedPolicy dirac(std::shared_ptr<const PolicyClass> cls, int index) {
  if (!cls || index < 0 || index >= cls->size()) {
    throw std::out_of_range(fmt::format("policy index {} out of range", index));
  }
  Vector w = Vector::Zero(cls->size());
  w(index) = 1.0;
  return {std::move(cls), std::move(w)};
}

CorrelatedPolicy uniform(std::shared_ptr<const PolicyClass> cls) {
  const int n = cls->size();
  return {std::move(cls), Vector::Constant(n, 1.0 / n)};
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_index(const Vector& w, std::mt19937_64& rng) {
  const double u = unit_uniform(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) <= 0.0) continue;
    acc += w(i);
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  return last_positive;
}

DeterministicPolicy sample(const CorrelatedPolicy& pi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return pi.policy_class()[sample_index(pi.weights(), rng)];
}

double expected_value(const TabularMdp& mdp, const CorrelatedPolicy& pi) {
  double total = 0.0;
  for (int i = 0; i < pi.size(); ++i) {
    if (pi.weights()(i) > 0.0) total += pi.weights()(i) * policy_value(mdp, pi.policy_class()[i]);
  }
  return total;
}

}  // namespace kstep
