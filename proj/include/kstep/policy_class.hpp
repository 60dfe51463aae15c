#pragma once

#include "kstep/mdp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace kstep {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

// An explicitly enumerated set of deterministic policies. Order is fixed by
// the constructor that produced it and is what every weight vector indexes.
struct PolicyClass {
  std::vector<DeterministicPolicy> policies;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(policies.size()); }
  const DeterministicPolicy& operator[](int i) const { return policies[static_cast<std::size_t>(i)]; }
  std::string label(int i) const;
  std::optional<int> index_of(const std::string& label) const;
  std::optional<int> find(const DeterministicPolicy& pi) const;
};

// Throws std::invalid_argument on an empty class, duplicate action vectors,
// label count mismatch, or a policy incompatible with the model.
void require_valid_class(const TabularMdp& mdp, const PolicyClass& cls);

nlohmann::json class_to_json(const PolicyClass& cls);
PolicyClass class_from_json(const nlohmann::json& doc);

struct ObservationMap {
  std::vector<int> obs_of;

  int n_observations() const;
  // Ids must cover 0..n_observations()-1 with no gaps.
  void validate(int n_states) const;
};

// Row-major bijection between joint indices and per-agent tuples; agent 0 is
// the most significant digit. admissible[i][local_state] optionally narrows
// the local actions agent i may take at that local state.
struct FactoredSpace {
  std::vector<int> state_sizes;
  std::vector<int> action_sizes;
  std::vector<std::vector<std::vector<int>>> admissible;

  int n_agents() const { return static_cast<int>(state_sizes.size()); }
  int n_joint_states() const;
  int n_joint_actions() const;
  std::vector<int> state_tuple(int joint) const;
  std::vector<int> action_tuple(int joint) const;
  int joint_state(const std::vector<int>& locals) const;
  int joint_action(const std::vector<int>& locals) const;
  std::vector<int> allowed_actions(int agent, int local_state) const;
  void validate(const TabularMdp& mdp) const;
};

// groups_at[s] partitions the agent indices at joint state s.
struct GroupingFunction {
  std::vector<std::vector<std::vector<int>>> groups_at;

  void validate(int n_states, int n_agents) const;
};

PolicyClass build_unrestricted_class(const TabularMdp& mdp,
                                     std::size_t cap = kDefaultEnumerationCap);
PolicyClass build_state_aggregation_class(const TabularMdp& mdp, const ObservationMap& obs,
                                          std::size_t cap = kDefaultEnumerationCap);
PolicyClass build_independent_agents_class(const TabularMdp& mdp, const FactoredSpace& factored,
                                           std::size_t cap = kDefaultEnumerationCap);
PolicyClass build_decentralized_class(const TabularMdp& mdp, const FactoredSpace& factored,
                                      const std::vector<ObservationMap>& obs_maps,
                                      std::size_t cap = kDefaultEnumerationCap);
PolicyClass build_group_decentralized_class(const TabularMdp& mdp, const FactoredSpace& factored,
                                            const GroupingFunction& grouping,
                                            std::size_t cap = kDefaultEnumerationCap);

class CorrelatedPolicy {
 public:
  CorrelatedPolicy(std::shared_ptr<const PolicyClass> cls, Vector weights);

  const PolicyClass& policy_class() const { return *cls_; }
  const std::shared_ptr<const PolicyClass>& class_ptr() const { return cls_; }
  const Vector& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.size()); }

 private:
  std::shared_ptr<const PolicyClass> cls_;
  Vector weights_;
};

// Throws std::invalid_argument unless w >= 0 and sums to 1 within 1e-10.
void require_distribution(const Vector& w, Eigen::Index expected_size);

CorrelatedPolicy dirac(std::shared_ptr<const PolicyClass> cls, int index);
CorrelatedPolicy uniform(std::shared_ptr<const PolicyClass> cls);

// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double unit_uniform(std::mt19937_64& rng);
int sample_index(const Vector& w, std::mt19937_64& rng);
DeterministicPolicy sample(const CorrelatedPolicy& pi, std::uint64_t seed);

// E_{pi ~ pi_tilde}[mu . J^pi]
double expected_value(const TabularMdp& mdp, const CorrelatedPolicy& pi);

}  // namespace kstep
