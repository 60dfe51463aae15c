#include "kstep/mdp_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace kstep {

namespace {

const nlohmann::json& field(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw std::invalid_argument(fmt::format("MDP document is missing '{}'", key));
  return *it;
}

void expect_size(const nlohmann::json& arr, std::size_t n, const std::string& what) {
  if (!arr.is_array() || arr.size() != n) {
    throw std::invalid_argument(fmt::format("{} must be an array of length {}", what, n));
  }
}

}  // namespace

TabularMdp mdp_from_json(const nlohmann::json& doc) {
  TabularMdp mdp;
  mdp.n_states = field(doc, "n_states").get<int>();
  mdp.n_actions = field(doc, "n_actions").get<int>();
  if (mdp.n_states <= 0 || mdp.n_actions <= 0) {
    throw std::invalid_argument("n_states and n_actions must be positive");
  }
  const auto ns = static_cast<std::size_t>(mdp.n_states);
  const auto na = static_cast<std::size_t>(mdp.n_actions);

  const auto& p = field(doc, "transition");
  expect_size(p, ns, "transition");
  mdp.transition.assign(na, Matrix::Zero(mdp.n_states, mdp.n_states));
  for (std::size_t s = 0; s < ns; ++s) {
    expect_size(p[s], na, fmt::format("transition[{}]", s));
    for (std::size_t a = 0; a < na; ++a) {
      expect_size(p[s][a], ns, fmt::format("transition[{}][{}]", s, a));
      for (std::size_t next = 0; next < ns; ++next) {
        mdp.transition[a](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(next)) =
            p[s][a][next].get<double>();
      }
    }
  }

  const auto& g = field(doc, "cost");
  expect_size(g, ns, "cost");
  mdp.cost.resize(mdp.n_states, mdp.n_actions);
  for (std::size_t s = 0; s < ns; ++s) {
    expect_size(g[s], na, fmt::format("cost[{}]", s));
    for (std::size_t a = 0; a < na; ++a) {
      mdp.cost(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) = g[s][a].get<double>();
    }
  }

  mdp.gamma = field(doc, "gamma").get<double>();
  const auto mu = field(doc, "mu").get<std::vector<double>>();
  mdp.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  mdp.g_max = doc.contains("g_max") ? doc["g_max"].get<double>() : max_abs_cost(mdp);
  if (doc.contains("state_labels")) mdp.state_labels = doc["state_labels"].get<std::vector<std::string>>();
  if (doc.contains("action_labels")) {
    mdp.action_labels = doc["action_labels"].get<std::vector<std::string>>();
  }
  require_valid(mdp);
  return mdp;
}

nlohmann::json mdp_to_json(const TabularMdp& mdp) {
  nlohmann::json doc;
  doc["n_states"] = mdp.n_states;
  doc["n_actions"] = mdp.n_actions;
  auto p = nlohmann::json::array();
  auto g = nlohmann::json::array();
  for (int s = 0; s < mdp.n_states; ++s) {
    auto rows = nlohmann::json::array();
    auto costs = nlohmann::json::array();
    for (int a = 0; a < mdp.n_actions; ++a) {
      std::vector<double> row(static_cast<std::size_t>(mdp.n_states));
      for (int next = 0; next < mdp.n_states; ++next) row[static_cast<std::size_t>(next)] = mdp.p(s, a, next);
      rows.push_back(row);
      costs.push_back(mdp.cost(s, a));
    }
    p.push_back(std::move(rows));
    g.push_back(std::move(costs));
  }
  doc["transition"] = std::move(p);
  doc["cost"] = std::move(g);
  doc["gamma"] = mdp.gamma;
  doc["mu"] = std::vector<double>(mdp.mu.data(), mdp.mu.data() + mdp.mu.size());
  doc["g_max"] = mdp.g_max;
  if (!mdp.state_labels.empty()) doc["state_labels"] = mdp.state_labels;
  if (!mdp.action_labels.empty()) doc["action_labels"] = mdp.action_labels;
  return doc;
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  return mdp_from_json(nlohmann::json::parse(in));
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << mdp_to_json(mdp).dump(2) << '\n';
}

}  // namespace kstep
