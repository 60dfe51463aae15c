#pragma once

#include "kstep/mdp.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace kstep {

// Document layout: {n_states, n_actions, transition[s][a][s'], cost[s][a], gamma, mu,
// g_max?, state_labels?, action_labels?}. A missing g_max defaults to max |g|.
TabularMdp mdp_from_json(const nlohmann::json& doc);
nlohmann::json mdp_to_json(const TabularMdp& mdp);

TabularMdp load_mdp(const std::filesystem::path& path);
void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);

}  // namespace kstep
