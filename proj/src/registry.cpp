#include "kstep/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace kstep {

namespace {

constexpr double kTol = 1e-3;
// Numbers printed with two decimals can only be matched to half a unit in the last place.
constexpr double kTwoDecimalTol = 5e-3;

struct GoldenBuilder {
  std::vector<GoldenCell>& cells;

  void eq(const std::string& table, const std::string& row, const std::string& col, double v,
          double tol = kTol) {
    cells.push_back({table, row, col, v, tol, Check::kEqual});
  }
  void at_least(const std::string& table, const std::string& row, const std::string& col, double v) {
    cells.push_back({table, row, col, v, 0.0, Check::kAtLeast});
  }
  void at_most(const std::string& table, const std::string& row, const std::string& col, double v) {
    cells.push_back({table, row, col, v, 0.0, Check::kAtMost});
  }
  void below(const std::string& table, const std::string& row, const std::string& col, double v) {
    cells.push_back({table, row, col, v, 0.0, Check::kBelow});
  }
  template <std::size_t N>
  void row(const std::string& table, const std::string& row, const std::array<std::string, N>& cols,
           const std::array<double, N>& values) {
    for (std::size_t i = 0; i < N; ++i) eq(table, row, cols[i], values[i]);
  }
};

std::shared_ptr<const PolicyClass> share(PolicyClass cls) {
  return std::make_shared<const PolicyClass>(std::move(cls));
}

int require_index(const PolicyClass& cls, const std::string& label) {
  auto idx = cls.index_of(label);
  if (!idx) throw std::logic_error(fmt::format("policy '{}' missing from class", label));
  return *idx;
}

// Relabels each component of an enumerated label through `names`.
void rename_components(PolicyClass& cls, const std::map<std::string, std::string>& names) {
  for (auto& label : cls.labels) {
    std::string out;
    std::size_t start = 0;
    while (true) {
      const auto comma = label.find(',', start);
      const auto part = label.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const auto it = names.find(part);
      out += (out.empty() ? "" : ",") + (it == names.end() ? part : it->second);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    label = "(" + out + ")";
  }
}

void move_labels(PolicyClass& cls) {
  for (auto& label : cls.labels) {
    for (auto& c : label) c = c == '0' ? 'L' : c == '1' ? 'S' : c == '2' ? 'R' : c;
  }
}

std::vector<std::string> move_action_labels() { return {"-1", "0", "+1"}; }

}  // namespace

Experiment make_two_state() {
  Experiment exp;
  exp.name = "two_state";
  exp.title = "Two-state running example";
  const double cost[2][2] = {{1.0, 2.0}, {2.0, 0.0}};
  Vector mu(2);
  mu << 0.6, 0.4;
  auto mdp = make_deterministic_mdp(
      2, 2, [](int, int a) { return a; }, [&](int s, int a) { return cost[s][a]; }, 0.8, mu);
  mdp.state_labels = {"sL", "sR"};
  mdp.action_labels = {"L", "R"};
  auto cls = build_state_aggregation_class(mdp, ObservationMap{{0, 0}});
  cls.labels = {"pi_L", "pi_R"};
  exp.crit = require_index(cls, "pi_L");
  exp.star = require_index(cls, "pi_R");
  exp.mdp = std::make_shared<const TabularMdp>(std::move(mdp));
  exp.cls = share(std::move(cls));
  exp.ks = {1, 2, 3, 100};

  GoldenBuilder g{exp.golden};
  // reference: running example, policy-gradient coefficients near theta = 0
  g.eq("grad_coef", "sL", "coef", 4.6);
  g.eq("grad_coef", "sR", "coef", 0.4);
  // reference: running example value curve, minima at both ends and a maximum near 0.32
  g.eq("sweep", "k=1", "interior_max_theta", 0.32, 0.02);
  g.eq("sweep", "k=1", "start_is_min", 1.0, 0.0);
  g.eq("sweep", "k=1", "end_is_min", 1.0, 0.0);
  // reference: simulation of the running example, theta = 0 stops being a minimum at k = 3
  g.eq("sweep", "k=3", "stationary_points", 0.0, 0.0);
  g.below("sweep", "k=3", "forward_difference", 0.0);
  g.eq("k_esc", "toward_best", "k", 3.0, 0.0);
  // reference: simulation of the running example, the k = 100 curve is affine
  g.at_most("sweep", "k=100", "chord_deviation", 2.0 * std::pow(0.8, 100) * 2.0 / 0.2);
  return exp;
}

Experiment make_number_matching() {
  Experiment exp;
  exp.name = "number_matching";
  exp.title = "Number matching with independent agents";
  FactoredSpace space{{2, 2}, {2, 2}, {}};
  Vector mu(4);
  mu << 0.05, 0.37, 0.37, 0.21;
  auto mdp = make_deterministic_mdp(
      4, 4, [](int, int a) { return a; },
      [&](int s, int a) {
        const auto st = space.state_tuple(s);
        const auto at = space.action_tuple(a);
        double c = a == 0 ? -3.0 : a == 3 ? -10.0 : 0.0;
        for (int i = 0; i < 2; ++i) c += st[static_cast<std::size_t>(i)] != at[static_cast<std::size_t>(i)] ? 5.0 : 0.0;
        return c;
      },
      0.9, mu);
  mdp.state_labels = {"(0,0)", "(0,1)", "(1,0)", "(1,1)"};
  mdp.action_labels = mdp.state_labels;
  auto cls = build_independent_agents_class(mdp, space);
  rename_components(cls, {{"00", "a0"}, {"01", "st"}, {"10", "fl"}, {"11", "a1"}});
  exp.crit = require_index(cls, "(a0,a0)");
  exp.star = require_index(cls, "(a1,a1)");
  exp.mdp = std::make_shared<const TabularMdp>(std::move(mdp));
  exp.cls = share(std::move(cls));
  exp.ks = {1, 2, 3, 4, 5, 10, 25};

  GoldenBuilder g{exp.golden};
  const std::array<std::string, 5> cols{"(0,0)", "(0,1)", "(1,0)", "(1,1)", "weighted"};
  const std::array<std::string, 4> states{"(0,0)", "(0,1)", "(1,0)", "(1,1)"};
  // reference: number matching, values of the critical and optimal policies
  g.eq("values", "J_crit", "mu", -24.2);
  g.eq("values", "J_star", "mu", -95.8);
  g.eq("values", "J_best", "mu", -95.8);
  const std::array<double, 4> j_crit{-30, -25, -25, -20};
  for (std::size_t i = 0; i < 4; ++i) g.eq("J_crit", states[i], "J", j_crit[i]);
  // reference: number matching, discounted occupancy of the critical policy
  const std::array<double, 4> occ{0.905, 0.037, 0.037, 0.021};
  for (std::size_t i = 0; i < 4; ++i) g.eq("occupancy", states[i], "d", occ[i]);
  // reference: number matching, table of one-step advantages at the critical policy
  g.row("advantage_k1", "(a0,a0)", cols, {0.000, 0.000, 0.000, 0.000, +0.0000});
  g.row("advantage_k1", "(a0,a1)", cols, {+12.500, +2.500, +12.500, +2.500, +11.9200});
  g.row("advantage_k1", "(a0,fl)", cols, {+12.500, 0.000, +12.500, 0.000, +11.7750});
  g.row("advantage_k1", "(a0,st)", cols, {0.000, +2.500, 0.000, +2.500, +0.1450});
  g.row("advantage_k1", "(a1,a0)", cols, {+12.500, +12.500, +2.500, +2.500, +11.9200});
  g.row("advantage_k1", "(a1,a1)", cols, {+12.000, +2.000, +2.000, -8.000, +10.8400});
  g.row("advantage_k1", "(a1,fl)", cols, {+12.000, +12.500, +2.000, +2.500, +11.4490});
  g.row("advantage_k1", "(a1,st)", cols, {+12.500, +2.000, +2.500, -8.000, +11.3110});
  g.row("advantage_k1", "(fl,a0)", cols, {+12.500, +12.500, 0.000, 0.000, +11.7750});
  g.row("advantage_k1", "(fl,a1)", cols, {+12.000, +2.000, +12.500, +2.500, +11.4490});
  g.row("advantage_k1", "(fl,fl)", cols, {+12.000, +12.500, +12.500, 0.000, +11.7850});
  g.row("advantage_k1", "(fl,st)", cols, {+12.500, +2.000, 0.000, +2.500, +11.4390});
  g.row("advantage_k1", "(st,a0)", cols, {0.000, 0.000, +2.500, +2.500, +0.1450});
  g.row("advantage_k1", "(st,a1)", cols, {+12.500, +2.500, +2.000, -8.000, +11.3110});
  g.row("advantage_k1", "(st,fl)", cols, {+12.500, 0.000, +2.000, +2.500, +11.4390});
  g.row("advantage_k1", "(st,st)", cols, {0.000, +2.500, +2.500, -8.000, +0.0170});
  g.at_least("advantage_min", "weighted_k1", "min", -1e-9);
  // reference: number matching, k-step advantages of the optimal policy
  g.row("kstar", "k=1", cols, {+12.0000, +2.0000, +2.0000, -8.0000, +10.8400});
  g.row("kstar", "k=2", cols, {+4.8000, -5.2000, -5.2000, -15.2000, +3.6400});
  g.row("kstar", "k=3", cols, {-1.6800, -11.6800, -11.6800, -21.6800, -2.8400});
  g.row("kstar", "k=4", cols, {-7.5120, -17.5120, -17.5120, -27.5120, -8.6720});
  g.row("kstar", "k=5", cols, {-12.7608, -22.7608, -22.7608, -32.7608, -13.9208});
  g.row("kstar", "k=10", cols, {-32.1057, -42.1057, -42.1057, -52.1057, -33.2657});
  g.row("kstar", "k=25", cols, {-54.2568, -64.2568, -64.2568, -74.2568, -55.4168});
  g.eq("k_esc", "toward_best", "k", 3.0, 0.0);
  return exp;
}

Experiment make_button_press() {
  Experiment exp;
  exp.name = "button_press";
  exp.title = "Button press with decentralized agents";
  // Left agent at positions 1..3, right agent at 5..7; local moves -1, 0, +1.
  // Moves that would be clamped into "stay" are not admissible.
  FactoredSpace space{{3, 3}, {3, 3}, {{{1, 2}, {0, 1, 2}, {0, 1}}, {{1, 2}, {0, 1, 2}, {0, 1}}}};
  auto position = [](int agent, int local) { return agent == 0 ? local + 1 : local + 5; };
  auto next = [&](int s, int a) {
    const auto st = space.state_tuple(s);
    const auto at = space.action_tuple(a);
    std::vector<int> out(2);
    for (std::size_t i = 0; i < 2; ++i) out[i] = std::clamp(st[i] + at[i] - 1, 0, 2);
    return space.joint_state(out);
  };
  const int center = space.joint_state({2, 0});
  const int corner = space.joint_state({0, 2});
  auto mdp = make_deterministic_mdp(
      9, 9, next,
      [&](int s, int a) {
        const bool stay = next(s, a) == s;
        if (s == center) return stay ? -5.0 : 25.0;
        if (s == corner) return stay ? -18.0 : 12.0;
        return 0.0;
      },
      0.9, Vector::Constant(9, 1.0 / 9.0));
  for (int s = 0; s < 9; ++s) {
    const auto st = space.state_tuple(s);
    mdp.state_labels.push_back(fmt::format("({},{})", position(0, st[0]), position(1, st[1])));
  }
  for (int a = 0; a < 9; ++a) {
    const auto at = space.action_tuple(a);
    mdp.action_labels.push_back(fmt::format("({:+d},{:+d})", at[0] - 1, at[1] - 1));
  }

  // Each agent sees only its own position, except at the mutually visible center.
  std::vector<ObservationMap> obs(2);
  for (int s = 0; s < 9; ++s) {
    const auto st = space.state_tuple(s);
    for (std::size_t i = 0; i < 2; ++i) obs[i].obs_of.push_back(s == center ? 3 : st[i]);
  }
  auto cls = build_decentralized_class(mdp, space, obs);
  // Relabel as target positions: L(pos1,pos2,pos3;visible) R(pos5,pos6,pos7;visible).
  for (int i = 0; i < cls.size(); ++i) {
    const auto& pi = cls[i];
    std::array<std::array<int, 4>, 2> target{};
    for (int s = 0; s < 9; ++s) {
      const auto st = space.state_tuple(s);
      const auto at = space.action_tuple(pi(s));
      for (std::size_t agent = 0; agent < 2; ++agent) {
        const auto o = static_cast<std::size_t>(obs[agent].obs_of[static_cast<std::size_t>(s)]);
        target[agent][o] = position(static_cast<int>(agent), st[agent] + at[agent] - 1);
      }
    }
    cls.labels[static_cast<std::size_t>(i)] =
        fmt::format("L({},{},{};{})R({},{},{};{})", target[0][0], target[0][1], target[0][2],
                    target[0][3], target[1][0], target[1][1], target[1][2], target[1][3]);
  }
  exp.crit = require_index(cls, "L(2,3,3;3)R(5,5,6;5)");
  exp.star = require_index(cls, "L(1,1,2;2)R(6,7,7;6)");
  exp.mdp = std::make_shared<const TabularMdp>(std::move(mdp));
  exp.cls = share(std::move(cls));
  exp.ks = {1, 2, 3, 4, 5, 6, 7, 8};

  GoldenBuilder g{exp.golden};
  const std::array<std::string, 10> cols{"(1,5)", "(1,6)", "(1,7)", "(2,5)", "(2,6)",
                                         "(2,7)", "(3,5)", "(3,6)", "(3,7)", "weighted"};
  // reference: button press, values of the critical and optimal policies
  g.eq("values", "J_crit", "mu", -41.72, kTwoDecimalTol);
  g.eq("values", "J_star", "mu", -152.22, kTwoDecimalTol);
  g.eq("values", "J_best", "mu", -152.22, kTwoDecimalTol);
  // reference: button press, discounted occupancy of the critical policy
  g.eq("occupancy", "(3,5)", "d", 0.861);
  g.eq("occupancy", "(2,5)", "d", 0.031);
  g.eq("occupancy", "(3,6)", "d", 0.031);
  g.eq("occupancy", "(2,6)", "d", 0.021);
  for (const char* s : {"(1,5)", "(1,6)", "(1,7)", "(2,7)", "(3,7)"}) g.eq("occupancy", s, "d", 0.011);
  // reference: button press, every one of the 576 weighted one-step advantages is nonnegative
  g.at_least("advantage_min", "weighted_k1", "min", -1e-9);
  // reference: button press, k-step advantages of the optimal policy
  g.row("kstar", "k=1", cols, {+4.050, +14.850, -15.150, +8.550, +19.350, +14.850, +34.500, +8.550, +4.050, +30.9005});
  g.row("kstar", "k=2", cols, {+17.415, +1.215, -28.785, +21.915, +5.715, +1.215, +51.915, +21.915, +17.415, +46.2830});
  g.row("kstar", "k=3", cols, {+5.143, -11.057, -41.057, +9.643, -6.557, -11.057, +39.643, +9.643, +5.143, +34.0115});
  g.row("kstar", "k=4", cols, {-5.901, -22.101, -52.101, -1.401, -17.601, -22.101, +28.599, -1.401, -5.901, +22.9672});
  g.row("kstar", "k=5", cols, {-15.841, -32.041, -62.041, -11.341, -27.541, -32.041, +18.659, -11.341, -15.841, +13.0272});
  g.row("kstar", "k=6", cols, {-24.787, -40.987, -70.987, -20.287, -36.487, -40.987, +9.713, -20.287, -24.787, +4.0813});
  g.row("kstar", "k=7", cols, {-32.838, -49.038, -79.038, -28.338, -44.538, -49.038, +1.662, -28.338, -32.838, -3.9700});
  g.row("kstar", "k=8", cols, {-40.084, -56.284, -86.284, -35.584, -51.784, -56.284, -5.584, -35.584, -40.084, -11.2162});
  g.eq("k_esc", "toward_best", "k", 7.0, 0.0);
  return exp;
}

Experiment make_moat_cross() {
  Experiment exp;
  exp.name = "moat_cross";
  exp.title = "Fully observable moat cross";
  const std::array<double, 7> state_cost{-1, 0, 0, 0, 3, 3, -20};
  Vector mu = Vector::Zero(7);
  mu(3) = 1.0;
  auto mdp = make_deterministic_mdp(
      7, 3, [](int s, int a) { return std::clamp(s + a - 1, 0, 6); },
      [&](int s, int) { return state_cost[static_cast<std::size_t>(s)]; }, 0.9, mu);
  for (int s = 1; s <= 7; ++s) mdp.state_labels.push_back(std::to_string(s));
  mdp.action_labels = move_action_labels();
  auto cls = build_unrestricted_class(mdp);
  move_labels(cls);
  exp.crit = require_index(cls, "LLLLLLL");
  exp.star = require_index(cls, "RRRRRRR");
  exp.mdp = std::make_shared<const TabularMdp>(std::move(mdp));
  exp.cls = share(std::move(cls));
  exp.ks = {1, 2, 3, 4, 5, 6, 7, 10};

  GoldenBuilder g{exp.golden};
  // reference: moat cross, values from state 4
  g.eq("values", "J_crit", "mu", -7.29, kTwoDecimalTol);
  g.eq("values", "J_star", "mu", -140.67, kTwoDecimalTol);
  g.eq("values", "J_best", "mu", -140.67, kTwoDecimalTol);
  g.eq("J_crit", "5", "J", -3.56, kTwoDecimalTol);
  // reference: moat cross, discounted occupancy of the critical policy
  const std::array<double, 7> occ{0.729, 0.081, 0.090, 0.100, 0.0, 0.0, 0.0};
  for (int s = 0; s < 7; ++s) g.eq("occupancy", std::to_string(s + 1), "d", occ[static_cast<std::size_t>(s)]);
  // reference: moat cross, one-step Q and advantage table of the critical policy
  const std::array<double, 4> j{-10.00, -9.00, -8.10, -7.29};
  const std::array<std::array<double, 3>, 4> q{{{-10.000, -10.000, -9.100},
                                                {-9.000, -8.100, -7.290},
                                                {-8.100, -7.290, -6.561},
                                                {-7.290, -6.561, -3.205}}};
  const std::array<std::array<double, 3>, 4> a{{{0.000, 0.000, +0.900},
                                                {0.000, +0.900, +1.710},
                                                {0.000, +0.810, +1.539},
                                                {0.000, +0.729, +4.085}}};
  const auto actions = move_action_labels();
  for (std::size_t s = 0; s < 4; ++s) {
    const auto label = std::to_string(s + 1);
    g.eq("J_crit", label, "J", j[s], kTwoDecimalTol);
    for (std::size_t act = 0; act < 3; ++act) {
      g.eq("q_k1", label, actions[act], q[s][act]);
      g.eq("a_k1", label, actions[act], a[s][act]);
    }
  }
  // reference: moat cross, k-step advantages of the optimal policy
  const std::array<std::string, 5> cols{"1", "2", "3", "4", "weighted"};
  g.row("kstar", "k=1", cols, {+0.900, +1.710, +1.539, +4.085, +1.342});
  g.row("kstar", "k=2", cols, {+2.439, +3.095, +5.216, +9.824, +3.481});
  g.row("kstar", "k=3", cols, {+3.686, +6.404, +10.381, -2.294, +3.910});
  g.row("kstar", "k=4", cols, {+6.664, +11.053, -0.526, -15.403, +4.165});
  g.row("kstar", "k=5", cols, {+10.847, +1.237, -12.324, -27.201, +4.179});
  g.row("kstar", "k=6", cols, {+2.013, -9.381, -22.942, -37.819, -5.139});
  g.row("kstar", "k=7", cols, {-7.543, -18.937, -32.498, -47.375, -14.695});
  g.row("kstar", "k=10", cols, {-30.851, -42.245, -55.805, -70.682, -38.003});
  g.eq("k_esc", "toward_best", "k", 6.0, 0.0);
  return exp;
}

Experiment make_two_path() {
  Experiment exp;
  exp.name = "two_path";
  exp.title = "Fully observable two path navigation";
  // Column x in 1..3, row y in 1..5; index (x - 1) * 5 + (y - 1).
  auto index = [](int x, int y) { return (x - 1) * 5 + (y - 1); };
  std::map<std::pair<int, int>, double> special{{{1, 3}, -2}, {{1, 5}, -5}, {{3, 3}, -15},
                                                {{3, 5}, -20}, {{3, 2}, 1}};
  Vector mu = Vector::Zero(15);
  mu(index(2, 1)) = 1.0;
  auto mdp = make_deterministic_mdp(
      15, 3,
      [&](int s, int a) {
        const int x = s / 5 + 1;
        const int y = s % 5 + 1;
        return index(std::clamp(x + a - 1, 1, 3), std::min(y + 1, 5));
      },
      [&](int s, int) {
        const int x = s / 5 + 1;
        const int y = s % 5 + 1;
        if (x == 2 && y >= 2) return 10.0;
        const auto it = special.find({x, y});
        return it == special.end() ? 0.0 : it->second;
      },
      0.9, mu);
  for (int x = 1; x <= 3; ++x) {
    for (int y = 1; y <= 5; ++y) mdp.state_labels.push_back(fmt::format("({},{})", x, y));
  }
  mdp.action_labels = move_action_labels();
  // Row aggregation: the action may depend on the row only.
  ObservationMap rows;
  for (int s = 0; s < 15; ++s) rows.obs_of.push_back(s % 5);
  auto cls = build_state_aggregation_class(mdp, rows);
  move_labels(cls);
  exp.crit = require_index(cls, "LLLLL");
  exp.star = require_index(cls, "RRRRR");
  exp.mdp = std::make_shared<const TabularMdp>(std::move(mdp));
  exp.cls = share(std::move(cls));
  exp.ks = {1, 2, 3, 4, 5, 10};

  GoldenBuilder g{exp.golden};
  // reference: two path, values from (2,1)
  g.eq("values", "J_crit", "mu", -34.43, kTwoDecimalTol);
  g.eq("values", "J_star", "mu", -142.47, kTwoDecimalTol);
  g.eq("values", "J_best", "mu", -142.47, kTwoDecimalTol);
  // reference: two path, discounted occupancy of the critical policy
  g.eq("occupancy", "(2,1)", "d", 0.100);
  g.eq("occupancy", "(1,2)", "d", 0.090);
  g.eq("occupancy", "(1,3)", "d", 0.081);
  g.eq("occupancy", "(1,4)", "d", 0.073);
  g.eq("occupancy", "(1,5)", "d", 0.656);
  for (const char* s : {"(2,2)", "(3,2)", "(3,3)", "(3,5)"}) g.eq("occupancy", s, "d", 0.0);
  // reference: two path, one-step Q and advantage table of the critical policy
  const std::array<std::string, 5> support{"(2,1)", "(1,2)", "(1,3)", "(1,4)", "(1,5)"};
  const std::array<double, 5> j{-34.425, -38.250, -42.500, -45.000, -50.000};
  const std::array<std::array<double, 3>, 5> q{{{-34.425, -25.425, -23.805},
                                                {-38.250, -38.250, -27.450},
                                                {-42.500, -42.500, -33.500},
                                                {-45.000, -45.000, -31.500},
                                                {-50.000, -50.000, -36.500}}};
  const std::array<std::array<double, 3>, 5> a{{{0.000, +9.000, +10.620},
                                                {0.000, 0.000, +10.800},
                                                {0.000, 0.000, +9.000},
                                                {0.000, 0.000, +13.500},
                                                {0.000, 0.000, +13.500}}};
  const auto actions = move_action_labels();
  for (std::size_t s = 0; s < support.size(); ++s) {
    g.eq("J_crit", support[s], "J", j[s]);
    for (std::size_t act = 0; act < 3; ++act) {
      g.eq("q_k1", support[s], actions[act], q[s][act]);
      g.eq("a_k1", support[s], actions[act], a[s][act]);
    }
  }
  // reference: two path, k-step advantages of the optimal policy
  const std::array<std::string, 6> cols{"(1,2)", "(1,3)", "(1,4)", "(1,5)", "(2,1)", "weighted"};
  g.row("kstar", "k=1", cols, {+10.800, +9.000, +13.500, +13.500, +10.620, +12.605});
  g.row("kstar", "k=2", cols, {+21.735, +7.785, +12.285, +12.285, -2.340, +11.309});
  g.row("kstar", "k=3", cols, {+9.706, -4.244, +0.256, +0.256, +0.212, +0.738});
  g.row("kstar", "k=4", cols, {-1.119, -15.069, -10.569, -10.569, -10.614, -10.088});
  g.row("kstar", "k=5", cols, {-10.862, -24.812, -20.312, -20.312, -20.357, -19.831});
  g.row("kstar", "k=10", cols, {-46.771, -60.721, -56.221, -56.221, -56.266, -55.740});
  g.eq("k_esc", "toward_best", "k", 4.0, 0.0);
  return exp;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"two_state", "number_matching", "button_press",
                                              "moat_cross", "two_path"};
  return names;
}

bool is_experiment(const std::string& name) {
  const auto& names = experiment_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Experiment make_experiment(const std::string& name) {
  if (name == "two_state") return make_two_state();
  if (name == "number_matching") return make_number_matching();
  if (name == "button_press") return make_button_press();
  if (name == "moat_cross") return make_moat_cross();
  if (name == "two_path") return make_two_path();
  throw UnknownExperiment(fmt::format("unknown experiment '{}'", name));
}

}  // namespace kstep
