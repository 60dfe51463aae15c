#include "kstep/experiments.hpp"
#include "kstep/mdp_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace kstep;

namespace {

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

TabularMdp mdp_from_arrays(const std::vector<Matrix>& transition, const Matrix& cost, double gamma,
                           const Vector& mu, std::optional<double> g_max,
                           std::vector<std::string> state_labels, std::vector<std::string> action_labels) {
  TabularMdp mdp;
  mdp.n_states = static_cast<int>(cost.rows());
  mdp.n_actions = static_cast<int>(cost.cols());
  mdp.transition = transition;
  mdp.cost = cost;
  mdp.gamma = gamma;
  mdp.mu = mu;
  mdp.g_max = g_max ? *g_max : max_abs_cost(mdp);
  mdp.state_labels = std::move(state_labels);
  mdp.action_labels = std::move(action_labels);
  require_valid(mdp);
  return mdp;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "k-step policy gradients over restricted policy classes";

  py::register_exception<UnknownExperiment>(m, "UnknownExperiment", PyExc_KeyError);

  py::class_<TabularMdp, std::shared_ptr<TabularMdp>>(m, "Mdp")
      .def(py::init(&mdp_from_arrays), py::arg("transition"), py::arg("cost"), py::arg("gamma"), py::arg("mu"),
           py::arg("g_max") = py::none(), py::arg("state_labels") = std::vector<std::string>{},
           py::arg("action_labels") = std::vector<std::string>{},
           "transition[a] is the |S|x|S| matrix P(s' | s, a); cost is |S|x|A|.")
      .def_static("from_json", [](const std::string& text) { return mdp_from_json(parse(text)); })
      .def_static("load", &load_mdp)
      .def("to_json", [](const TabularMdp& mdp) { return mdp_to_json(mdp).dump(); })
      .def_readonly("n_states", &TabularMdp::n_states)
      .def_readonly("n_actions", &TabularMdp::n_actions)
      .def_readonly("gamma", &TabularMdp::gamma)
      .def_readonly("g_max", &TabularMdp::g_max)
      .def_readonly("mu", &TabularMdp::mu)
      .def_readonly("cost", &TabularMdp::cost)
      .def_readonly("transition", &TabularMdp::transition)
      .def_property_readonly("state_labels", [](const TabularMdp& mdp) {
        std::vector<std::string> out;
        for (int s = 0; s < mdp.n_states; ++s) out.push_back(mdp.state_label(s));
        return out;
      })
      .def("evaluate", [](const TabularMdp& mdp, const std::vector<int>& pi) {
        return evaluate_policy(mdp, DeterministicPolicy{pi});
      })
      .def("value", [](const TabularMdp& mdp, const std::vector<int>& pi) {
        return policy_value(mdp, DeterministicPolicy{pi});
      })
      .def("q_values", [](const TabularMdp& mdp, const std::vector<int>& pi) {
        return q_values(mdp, DeterministicPolicy{pi});
      })
      .def("occupancy", [](const TabularMdp& mdp, const std::vector<int>& pi) {
        return occupancy(mdp, DeterministicPolicy{pi});
      });

  py::class_<PolicyClass, std::shared_ptr<PolicyClass>>(m, "PolicyClass")
      .def(py::init([](std::vector<std::vector<int>> policies, std::vector<std::string> labels) {
             PolicyClass cls;
             for (auto& p : policies) cls.policies.push_back({std::move(p)});
             cls.labels = std::move(labels);
             return cls;
           }),
           py::arg("policies"), py::arg("labels") = std::vector<std::string>{})
      .def("__len__", &PolicyClass::size)
      .def("__getitem__", [](const PolicyClass& cls, int i) {
        if (i < 0 || i >= cls.size()) throw py::index_error();
        return cls[i].action_of;
      })
      .def("label", &PolicyClass::label)
      .def("index_of", &PolicyClass::index_of)
      .def_property_readonly("labels", [](const PolicyClass& cls) {
        std::vector<std::string> out;
        for (int i = 0; i < cls.size(); ++i) out.push_back(cls.label(i));
        return out;
      });

  m.def("unrestricted_class", [](const TabularMdp& mdp) { return build_unrestricted_class(mdp); });
  m.def("state_aggregation_class", [](const TabularMdp& mdp, const std::vector<int>& obs) {
    return build_state_aggregation_class(mdp, ObservationMap{obs});
  });
  m.def("class_from_config", [](const TabularMdp& mdp, const std::string& spec) {
    return class_from_config(mdp, parse(spec));
  });

  py::class_<KStepEvaluation>(m, "KStepEvaluation")
      .def_readonly("k", &KStepEvaluation::k)
      .def_readonly("weights", &KStepEvaluation::weights)
      .def_readonly("value", &KStepEvaluation::value)
      .def_readonly("occupancy", &KStepEvaluation::occupancy)
      .def_readonly("value_at_mu", &KStepEvaluation::value_at_mu);

  py::class_<AdvantageTable>(m, "AdvantageTable")
      .def_readonly("k", &AdvantageTable::k)
      .def_readonly("policy_labels", &AdvantageTable::policy_labels)
      .def_readonly("state_labels", &AdvantageTable::state_labels)
      .def_readonly("advantage", &AdvantageTable::advantage)
      .def_readonly("weighted", &AdvantageTable::weighted)
      .def_readonly("weighted_kstep", &AdvantageTable::weighted_kstep)
      .def("to_csv", &AdvantageTable::to_csv, py::arg("precision") = 6);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("value_k", &IterationRecord::value_k)
      .def_readonly("expected_value", &IterationRecord::expected_value)
      .def_readonly("gap", &IterationRecord::gap)
      .def_readonly("step_norm", &IterationRecord::step_norm);

  py::class_<DescentTrace>(m, "DescentTrace")
      .def_readonly("k", &DescentTrace::k)
      .def_readonly("beta", &DescentTrace::beta)
      .def_readonly("step_size", &DescentTrace::step_size)
      .def_readonly("final_weights", &DescentTrace::final_weights)
      .def_readonly("records", &DescentTrace::records)
      .def_readonly("monotonicity_violations", &DescentTrace::monotonicity_violations)
      .def_property_readonly("method", [](const DescentTrace& t) { return method_name(t.method); })
      .def("to_csv", &DescentTrace::to_csv, py::arg("precision") = 10);

  py::class_<KStepModel>(m, "KStepModel")
      .def(py::init([](std::shared_ptr<TabularMdp> mdp, std::shared_ptr<PolicyClass> cls, int k) {
             return KStepModel(std::move(mdp), std::move(cls), k);
           }),
           py::arg("mdp"), py::arg("policy_class"), py::arg("k"))
      .def_property_readonly("k", &KStepModel::k)
      .def("__len__", &KStepModel::size)
      .def("evaluate", &KStepModel::evaluate, py::arg("weights"))
      .def("value", &KStepModel::value, py::arg("weights"))
      .def("gradient", [](const KStepModel& model, const Vector& w) { return kstep_gradient(model, w).partials; },
           py::arg("weights"))
      .def("directional_derivative",
           [](const KStepModel& model, const Vector& w, const Vector& target) {
             return directional_derivative(model, w, target);
           },
           py::arg("weights"), py::arg("target"))
      .def("q_all", [](const KStepModel& model, const Vector& w) { return model.q_all(model.evaluate(w)); },
           py::arg("weights"))
      .def("advantage_table",
           [](const KStepModel& model, const Vector& base) { return kstep_advantage_table(model, base); },
           py::arg("base"))
      .def("is_critical",
           [](const KStepModel& model, const Vector& w, bool kstep_weighting) {
             return certify_critical(model, w, kCriticalTolerance,
                                     kstep_weighting ? Weighting::kKStepOccupancy : Weighting::kBaseOccupancy)
                 .certified;
           },
           py::arg("weights"), py::arg("kstep_weighting") = false)
      .def("descend",
           [](const KStepModel& model, const Vector& w0, const std::string& method, int max_iters,
              std::optional<double> step_size, std::uint64_t seed) {
             OptimizerConfig config;
             config.method = parse_method(method);
             config.k = model.k();
             config.max_iters = max_iters;
             config.step_size = step_size;
             config.seed = seed;
             config.keep_vectors = false;
             return descent_run(model, w0, config);
           },
           py::arg("start"), py::arg("method") = "pgd", py::arg("max_iters") = 1000,
           py::arg("step_size") = py::none(), py::arg("seed") = 0);

  m.def("project_to_simplex", &project_to_simplex);

  py::class_<Experiment>(m, "Experiment")
      .def_readonly("name", &Experiment::name)
      .def_readonly("title", &Experiment::title)
      .def_readonly("ks", &Experiment::ks)
      .def_readonly("crit", &Experiment::crit)
      .def_readonly("star", &Experiment::star)
      .def_property_readonly("mdp", [](const Experiment& e) { return std::make_shared<TabularMdp>(*e.mdp); })
      .def_property_readonly("policy_class",
                             [](const Experiment& e) { return std::make_shared<PolicyClass>(*e.cls); })
      .def("k_esc",
           [](const Experiment& e, bool kstep_weighting) {
             return find_k_esc(*e.mdp, dirac(e.cls, e.crit), e.k_esc_search_max, EscapeMode::kTowardBest,
                               kstep_weighting ? Weighting::kKStepOccupancy : Weighting::kBaseOccupancy, e.star);
           },
           py::arg("kstep_weighting") = false)
      .def("measure", [](const Experiment& e, const std::string& table, const std::string& row,
                         const std::string& column) { return measure(e, table, row, column); })
      .def("check_golden", [](const Experiment& e) { return golden_to_json(check_golden(e)).dump(); });

  m.def("experiment_names", &experiment_names);
  m.def("make_experiment", &make_experiment);
  m.def("experiment_from_config", [](const std::string& config, const std::filesystem::path& base_dir) {
    return experiment_from_config(parse(config), base_dir);
  });
  m.def(
      "run_experiment",
      [](const Experiment& e, std::vector<int> ks, const std::filesystem::path& out, std::uint64_t seed,
         int max_iters, int threads) {
        RunConfig config;
        config.ks = std::move(ks);
        config.out = out;
        config.seed = seed;
        config.max_iters = max_iters;
        config.threads = threads;
        py::gil_scoped_release release;
        return run_experiment(e, config).dump();
      },
      py::arg("experiment"), py::arg("ks") = std::vector<int>{}, py::arg("out") = "out", py::arg("seed") = 0,
      py::arg("max_iters") = 1000, py::arg("threads") = 0);
  m.def(
      "verify",
      [](const std::filesystem::path& out, std::uint64_t seed) {
        RunConfig config;
        config.out = out;
        config.seed = seed;
        VerifySummary summary;
        {
          py::gil_scoped_release release;
          summary = verify_all(config);
        }
        return py::make_tuple(summary.pass(), summary.line());
      },
      py::arg("out") = "out", py::arg("seed") = 0);
}
