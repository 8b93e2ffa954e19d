#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gwcp/brw.hpp"
#include "gwcp/error.hpp"
#include "gwcp/mc.hpp"
#include "gwcp/serialize.hpp"
#include "gwcp/version.hpp"
#include "gwcp/walk.hpp"

namespace py = pybind11;
using namespace gwcp;

namespace {

py::object json_to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

OffspringDistribution dist_from_py_map(const py::dict& probs) {
  std::map<int, double> m;
  for (auto item : probs)
    m[py::cast<int>(item.first)] = py::cast<double>(item.second);
  return OffspringDistribution::from_map(m);
}

// One self-contained trial, seeded the same way the batch harness seeds its
// trials (derived tree and process streams).
BrwRunSummary run_brw_trial(const OffspringDistribution& tree_law, TreeMode mode,
                            const OffspringDistribution& reproduction, std::uint64_t horizon,
                            std::uint64_t pop_cap, std::uint64_t seed) {
  TreeStore store(tree_law, mode, derive_stream(seed, 1));
  Rng rng(derive_stream(seed, 2));
  return run_brw(store, reproduction, horizon, pop_cap, rng);
}

CpSummary run_cp_trial(const OffspringDistribution& tree_law, TreeMode mode, double lambda,
                       double t_max, std::uint64_t seed, const CpCaps& caps) {
  TreeStore store(tree_law, mode, derive_stream(seed, 1));
  Rng rng(derive_stream(seed, 2));
  return run_cp(store, lambda, t_max, rng, caps);
}

std::vector<CpSummary> run_cp_coupled_trial(const OffspringDistribution& tree_law, TreeMode mode,
                                            const std::vector<double>& lambdas, double t_max,
                                            std::uint64_t seed, const CpCaps& caps) {
  TreeStore store(tree_law, mode, derive_stream(seed, 1));
  Rng rng(derive_stream(seed, 2));
  return run_cp_coupled(store, lambdas, t_max, rng, caps);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Branching random walks and contact processes on Galton-Watson trees: "
            "simulation and certified critical-value bounds";
  m.attr("__version__") = kVersion;

  py::enum_<TreeMode>(m, "TreeMode")
      .value("GW", TreeMode::GW)
      .value("AGW", TreeMode::AGW);

  py::enum_<Phase>(m, "Phase")
      .value("Subcritical", Phase::Subcritical)
      .value("WeakSurvival", Phase::WeakSurvival)
      .value("StrongSurvival", Phase::StrongSurvival);

  py::enum_<Process>(m, "Process").value("Brw", Process::Brw).value("Cp", Process::Cp);

  py::enum_<SurvivalMode>(m, "SurvivalMode")
      .value("Global", SurvivalMode::Global)
      .value("Local", SurvivalMode::Local);

  py::class_<OffspringDistribution>(m, "OffspringDistribution")
      .def_static("from_map", &dist_from_py_map, py::arg("probs"))
      .def_static("geometric_from_rate", &OffspringDistribution::geometric_from_rate,
                  py::arg("rate"))
      .def_static("degenerate", &OffspringDistribution::degenerate, py::arg("d"))
      .def_property_readonly("h_min", &OffspringDistribution::h_min)
      .def_property_readonly("mean", &OffspringDistribution::mean)
      .def_property_readonly("allows_zero", &OffspringDistribution::allows_zero)
      .def("support", &OffspringDistribution::support)
      .def("probabilities", &OffspringDistribution::probabilities)
      .def("prob_at", &OffspringDistribution::prob_at, py::arg("k"))
      .def("pgf", &OffspringDistribution::pgf, py::arg("s"))
      .def("extinction_probability", &OffspringDistribution::extinction_probability)
      .def(
          "sample",
          [](const OffspringDistribution& d, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            std::vector<int> out(n);
            for (auto& k : out) k = d.sample(rng);
            return out;
          },
          py::arg("n"), py::arg("seed"))
      .def("__repr__", [](const OffspringDistribution& d) {
        return "OffspringDistribution(h_min=" + std::to_string(d.h_min()) +
               ", mean=" + std::to_string(d.mean()) + ")";
      });

  py::class_<TreeStore>(m, "TreeStore")
      .def(py::init<OffspringDistribution, TreeMode, std::uint64_t>(), py::arg("law"),
           py::arg("mode"), py::arg("seed"))
      .def_property_readonly("root", &TreeStore::root)
      .def("children",
           [](TreeStore& t, VertexId v) {
             std::vector<VertexId> out;
             for (VertexId c : t.children(v)) out.push_back(c);
             return out;
           })
      .def("degree", &TreeStore::degree, py::arg("v"))
      .def("depth", &TreeStore::depth, py::arg("v"))
      .def("parent", &TreeStore::parent, py::arg("v"))
      .def("agw_root_attachment", &TreeStore::agw_root_attachment)
      .def("size", &TreeStore::size);

  // spectral radius and the distance-chain DP
  m.def("spectral_radius_formula", &spectral_radius_formula, py::arg("h_min"));
  m.def(
      "return_probability_dp",
      [](int d, int n) { return return_probability_dp(DistanceChain{d}, n); }, py::arg("d"),
      py::arg("n"));
  m.def(
      "spectral_radius_dp_estimate",
      [](int d, int n_max) { return spectral_radius_dp_estimate(DistanceChain{d}, n_max); },
      py::arg("d"), py::arg("n_max"));
  m.def(
      "distance_distribution",
      [](int d, int n) { return distance_distribution(DistanceChain{d}, n); }, py::arg("d"),
      py::arg("n"));

  // branching random walk
  py::class_<BrwRunSummary>(m, "BrwRunSummary")
      .def_readonly("totals", &BrwRunSummary::totals)
      .def_readonly("root_counts", &BrwRunSummary::root_counts)
      .def_readonly("extinct", &BrwRunSummary::extinct)
      .def_readonly("capped", &BrwRunSummary::capped)
      .def_readonly("generations_survived", &BrwRunSummary::generations_survived)
      .def_readonly("root_returns", &BrwRunSummary::root_returns)
      .def_readonly("last_root_generation", &BrwRunSummary::last_root_generation);

  m.def("run_brw", &run_brw_trial, py::arg("tree_law"), py::arg("mode"), py::arg("reproduction"),
        py::arg("horizon"), py::arg("pop_cap") = 1'000'000, py::arg("seed") = 0);
  m.def("brw_phase", &brw_phase, py::arg("h_min"), py::arg("mu"));
  m.def("continuous_brw_reduction", &continuous_brw_reduction, py::arg("rate"));

  // contact process
  py::class_<CpCaps>(m, "CpCaps")
      .def(py::init<>())
      .def(py::init([](std::uint64_t max_infected, std::uint32_t depth_cap) {
             return CpCaps{max_infected, depth_cap};
           }),
           py::arg("max_infected"), py::arg("depth_cap"))
      .def_readwrite("max_infected", &CpCaps::max_infected)
      .def_readwrite("depth_cap", &CpCaps::depth_cap);

  py::class_<CpSummary>(m, "CpSummary")
      .def_readonly("lambda_", &CpSummary::lambda)
      .def_readonly("died_out", &CpSummary::died_out)
      .def_readonly("t_end", &CpSummary::t_end)
      .def_readonly("max_infected", &CpSummary::max_infected)
      .def_readonly("root_reinfections", &CpSummary::root_reinfections)
      .def_readonly("last_root_time", &CpSummary::last_root_time)
      .def_readonly("births", &CpSummary::births)
      .def_readonly("deaths", &CpSummary::deaths)
      .def_readonly("suppressed_births", &CpSummary::suppressed_births)
      .def_readonly("frontier_exits", &CpSummary::frontier_exits)
      .def_readonly("frontier_exit", &CpSummary::frontier_exit)
      .def_readonly("capped", &CpSummary::capped);

  m.def("run_cp", &run_cp_trial, py::arg("tree_law"), py::arg("mode"), py::arg("lambda_"),
        py::arg("t_max"), py::arg("seed") = 0, py::arg("caps") = CpCaps{});
  m.def("run_cp_coupled", &run_cp_coupled_trial, py::arg("tree_law"), py::arg("mode"),
        py::arg("lambdas"), py::arg("t_max"), py::arg("seed") = 0, py::arg("caps") = CpCaps{});

  // certified bounds
  py::class_<Certificate>(m, "Certificate")
      .def(py::init([](double nu, double r, double b, double c, double eps, int h_min) {
             return Certificate{nu, r, b, c < 0.0 ? b * r : c, eps, h_min};
           }),
           py::arg("nu"), py::arg("r"), py::arg("b"), py::arg("c") = -1.0,
           py::arg("eps") = 1e-4, py::arg("h_min") = 4)
      .def_readwrite("nu", &Certificate::nu)
      .def_readwrite("r", &Certificate::r)
      .def_readwrite("b", &Certificate::b)
      .def_readwrite("c", &Certificate::c)
      .def_readwrite("eps", &Certificate::eps)
      .def_readwrite("h_min", &Certificate::h_min)
      .def_property_readonly("lambda_", &Certificate::lambda)
      .def("as_dict", [](const Certificate& c) { return json_to_py(certificate_to_json(c)); });

  py::class_<CertificateCheck>(m, "CertificateCheck")
      .def_readonly("feasible", &CertificateCheck::feasible)
      .def_readonly("lhs1", &CertificateCheck::lhs1)
      .def_readonly("lhs2", &CertificateCheck::lhs2)
      .def_readonly("slack1", &CertificateCheck::slack1)
      .def_readonly("slack2", &CertificateCheck::slack2);

  py::class_<RefinedUpperBound>(m, "RefinedUpperBound")
      .def_readonly("finite", &RefinedUpperBound::finite)
      .def_readonly("lambda_", &RefinedUpperBound::lambda)
      .def_readonly("bracket_lo", &RefinedUpperBound::bracket_lo)
      .def_readonly("bracket_hi", &RefinedUpperBound::bracket_hi);

  py::class_<BlockExpectation>(m, "BlockExpectation")
      .def_readonly("i_factor", &BlockExpectation::i_factor)
      .def_readonly("ii_factor", &BlockExpectation::ii_factor)
      .def_readonly("n", &BlockExpectation::n)
      .def_readonly("value", &BlockExpectation::value)
      .def_readonly("min_n_supercritical", &BlockExpectation::min_n_supercritical);

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("h_min", &BoundReport::h_min)
      .def_readonly("lambda_brw_lower", &BoundReport::lambda_brw_lower)
      .def_readonly("lambda_g_upper_simple", &BoundReport::lambda_g_upper_simple)
      .def_readonly("lambda_g_upper_refined", &BoundReport::lambda_g_upper_refined)
      .def_readonly("certificate", &BoundReport::certificate)
      .def_readonly("lambda_l_lower_cert", &BoundReport::lambda_l_lower_cert)
      .def_readonly("lambda_g_upper", &BoundReport::lambda_g_upper)
      .def_readonly("lambda_l_lower", &BoundReport::lambda_l_lower)
      .def_readonly("weak_survival", &BoundReport::weak_survival)
      .def("as_dict", [](const BoundReport& r) { return json_to_py(bound_report_to_json(r)); });

  m.def("f_hmin", &f_hmin, py::arg("x"), py::arg("lambda_"), py::arg("h_min"));
  m.def("check_certificate", &check_certificate, py::arg("certificate"));
  m.def("check_certificate_full", &check_certificate_full, py::arg("certificate"),
        py::arg("n_v_max"));
  m.def("search_certificate", &search_certificate, py::arg("h_min"),
        py::arg("grid_resolution") = 200, py::arg("eps") = 1e-4, py::arg("c_over_br") = 1.0);
  m.def("lambda_g_upper_refined", &lambda_g_upper_refined, py::arg("tree_law"));
  m.def("lambda_g_upper_simple", &lambda_g_upper_simple, py::arg("h_min"));
  m.def("lambda_l_lower_brw", &lambda_l_lower_brw, py::arg("h_min"));
  m.def("block_expectation", &block_expectation, py::arg("tree_law"), py::arg("lambda_"),
        py::arg("n"));
  m.def("bound_report", &bound_report, py::arg("tree_law"));

  // Monte Carlo harness
  py::class_<TrialPlan>(m, "TrialPlan")
      .def(py::init<>())
      .def_readwrite("process", &TrialPlan::process)
      .def_readwrite("tree_law", &TrialPlan::tree_law)
      .def_readwrite("tree_mode", &TrialPlan::tree_mode)
      .def_readwrite("reproduction", &TrialPlan::reproduction)
      .def_readwrite("horizon", &TrialPlan::horizon)
      .def_readwrite("pop_cap", &TrialPlan::pop_cap)
      .def_readwrite("lambda_", &TrialPlan::lambda)
      .def_readwrite("lambdas", &TrialPlan::lambdas)
      .def_readwrite("t_max", &TrialPlan::t_max)
      .def_readwrite("cp_caps", &TrialPlan::cp_caps)
      .def_readwrite("trials", &TrialPlan::trials)
      .def_readwrite("seed", &TrialPlan::seed);

  py::class_<SurvivalEstimate>(m, "SurvivalEstimate")
      .def_readonly("p_hat", &SurvivalEstimate::p_hat)
      .def_readonly("ci_low", &SurvivalEstimate::ci_low)
      .def_readonly("ci_high", &SurvivalEstimate::ci_high)
      .def_readonly("n_trials", &SurvivalEstimate::n_trials)
      .def_readonly("successes", &SurvivalEstimate::successes)
      .def_readonly("proxy", &SurvivalEstimate::proxy);

  py::class_<ProbeResult>(m, "ProbeResult")
      .def_readonly("value", &ProbeResult::value)
      .def_readonly("estimate", &ProbeResult::estimate);

  py::class_<BisectResult>(m, "BisectResult")
      .def_readonly("low", &BisectResult::low)
      .def_readonly("high", &BisectResult::high)
      .def_readonly("probes", &BisectResult::probes);

  m.def(
      "wilson95",
      [](std::uint64_t successes, std::uint64_t n) {
        auto w = wilson95(successes, n);
        return py::make_tuple(w.low, w.high);
      },
      py::arg("successes"), py::arg("n"));
  m.def("estimate_survival", &estimate_survival, py::arg("plan"), py::arg("mode"),
        py::arg("threads") = 0);
  m.def(
      "bisect_critical",
      [](const TrialPlan& plan, SurvivalMode mode, double lo, double hi, double tol,
         std::uint64_t trials_per_probe, int threads, double theta) {
        return bisect_critical(plan, mode, lo, hi, tol, trials_per_probe, threads, theta);
      },
      py::arg("plan"), py::arg("mode"), py::arg("lo"), py::arg("hi"), py::arg("tol"),
      py::arg("trials_per_probe"), py::arg("threads") = 0, py::arg("theta") = 0.02);
}
