#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "gwcp/brw.hpp"
#include "gwcp/error.hpp"
#include "gwcp/mc.hpp"
#include "gwcp/serialize.hpp"
#include "gwcp/version.hpp"
#include "gwcp/walk.hpp"

namespace {

using gwcp::Json;

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all hardware threads
  std::string out = "-";
  std::string format;  // resolved per command when empty
};

std::string resolve_format(const GlobalOpts& g, const std::string& fallback,
                           const std::vector<std::string>& allowed) {
  std::string fmt = g.format.empty() ? fallback : g.format;
  for (const auto& a : allowed)
    if (fmt == a) return fmt;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  gwcp::raise(gwcp::Errc::UsageError, "unsupported --format \"" + fmt + "\" (allowed: " + list + ")");
}

int resolved_thread_count(int threads) {
  if (threads > 0) return threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

Json make_meta(const std::string& command, const GlobalOpts& g, const std::string& format,
               Json config) {
  config["seed"] = g.seed;
  config["threads"] = resolved_thread_count(g.threads);
  config["format"] = format;
  config["out"] = g.out;
  return Json{{"tool", "gwcp"},
              {"version", gwcp::kVersion},
              {"command", command},
              {"seed", g.seed},
              {"config", config}};
}

void write_output(const GlobalOpts& g, const std::string& content) {
  if (g.out == "-" || g.out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) gwcp::raise(gwcp::Errc::IoError, "cannot open " + g.out + " for writing");
  out << content;
  if (!out) gwcp::raise(gwcp::Errc::IoError, "short write to " + g.out);
}

void emit_json(const GlobalOpts& g, Json meta, Json result) {
  Json doc{{"meta", std::move(meta)}, {"result", std::move(result)}};
  write_output(g, doc.dump(2) + "\n");
}

// CSV and table files start with one '#'-prefixed metadata line; everything
// after it is the body, which is byte-identical across thread counts.
void emit_with_header(const GlobalOpts& g, const Json& meta, const std::string& body) {
  write_output(g, "# " + meta.dump() + "\n" + body);
}

gwcp::TreeMode parse_tree_mode(const std::string& mode) {
  if (mode == "agw") return gwcp::TreeMode::AGW;
  if (mode == "gw") return gwcp::TreeMode::GW;
  gwcp::raise(gwcp::Errc::UsageError, "unknown --tree-mode \"" + mode + "\" (allowed: agw, gw)");
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string dist;
};

void cmd_bounds(const GlobalOpts& g, const BoundsArgs& a) {
  const std::string fmt = resolve_format(g, "json", {"json"});
  auto law = gwcp::dist_from_json_file(a.dist);
  auto report = gwcp::bound_report(law);
  emit_json(g, make_meta("bounds", g, fmt, Json{{"dist", a.dist}}),
            gwcp::bound_report_to_json(report));
}

struct CertifyArgs {
  int h_min = 4;
  double nu = 0.0, r = 0.0, b = 0.0;
  double c = -1.0;  // negative = auto (b*r)
  double eps = 1e-4;
  long full_nv = 10'000;
};

void cmd_certify(const GlobalOpts& g, const CertifyArgs& a) {
  const std::string fmt = resolve_format(g, "json", {"json"});
  gwcp::Certificate cert;
  cert.h_min = a.h_min;
  cert.nu = a.nu;
  cert.r = a.r;
  cert.b = a.b;
  cert.c = a.c < 0.0 ? a.b * a.r : a.c;
  cert.eps = a.eps;
  auto check = gwcp::check_certificate(cert);
  Json result{{"certificate", gwcp::certificate_to_json(cert)},
              {"feasible", check.feasible},
              {"lhs1", check.lhs1},
              {"lhs2", check.lhs2},
              {"slack1", check.slack1},
              {"slack2", check.slack2}};
  if (a.full_nv > 0) {
    const bool ok = gwcp::check_certificate_full(cert, static_cast<int>(a.full_nv));
    result["full_check"] = Json{{"n_v_max", a.full_nv}, {"passed", ok}};
  }
  Json config{{"hmin", a.h_min}, {"nu", a.nu},   {"r", a.r},
              {"b", a.b},        {"c", cert.c},  {"eps", a.eps},
              {"full_nv", a.full_nv}};
  emit_json(g, make_meta("certify", g, fmt, config), result);
}

struct SearchArgs {
  int h_min = 4;
  int grid = 200;
  double eps = 1e-4;
};

void cmd_search_certificate(const GlobalOpts& g, const SearchArgs& a) {
  const std::string fmt = resolve_format(g, "json", {"json"});
  auto cert = gwcp::search_certificate(a.h_min, a.grid, a.eps);
  Json result;
  result["found"] = cert.has_value();
  if (cert) {
    auto check = gwcp::check_certificate(*cert);
    result["certificate"] = gwcp::certificate_to_json(*cert);
    result["slack1"] = check.slack1;
    result["slack2"] = check.slack2;
    result["full_check_nv_10000"] = gwcp::check_certificate_full(*cert, 10'000);
  }
  emit_json(g,
            make_meta("search-certificate", g, fmt,
                      Json{{"hmin", a.h_min}, {"grid", a.grid}, {"eps", a.eps}}),
            result);
}

struct SpectralArgs {
  int h_min = 4;
  bool dp = false;
  int steps = 1000;
};

void cmd_spectral_radius(const GlobalOpts& g, const SpectralArgs& a) {
  const std::string fmt = resolve_format(g, "json", {"json"});
  Json result{{"h_min", a.h_min}, {"formula", gwcp::spectral_radius_formula(a.h_min)}};
  if (a.dp) {
    gwcp::DistanceChain chain{a.h_min};
    result["dp"] = Json{{"steps", a.steps},
                        {"estimate", gwcp::spectral_radius_dp_estimate(chain, a.steps)}};
  }
  emit_json(g,
            make_meta("spectral-radius", g, fmt,
                      Json{{"hmin", a.h_min}, {"dp", a.dp}, {"steps", a.steps}}),
            result);
}

struct SimulateBrwArgs {
  std::string dist;
  double mu = -1.0;
  double geometric_lambda = -1.0;
  std::uint64_t horizon = 100;
  std::uint64_t trials = 1000;
  std::uint64_t pop_cap = 1'000'000;
  std::string tree_mode = "agw";
};

void cmd_simulate_brw(const GlobalOpts& g, const SimulateBrwArgs& a) {
  const std::string fmt = resolve_format(g, "csv", {"csv"});
  const bool has_mu = a.mu > 0.0, has_gl = a.geometric_lambda > 0.0;
  if (has_mu == has_gl)
    gwcp::raise(gwcp::Errc::UsageError, "pass exactly one of --mu or --geometric-lambda");
  const double mean = has_mu ? a.mu : a.geometric_lambda;

  gwcp::TrialPlan plan;
  plan.process = gwcp::Process::Brw;
  plan.tree_law = gwcp::dist_from_json_file(a.dist);
  plan.tree_mode = parse_tree_mode(a.tree_mode);
  plan.reproduction = gwcp::OffspringDistribution::geometric_from_rate(mean);
  plan.horizon = a.horizon;
  plan.pop_cap = a.pop_cap;
  plan.trials = a.trials;
  plan.seed = g.seed;
  auto rows = gwcp::run_brw_trials(plan, g.threads);

  std::string body = "trial,seed,extinct,capped,generations_survived,root_returns\n";
  for (const auto& r : rows) {
    body += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
            (r.extinct ? "1" : "0") + ',' + (r.capped ? "1" : "0") + ',' +
            std::to_string(r.generations_survived) + ',' + std::to_string(r.root_returns) + '\n';
  }
  Json config{{"dist", a.dist},       {"mu", mean},
              {"horizon", a.horizon}, {"trials", a.trials},
              {"pop_cap", a.pop_cap}, {"tree_mode", a.tree_mode}};
  emit_with_header(g, make_meta("simulate brw", g, fmt, config), body);
}

struct SimulateCpArgs {
  std::string dist;
  double lambda = -1.0;
  std::vector<double> lambdas;
  double t_max = 25.0;
  std::uint64_t trials = 1000;
  std::uint64_t max_infected = 1'000'000;
  std::uint32_t depth_cap = 60;
  std::string tree_mode = "agw";
};

void cmd_simulate_cp(const GlobalOpts& g, const SimulateCpArgs& a) {
  const std::string fmt = resolve_format(g, "csv", {"csv"});
  if (a.lambda <= 0.0 && a.lambdas.empty())
    gwcp::raise(gwcp::Errc::UsageError, "pass --lambda or --lambdas");

  gwcp::TrialPlan plan;
  plan.process = gwcp::Process::Cp;
  plan.tree_law = gwcp::dist_from_json_file(a.dist);
  plan.tree_mode = parse_tree_mode(a.tree_mode);
  plan.lambda = a.lambda;
  plan.lambdas = a.lambdas;
  plan.t_max = a.t_max;
  plan.trials = a.trials;
  plan.seed = g.seed;
  plan.cp_caps = gwcp::CpCaps{a.max_infected, a.depth_cap};
  auto rows = gwcp::run_cp_trials(plan, g.threads);

  std::string body =
      "trial,seed,lambda,died_out,t_end,max_infected,root_reinfections,frontier_exit,"
      "suppressed_births\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    body += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' +
            gwcp::csv_double(s.lambda) + ',' + (s.died_out ? "1" : "0") + ',' +
            gwcp::csv_double(s.t_end) + ',' + std::to_string(s.max_infected) + ',' +
            std::to_string(s.root_reinfections) + ',' + (s.frontier_exit ? "1" : "0") + ',' +
            std::to_string(s.suppressed_births) + '\n';
  }
  Json config{{"dist", a.dist},
              {"lambda", a.lambda},
              {"lambdas", a.lambdas},
              {"t_max", a.t_max},
              {"trials", a.trials},
              {"max_infected", a.max_infected},
              {"depth_cap", a.depth_cap},
              {"tree_mode", a.tree_mode}};
  emit_with_header(g, make_meta("simulate cp", g, fmt, config), body);
}

struct EstimateArgs {
  std::string process;  // cp | brw
  std::string mode;     // global | local
  std::string dist;
  std::vector<double> bracket;
  double tol = 0.1;
  std::uint64_t trials = 1000;
  std::uint64_t horizon = 100;
  double t_max = 25.0;
  std::uint64_t pop_cap = 1'000'000;
  std::uint64_t max_infected = 1'000'000;
  std::uint32_t depth_cap = 60;
  std::string tree_mode = "agw";
  std::string trials_csv;
};

void cmd_estimate_critical(const GlobalOpts& g, const EstimateArgs& a) {
  const std::string fmt = resolve_format(g, "json", {"json"});
  if (a.bracket.size() != 2)
    gwcp::raise(gwcp::Errc::UsageError, "--bracket needs two comma-separated values");
  gwcp::SurvivalMode mode;
  if (a.mode == "global")
    mode = gwcp::SurvivalMode::Global;
  else if (a.mode == "local")
    mode = gwcp::SurvivalMode::Local;
  else
    gwcp::raise(gwcp::Errc::UsageError, "--mode must be global or local");

  gwcp::TrialPlan plan;
  plan.tree_law = gwcp::dist_from_json_file(a.dist);
  plan.tree_mode = parse_tree_mode(a.tree_mode);
  plan.horizon = a.horizon;
  plan.t_max = a.t_max;
  plan.pop_cap = a.pop_cap;
  plan.cp_caps = gwcp::CpCaps{a.max_infected, a.depth_cap};
  plan.seed = g.seed;
  if (a.process == "cp")
    plan.process = gwcp::Process::Cp;
  else if (a.process == "brw")
    plan.process = gwcp::Process::Brw;
  else
    gwcp::raise(gwcp::Errc::UsageError, "--process must be cp or brw");

  std::vector<gwcp::ProbeTrialLog> log;
  auto res = gwcp::bisect_critical(plan, mode, a.bracket[0], a.bracket[1], a.tol, a.trials,
                                   g.threads, 0.02, a.trials_csv.empty() ? nullptr : &log);

  if (!a.trials_csv.empty()) {
    std::ofstream csv(a.trials_csv, std::ios::binary);
    if (!csv) gwcp::raise(gwcp::Errc::IoError, "cannot open " + a.trials_csv + " for writing");
    if (plan.process == gwcp::Process::Cp) {
      csv << "probe_value,trial,seed,died_out,t_end,max_infected,root_reinfections,"
             "frontier_exit,suppressed_births\n";
      for (const auto& probe : log)
        for (const auto& r : probe.cp_rows) {
          const auto& s = r.summary;
          csv << gwcp::csv_double(probe.value) << ',' << r.trial << ',' << r.seed << ','
              << (s.died_out ? 1 : 0) << ',' << gwcp::csv_double(s.t_end) << ','
              << s.max_infected << ',' << s.root_reinfections << ','
              << (s.frontier_exit ? 1 : 0) << ',' << s.suppressed_births << '\n';
        }
    } else {
      csv << "probe_value,trial,seed,extinct,capped,generations_survived,root_returns\n";
      for (const auto& probe : log)
        for (const auto& r : probe.brw_rows)
          csv << gwcp::csv_double(probe.value) << ',' << r.trial << ',' << r.seed << ','
              << (r.extinct ? 1 : 0) << ',' << (r.capped ? 1 : 0) << ','
              << r.generations_survived << ',' << r.root_returns << '\n';
    }
  }

  Json config{{"process", a.process},
              {"mode", a.mode},
              {"dist", a.dist},
              {"bracket", a.bracket},
              {"tol", a.tol},
              {"trials", a.trials},
              {"horizon", a.horizon},
              {"t_max", a.t_max},
              {"pop_cap", a.pop_cap},
              {"max_infected", a.max_infected},
              {"depth_cap", a.depth_cap},
              {"tree_mode", a.tree_mode},
              {"theta", 0.02}};
  emit_json(g, make_meta("estimate-critical", g, fmt, config),
            gwcp::bisect_result_to_json(res));
}

// ---------------------------------------------------------------------------

struct TableRow {
  int h_min;
  double brw_lower;
  double g_simple;
  gwcp::RefinedUpperBound g_refined;
  double l_cert;
  bool weak;
};

void cmd_paper_table(const GlobalOpts& g) {
  const std::string fmt = resolve_format(g, "table", {"table", "json"});
  std::vector<TableRow> rows;
  std::string failures;
  for (int h = 4; h <= 12; ++h) {
    auto report = gwcp::bound_report(gwcp::OffspringDistribution::degenerate(h));
    TableRow row{h,
                 report.lambda_brw_lower,
                 report.lambda_g_upper_simple.value_or(0.0),
                 report.lambda_g_upper_refined,
                 report.lambda_l_lower_cert,
                 report.weak_survival};
    rows.push_back(row);

    auto expect = [&](bool ok, const std::string& what) {
      if (!ok) failures += "  h_min=" + std::to_string(h) + ": " + what + "\n";
    };
    expect(std::abs(row.brw_lower - (h + 1.0) / (2.0 * std::sqrt(double(h)))) <= 1e-12,
           "BRW lower bound mismatch");
    expect(std::abs(row.g_simple - (h + 1.0) / (h - 1.0)) <= 1e-12,
           "simple upper bound mismatch");
    expect(row.weak, "expected a certified weak-survival window");
    if (h == 4) {
      expect(row.g_refined.finite && row.g_refined.bracket_lo > 1.45 &&
                 row.g_refined.lambda < 1.46,
             "refined upper bound outside (1.45, 1.46)");
      expect(row.l_cert >= 1.50, "certified local lower bound below 1.50");
    }
    if (h == 5) {
      expect(row.g_refined.finite && row.g_refined.bracket_lo > 1.34 &&
                 row.g_refined.lambda < 1.35,
             "refined upper bound outside (1.34, 1.35)");
      expect(row.l_cert >= 1.59, "certified local lower bound below 1.59");
    }
  }

  Json config = Json::object();
  Json meta = make_meta("paper-table", g, fmt, config);
  if (fmt == "json") {
    Json jrows = Json::array();
    for (const auto& r : rows)
      jrows.push_back(Json{{"h_min", r.h_min},
                           {"lambda_brw_lower", r.brw_lower},
                           {"lambda_g_upper_simple", r.g_simple},
                           {"lambda_g_upper_refined", gwcp::refined_bound_to_json(r.g_refined)},
                           {"lambda_l_lower_cert", r.l_cert},
                           {"verdict", r.weak ? "WEAK" : "NOT_CERTIFIED"}});
    emit_json(g, std::move(meta),
              Json{{"rows", jrows}, {"self_check", failures.empty() ? "ok" : failures}});
  } else {
    char line[160];
    std::string body =
        "h_min  brw_lower  g_upper_simple  g_upper_refined  l_lower_cert  verdict\n";
    for (const auto& r : rows) {
      std::snprintf(line, sizeof line, "%-5d  %-9.6f  %-14.6f  %-15.6f  %-12.6f  %s\n", r.h_min,
                    r.brw_lower, r.g_simple, r.g_refined.lambda, r.l_cert,
                    r.weak ? "WEAK" : "NOT_CERTIFIED");
      body += line;
    }
    body += failures.empty() ? "self-check: ok\n" : "self-check: FAILED\n" + failures;
    emit_with_header(g, meta, body);
  }
  if (!failures.empty())
    gwcp::raise(gwcp::Errc::SelfCheckFailed, "reference rows failed:\n" + failures);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and certifier for branching random walks and degree-normalized "
               "contact processes on Galton-Watson trees"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("gwcp ") + gwcp::kVersion);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master seed (default 0)");
  app.add_option("--threads", g.threads, "Worker threads; 0 = all (GWCP_THREADS overrides)");
  app.add_option("--out", g.out, "Output path, '-' for stdout");
  app.add_option("--format", g.format, "Output format (per-command default)");

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Certified critical-value bounds for a tree law");
  bounds->add_option("--dist", bounds_args.dist, "Tree-law descriptor (JSON file)")->required();

  CertifyArgs cert_args;
  auto* certify = app.add_subcommand("certify", "Check a local-survival certificate");
  certify->add_option("--hmin", cert_args.h_min)->required();
  certify->add_option("--nu", cert_args.nu)->required();
  certify->add_option("--r", cert_args.r)->required();
  certify->add_option("--b", cert_args.b)->required();
  certify->add_option("--c", cert_args.c, "Defaults to b*r");
  certify->add_option("--eps", cert_args.eps);
  certify->add_option("--full-nv", cert_args.full_nv,
                      "Also verify the four-inequality system up to this child count (0 = skip)");

  SearchArgs search_args;
  auto* search = app.add_subcommand("search-certificate", "Grid search for the best certificate");
  search->add_option("--hmin", search_args.h_min)->required();
  search->add_option("--grid", search_args.grid);
  search->add_option("--eps", search_args.eps);

  SpectralArgs spectral_args;
  auto* spectral = app.add_subcommand("spectral-radius", "Spectral radius of SRW on the tree");
  spectral->add_option("--hmin", spectral_args.h_min)->required();
  spectral->add_flag("--dp", spectral_args.dp, "Also estimate via the distance-chain DP");
  spectral->add_option("--steps", spectral_args.steps);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trial batches");
  simulate->require_subcommand(1);
  simulate->fallthrough();

  SimulateBrwArgs brw_args;
  auto* sim_brw = simulate->add_subcommand("brw", "Branching random walk trials");
  sim_brw->add_option("--dist", brw_args.dist, "Tree-law descriptor (JSON file)")->required();
  sim_brw->add_option("--mu", brw_args.mu, "Geometric reproduction mean");
  sim_brw->add_option("--geometric-lambda", brw_args.geometric_lambda,
                      "Birth rate of the continuous-time model (same law as --mu)");
  sim_brw->add_option("--horizon", brw_args.horizon);
  sim_brw->add_option("--trials", brw_args.trials);
  sim_brw->add_option("--pop-cap", brw_args.pop_cap);
  sim_brw->add_option("--tree-mode", brw_args.tree_mode, "agw or gw");

  SimulateCpArgs cp_args;
  auto* sim_cp = simulate->add_subcommand("cp", "Contact process trials");
  sim_cp->add_option("--dist", cp_args.dist, "Tree-law descriptor (JSON file)")->required();
  sim_cp->add_option("--lambda", cp_args.lambda);
  sim_cp->add_option("--lambdas", cp_args.lambdas, "Coupled ascending rates")->delimiter(',');
  sim_cp->add_option("--t-max", cp_args.t_max);
  sim_cp->add_option("--trials", cp_args.trials);
  sim_cp->add_option("--max-infected", cp_args.max_infected);
  sim_cp->add_option("--depth-cap", cp_args.depth_cap);
  sim_cp->add_option("--tree-mode", cp_args.tree_mode, "agw or gw");

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate-critical", "Bisect an empirical critical value");
  estimate->add_option("--process", est_args.process, "cp or brw")->required();
  estimate->add_option("--mode", est_args.mode, "global or local")->required();
  estimate->add_option("--dist", est_args.dist, "Tree-law descriptor (JSON file)")->required();
  estimate->add_option("--bracket", est_args.bracket, "lo,hi")->required()->delimiter(',');
  estimate->add_option("--tol", est_args.tol);
  estimate->add_option("--trials", est_args.trials, "Trials per probe");
  estimate->add_option("--horizon", est_args.horizon, "BRW horizon");
  estimate->add_option("--t-max", est_args.t_max, "CP horizon");
  estimate->add_option("--pop-cap", est_args.pop_cap);
  estimate->add_option("--max-infected", est_args.max_infected);
  estimate->add_option("--depth-cap", est_args.depth_cap);
  estimate->add_option("--tree-mode", est_args.tree_mode, "agw or gw");
  estimate->add_option("--trials-csv", est_args.trials_csv, "Optional per-trial CSV path");

  auto* table = app.add_subcommand("paper-table", "All certified constants with self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (const char* env = std::getenv("GWCP_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 0)
        gwcp::raise(gwcp::Errc::UsageError, "GWCP_THREADS must be a nonnegative integer");
      g.threads = static_cast<int>(v);
    }

    if (bounds->parsed()) cmd_bounds(g, bounds_args);
    if (certify->parsed()) cmd_certify(g, cert_args);
    if (search->parsed()) cmd_search_certificate(g, search_args);
    if (spectral->parsed()) cmd_spectral_radius(g, spectral_args);
    if (sim_brw->parsed()) cmd_simulate_brw(g, brw_args);
    if (sim_cp->parsed()) cmd_simulate_cp(g, cp_args);
    if (estimate->parsed()) cmd_estimate_critical(g, est_args);
    if (table->parsed()) cmd_paper_table(g);
    return 0;
  } catch (const gwcp::Error& e) {
    std::cerr << "gwcp: " << e.what() << '\n';
    switch (e.code()) {
      case gwcp::Errc::UsageError: return 2;
      case gwcp::Errc::IoError: return 3;
      default: return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "gwcp: " << e.what() << '\n';
    return 1;
  }
}
