// contagion: interbank contagion experiments from the command line.
//
// Subcommands: critical-degree, tree, simulate, mf-predict, sweep, hist.
// Every run writes run_summary.json into --out-dir so artifacts can be
// reproduced bit-for-bit from the recorded config and seed.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contagion/analytics.hpp"
#include "contagion/balance.hpp"
#include "contagion/clearing.hpp"
#include "contagion/degree_dist.hpp"
#include "contagion/ensemble.hpp"
#include "contagion/manifest.hpp"
#include "contagion/netgen.hpp"
#include "contagion/network.hpp"

namespace {

using contagion::FinancialParams;

constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

// "50%" -> "0.5"; plain decimals pass through untouched
std::string percent_to_decimal(std::string& s) {
  if (s.empty() || s.back() != '%') return {};
  try {
    const double v = std::stod(s.substr(0, s.size() - 1));
    std::ostringstream o;
    o << std::setprecision(17) << v / 100.0;
    s = o.str();
  } catch (const std::exception&) {
    return "invalid percentage: " + s;
  }
  return {};
}

void add_param_flags(CLI::App* cmd, FinancialParams& p) {
  const CLI::Validator percent(percent_to_decimal, "", "percent-or-ratio");
  cmd->add_option("--R", p.external_rate, "external gross return R")
      ->capture_default_str();
  cmd->add_option("--r", p.interbank_rate, "interbank gross rate r")
      ->capture_default_str();
  cmd->add_option("--f", p.liquidity_ratio, "liquidity ratio f (0.5 or 50%)")
      ->transform(percent)
      ->capture_default_str();
  cmd->add_option("--lambda", p.leverage_ratio, "leverage ratio (0.03 or 3%)")
      ->transform(percent)
      ->capture_default_str();
  cmd->add_option("--shocked-R", p.shocked_rate,
                  "gross return applied to the shocked bank")
      ->capture_default_str();
}

nlohmann::json params_json(const FinancialParams& p) {
  return {{"R", p.external_rate},
          {"r", p.interbank_rate},
          {"f", p.liquidity_ratio},
          {"lambda", p.leverage_ratio},
          {"shocked_R", p.shocked_rate}};
}

std::string artifact_path(const std::string& out_dir, const std::string& name) {
  if (out_dir.empty() || out_dir == ".") return name;
  return out_dir + "/" + name;
}

void write_run_summary(const std::string& out_dir, const std::string& subcommand,
                       const nlohmann::json& config, std::uint64_t seed,
                       std::vector<std::string> artifacts,
                       std::chrono::steady_clock::time_point t0) {
  contagion::RunManifest manifest;
  manifest.subcommand = subcommand;
  manifest.config_json = config.dump();
  manifest.master_seed = seed;
  manifest.artifacts = std::move(artifacts);
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  contagion::write_manifest(manifest, artifact_path(out_dir, "run_summary.json"));
}

std::ofstream open_artifact(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// "2:20:2" -> {2,4,...,20}; "2,4,8" -> {2,4,8}; "8" -> {8}
std::vector<double> parse_z_list(const std::string& text) {
  std::vector<double> zs;
  const auto add = [&zs](const std::string& tok) {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad mean degree: " + tok);
    zs.push_back(v);
  };
  if (text.find(':') != std::string::npos) {
    std::istringstream in(text);
    std::string a, b, c;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') ||
        !std::getline(in, c))
      throw std::invalid_argument("range needs start:stop:step");
    const double start = std::stod(a), stop = std::stod(b), step = std::stod(c);
    if (step <= 0.0) throw std::invalid_argument("range step must be positive");
    for (double z = start; z <= stop + 1e-9; z += step) zs.push_back(z);
  } else {
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) add(tok);
  }
  if (zs.empty()) throw std::invalid_argument("no mean degrees given");
  return zs;
}

std::string format_z(double z) {
  std::ostringstream o;
  o << z;
  return o.str();
}

// one record per line: id liquid illiquid senior R_i
void apply_sheet_overrides(const std::string& path,
                           std::vector<contagion::BalanceSheet>& sheets,
                           Eigen::VectorXd& rates) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read sheet overrides: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    int id;
    double liquid, illiquid, senior, rate;
    if (!(row >> id >> liquid >> illiquid >> senior >> rate))
      throw std::runtime_error("bad sheet override line: " + line);
    if (id < 0 || id >= static_cast<int>(sheets.size()))
      throw std::runtime_error("sheet override for unknown bank " +
                               std::to_string(id));
    sheets[id].liquid = liquid;
    sheets[id].illiquid = illiquid;
    sheets[id].senior = senior;
    // identity fixes net worth once the funding side is pinned
    sheets[id].net_worth = sheets[id].assets() - sheets[id].liabilities();
    rates(id) = rate;
  }
}

struct GenFlags {
  std::string family = "er";
  int n = 200;
  double z = 8.0;
  int m = 0;           // BA attachment count; 0 means z/2
  int k = 4;           // cayley degree
  int depth = 3;       // cayley depth
  std::uint64_t seed = 12345;
  bool directed = false;
  double recip_prob = 1.0;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g, bool with_cayley) {
  cmd->add_option("--family", g.family,
                  with_cayley ? "network family: er, ba, cayley"
                              : "network family: er, ba")
      ->capture_default_str();
  cmd->add_option("--n", g.n, "number of banks")->capture_default_str();
  cmd->add_option("--seed", g.seed, "master RNG seed")
      ->envname("CONTAGION_SEED")
      ->capture_default_str();
  cmd->add_flag("--directed", g.directed, "directed loans");
  cmd->add_option("--recip-prob", g.recip_prob,
                  "directed BA reciprocal-loan probability")
      ->capture_default_str();
  if (with_cayley) {
    cmd->add_option("--k", g.k, "cayley degree")->capture_default_str();
    cmd->add_option("--depth", g.depth, "cayley depth")->capture_default_str();
  }
  cmd->add_option("--m", g.m, "BA attachment count (default z/2)")
      ->capture_default_str();
}

contagion::NetworkGraph build_from_flags(const GenFlags& g, double z) {
  const contagion::NetworkFamily family = contagion::family_from_string(g.family);
  switch (family) {
    case contagion::NetworkFamily::er:
      return contagion::gen_er(g.n, z, g.seed, g.directed);
    case contagion::NetworkFamily::ba: {
      const int m = g.m > 0 ? g.m : static_cast<int>(std::lround(z / 2.0));
      return contagion::gen_ba(g.n, m, g.seed, g.directed, g.recip_prob);
    }
    case contagion::NetworkFamily::cayley:
      return contagion::gen_cayley_tree(g.k, g.depth);
  }
  throw std::logic_error("unknown family");
}

int run_critical_degree(const FinancialParams& params, const std::string& grid,
                        int grid_steps, const std::string& out_dir,
                        std::chrono::steady_clock::time_point t0) {
  std::vector<std::string> artifacts;
  nlohmann::json config = params_json(params);
  config["grid"] = grid;

  if (grid.empty()) {
    const contagion::CriticalDegrees stars = contagion::critical_degrees(params);
    std::cout << std::setprecision(12) << "k1_star=" << stars.k1_star;
    if (stars.k2_star)
      std::cout << " k2_star=" << *stars.k2_star << "\n";
    else
      std::cout << " k2_star=nan\n";
  } else {
    if (grid != "f-lambda" && grid != "R-r")
      throw std::invalid_argument("grid must be f-lambda or R-r");
    if (grid_steps < 2) throw std::invalid_argument("grid needs >= 2 steps");
    config["grid_steps"] = grid_steps;
    const std::string path = artifact_path(out_dir, "critical_degree_grid.csv");
    std::ofstream out = open_artifact(path);
    out << "# contagion critical-degree grid v1\n";
    out << "f,lambda,R,r,k1_star,k2_star\n";
    out << std::setprecision(12);
    for (int i = 0; i < grid_steps; ++i) {
      for (int j = 0; j < grid_steps; ++j) {
        FinancialParams p = params;
        if (grid == "f-lambda") {
          p.liquidity_ratio = 0.45 + (0.90 - 0.45) * i / (grid_steps - 1);
          p.leverage_ratio = 0.20 * j / (grid_steps - 1);
        } else {
          p.external_rate = 1.005 + (1.10 - 1.005) * i / (grid_steps - 1);
          p.interbank_rate = 1.001 + (1.05 - 1.001) * j / (grid_steps - 1);
        }
        const contagion::CriticalDegrees stars = contagion::critical_degrees(p);
        out << p.liquidity_ratio << ',' << p.leverage_ratio << ','
            << p.external_rate << ',' << p.interbank_rate << ','
            << stars.k1_star << ',';
        if (stars.k2_star)
          out << *stars.k2_star;
        else
          out << "nan";
        out << '\n';
      }
    }
    artifacts.push_back(path);
    std::cout << "wrote " << path << "\n";
  }
  write_run_summary(out_dir, "critical-degree", config, 0, artifacts, t0);
  return 0;
}

int run_tree(int k, int max_depth, const FinancialParams& params,
             const std::string& out_dir, std::chrono::steady_clock::time_point t0) {
  const contagion::CayleyShellSolution sol =
      contagion::solve_cayley_shells(k, params, max_depth);
  std::cout << "# shell repayments, x capped at r*k = "
            << std::setprecision(12) << params.interbank_rate * k << "\n";
  std::cout << "d,x_d\n";
  for (Eigen::Index d = 0; d < sol.shell_repayments.size(); ++d)
    std::cout << d << ',' << sol.shell_repayments(d) << '\n';
  std::cout << "q=" << sol.defaulting_shells << " F=" << sol.failures << "\n";

  nlohmann::json config = params_json(params);
  config["k"] = k;
  config["max_depth"] = max_depth;
  write_run_summary(out_dir, "tree", config, 0, {}, t0);
  return 0;
}

int run_simulate(const GenFlags& gen, const std::string& input,
                 const std::string& sheets_path, const std::string& save_graph,
                 int shock, bool no_shock, int max_iterations,
                 const FinancialParams& params, const std::string& out_dir,
                 std::chrono::steady_clock::time_point t0) {
  contagion::NetworkGraph g = input.empty()
                                  ? build_from_flags(gen, gen.z)
                                  : contagion::read_edge_list_file(input);
  contagion::validate(g);

  std::vector<std::string> artifacts;
  if (!save_graph.empty()) {
    contagion::write_edge_list_file(g, save_graph);
    artifacts.push_back(save_graph);
  }

  std::optional<int> shocked;
  if (!no_shock) {
    if (shock < 0 || shock >= g.node_count)
      throw std::invalid_argument("shocked bank out of range");
    shocked = shock;
  }

  std::vector<contagion::BalanceSheet> sheets = contagion::build_sheets(g, params);
  Eigen::VectorXd rates =
      Eigen::VectorXd::Constant(g.node_count, params.external_rate);
  if (!sheets_path.empty()) apply_sheet_overrides(sheets_path, sheets, rates);
  if (shocked) rates(*shocked) = params.shocked_rate;

  const contagion::ClearingSystem sys = contagion::build_clearing_system(
      g, sheets, params.interbank_rate, rates, shocked);
  contagion::ClearingOptions opts;
  opts.max_iterations = max_iterations;
  const contagion::ClearingResult result = contagion::solve_repayments(sys, opts);

  const Eigen::VectorXi degree = contagion::degrees(g);
  const std::string path = artifact_path(out_dir, "clearing.csv");
  std::ofstream out = open_artifact(path);
  out << "# contagion simulate v1\n";
  out << "bank_id,degree,x,K_prime,status\n";
  out << std::setprecision(12);
  for (int i = 0; i < g.node_count; ++i)
    out << i << ',' << degree(i) << ',' << result.repayments(i) << ','
        << result.net_worths(i) << ',' << contagion::to_string(result.statuses[i])
        << '\n';
  out << "# F=" << result.induced_failures << " iterations=" << result.iterations
      << " residual=" << result.residual << '\n';
  artifacts.push_back(path);

  std::cout << "F=" << result.induced_failures
            << " iterations=" << result.iterations << " residual="
            << std::setprecision(12) << result.residual << "\n";

  nlohmann::json config = params_json(params);
  config["family"] = input.empty() ? gen.family : "file";
  config["input"] = input;
  config["sheets"] = sheets_path;
  config["n"] = g.node_count;
  config["z"] = gen.z;
  config["seed"] = gen.seed;
  config["shock"] = no_shock ? nlohmann::json() : nlohmann::json(shock);
  config["max_iterations"] = max_iterations;
  write_run_summary(out_dir, "simulate", config, gen.seed, artifacts, t0);
  return 0;
}

int run_mf_predict(const std::string& family, double z, int m, int f_max,
                   int k_max, const FinancialParams& params,
                   const std::string& out_dir,
                   std::chrono::steady_clock::time_point t0) {
  contagion::DegreeDistribution dist;
  if (family == "er") {
    dist = contagion::poisson_degree_distribution(z, k_max > 0 ? k_max : -1);
  } else if (family == "ba") {
    const int mm = m > 0 ? m : static_cast<int>(std::lround(z / 2.0));
    dist = contagion::ba_degree_distribution(mm, k_max > 0 ? k_max : 1000);
  } else {
    throw std::invalid_argument("mf-predict supports families er and ba");
  }

  const double k1 = contagion::critical_degree_1(params);
  const Eigen::VectorXd q = contagion::q_subcritical(dist, k1);
  const contagion::FailureDistribution pf =
      contagion::failures_dist_mf(dist, q, f_max);
  const double f_mean = contagion::mean_failures_mf(dist, q);

  const std::string path = artifact_path(out_dir, "mf_predict.csv");
  std::ofstream out = open_artifact(path);
  out << std::setprecision(12);
  out << "# contagion mf-predict v1 (k1_star=" << k1 << ", F_mean_mf=" << f_mean
      << ")\n";
  out << "F,p_mf\n";
  for (Eigen::Index f = 0; f < pf.mass.size(); ++f)
    out << f << ',' << pf.mass(f) << '\n';

  std::cout << std::setprecision(12) << "k1_star=" << k1
            << " F_mean_mf=" << f_mean << "\n";

  nlohmann::json config = params_json(params);
  config["family"] = family;
  config["z"] = z;
  config["m"] = m;
  config["f_max"] = f_max;
  config["k_max"] = k_max;
  write_run_summary(out_dir, "mf-predict", config, 0, {path}, t0);
  return 0;
}

contagion::ExperimentConfig ensemble_config(const GenFlags& gen,
                                            const std::vector<double>& zs,
                                            int replicates,
                                            const std::string& shock_rule,
                                            int fixed_node, int threads,
                                            const FinancialParams& params) {
  contagion::ExperimentConfig cfg;
  cfg.family = contagion::family_from_string(gen.family);
  cfg.n = gen.n;
  cfg.z_values = zs;
  cfg.replicates = replicates;
  cfg.params = params;
  cfg.master_seed = gen.seed;
  cfg.directed = gen.directed;
  cfg.recip_prob = gen.recip_prob;
  cfg.threads = threads;
  cfg.fixed_shock_node = fixed_node;
  if (shock_rule == "uniform-random")
    cfg.shock_rule = contagion::ShockRule::uniform_random;
  else if (shock_rule == "fixed-node")
    cfg.shock_rule = contagion::ShockRule::fixed_node;
  else if (shock_rule == "degree-weighted")
    cfg.shock_rule = contagion::ShockRule::degree_weighted;
  else
    throw std::invalid_argument("unknown shock rule: " + shock_rule);
  return cfg;
}

nlohmann::json ensemble_json(const contagion::ExperimentConfig& cfg) {
  nlohmann::json j = params_json(cfg.params);
  j["family"] = contagion::to_string(cfg.family);
  j["n"] = cfg.n;
  j["z_values"] = cfg.z_values;
  j["replicates"] = cfg.replicates;
  j["master_seed"] = cfg.master_seed;
  j["directed"] = cfg.directed;
  j["recip_prob"] = cfg.recip_prob;
  j["threads"] = cfg.threads;
  return j;
}

int run_sweep(const contagion::ExperimentConfig& cfg, const std::string& out_dir,
              std::chrono::steady_clock::time_point t0) {
  const contagion::EnsembleResult result = contagion::run_ensemble(cfg);
  const std::vector<contagion::SweepRow> rows = contagion::sweep_z(result);

  const std::string path = artifact_path(out_dir, "sweep.csv");
  std::ofstream out = open_artifact(path);
  contagion::write_sweep_csv(rows, out);
  contagion::write_sweep_csv(rows, std::cout);

  int exclusions = 0;
  for (const contagion::ZSummary& zs : result.per_z) exclusions += zs.exclusions;
  if (exclusions > 0)
    std::cerr << "warning: " << exclusions << " non-converged replicates excluded\n";

  write_run_summary(out_dir, "sweep", ensemble_json(cfg), cfg.master_seed, {path},
                    t0);
  return 0;
}

int run_hist(const contagion::ExperimentConfig& cfg, int f_max,
             const std::string& out_dir, std::chrono::steady_clock::time_point t0) {
  const contagion::EnsembleResult result = contagion::run_ensemble(cfg);
  const contagion::ZSummary& zs = result.per_z.front();

  const contagion::DegreeDistribution dist =
      cfg.family == contagion::NetworkFamily::er
          ? contagion::poisson_degree_distribution(
                zs.z, cfg.analytic_k_max > 0 ? cfg.analytic_k_max : -1)
          : contagion::ba_degree_distribution(
                static_cast<int>(std::lround(zs.z / 2.0)),
                cfg.analytic_k_max > 0 ? cfg.analytic_k_max : 1000);
  const contagion::FailureDistribution mf = contagion::failures_dist_mf(
      dist, zs.k1_star, static_cast<int>(zs.histogram.size()) - 2);

  const std::string path =
      artifact_path(out_dir, "hist_z" + format_z(zs.z) + ".csv");
  std::ofstream out = open_artifact(path);
  contagion::write_hist_csv(zs, mf, out);

  std::cout << std::setprecision(12) << "z=" << zs.z
            << " F_mean_emp=" << zs.failures_mean
            << " F_mean_mf=" << zs.failures_mean_mf
            << " exclusions=" << zs.exclusions << "\n";
  (void)f_max;

  write_run_summary(out_dir, "hist", ensemble_json(cfg), cfg.master_seed, {path},
                    t0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();

  CLI::App app{"interbank contagion simulator"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read flags from an INI-style config file");

  std::string out_dir = ".";
  app.add_option("--out-dir", out_dir, "directory for artifacts")
      ->capture_default_str();

  // critical-degree
  FinancialParams cd_params;
  std::string cd_grid;
  int cd_steps = 20;
  CLI::App* cd = app.add_subcommand("critical-degree",
                                    "closed-form critical degrees k1*, k2*");
  add_param_flags(cd, cd_params);
  cd->add_option("--grid", cd_grid, "emit a CSV over a grid: f-lambda or R-r");
  cd->add_option("--grid-steps", cd_steps, "grid resolution per axis")
      ->capture_default_str();

  // tree
  FinancialParams tree_params;
  int tree_k = 4, tree_depth = 30;
  CLI::App* tree = app.add_subcommand("tree", "exact Cayley shell solution");
  add_param_flags(tree, tree_params);
  tree->add_option("--k", tree_k, "tree degree")->capture_default_str();
  tree->add_option("--depth", tree_depth, "maximum defaulting depth")
      ->capture_default_str();

  // simulate
  FinancialParams sim_params;
  GenFlags sim_gen;
  std::string sim_input, sim_sheets, sim_save_graph;
  int sim_shock = 0;
  int sim_max_iter = contagion::ClearingOptions{}.max_iterations;
  bool sim_no_shock = false;
  CLI::App* sim = app.add_subcommand("simulate", "clear one network under a shock");
  add_param_flags(sim, sim_params);
  add_gen_flags(sim, sim_gen, /*with_cayley=*/true);
  sim->add_option("--z", sim_gen.z, "ER mean degree")->capture_default_str();
  sim->add_option("--input", sim_input, "edge-list file instead of a generator");
  sim->add_option("--sheets", sim_sheets,
                  "per-bank overrides: lines `id liquid illiquid senior R_i`");
  sim->add_option("--save-graph", sim_save_graph, "write the generated edge list");
  sim->add_option("--shock", sim_shock, "shocked bank id")->capture_default_str();
  sim->add_flag("--no-shock", sim_no_shock, "run without any shocked bank");
  sim->add_option("--max-iterations", sim_max_iter, "solver iteration budget")
      ->capture_default_str();

  // mf-predict
  FinancialParams mf_params;
  std::string mf_family = "er";
  double mf_z = 8.0;
  int mf_m = 0, mf_fmax = 100, mf_kmax = 0;
  CLI::App* mf = app.add_subcommand("mf-predict",
                                    "mean-field failure predictions");
  add_param_flags(mf, mf_params);
  mf->add_option("--family", mf_family, "er or ba")->capture_default_str();
  mf->add_option("--z", mf_z, "mean degree")->capture_default_str();
  mf->add_option("--m", mf_m, "BA attachment count (default z/2)")
      ->capture_default_str();
  mf->add_option("--f-max", mf_fmax, "largest failure count reported")
      ->capture_default_str();
  mf->add_option("--k-max", mf_kmax, "degree truncation override")
      ->capture_default_str();

  // sweep
  FinancialParams sweep_params;
  GenFlags sweep_gen;
  std::string sweep_z = "2:20:2", sweep_rule = "uniform-random";
  int sweep_reps = 1000, sweep_threads = 0, sweep_fixed = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "ensemble sweep over mean degrees");
  add_param_flags(sweep, sweep_params);
  add_gen_flags(sweep, sweep_gen, /*with_cayley=*/false);
  sweep->add_option("--z", sweep_z, "mean degrees: start:stop:step or a,b,c")
      ->capture_default_str();
  sweep->add_option("--replicates", sweep_reps, "networks per mean degree")
      ->capture_default_str();
  sweep->add_option("--shock-rule", sweep_rule,
                    "uniform-random, fixed-node or degree-weighted")
      ->capture_default_str();
  sweep->add_option("--fixed-shock-node", sweep_fixed,
                    "bank id for --shock-rule fixed-node")
      ->capture_default_str();
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = all cores)")
      ->capture_default_str();

  // hist
  FinancialParams hist_params;
  GenFlags hist_gen;
  std::string hist_rule = "uniform-random";
  double hist_z = 8.0;
  int hist_reps = 1000, hist_threads = 0, hist_fixed = 0, hist_fmax = 100;
  CLI::App* hist = app.add_subcommand("hist", "failures histogram at one mean degree");
  add_param_flags(hist, hist_params);
  add_gen_flags(hist, hist_gen, /*with_cayley=*/false);
  hist->add_option("--z", hist_z, "mean degree")->capture_default_str();
  hist->add_option("--replicates", hist_reps, "ensemble size")
      ->capture_default_str();
  hist->add_option("--shock-rule", hist_rule,
                   "uniform-random, fixed-node or degree-weighted")
      ->capture_default_str();
  hist->add_option("--fixed-shock-node", hist_fixed,
                   "bank id for --shock-rule fixed-node")
      ->capture_default_str();
  hist->add_option("--threads", hist_threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  hist->add_option("--f-max", hist_fmax, "largest failure count reported")
      ->capture_default_str();

  // global flags like --out-dir may be given after the subcommand name
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (out_dir != "." && !out_dir.empty())
      std::filesystem::create_directories(out_dir);
    const auto pick_threads = [](int requested) {
      if (requested > 0) return requested;
      const unsigned hw = std::thread::hardware_concurrency();
      return hw > 0 ? static_cast<int>(hw) : 1;
    };
    if (cd->parsed())
      return run_critical_degree(cd_params, cd_grid, cd_steps, out_dir, t0);
    if (tree->parsed())
      return run_tree(tree_k, tree_depth, tree_params, out_dir, t0);
    if (sim->parsed())
      return run_simulate(sim_gen, sim_input, sim_sheets, sim_save_graph,
                          sim_shock, sim_no_shock, sim_max_iter, sim_params,
                          out_dir, t0);
    if (mf->parsed())
      return run_mf_predict(mf_family, mf_z, mf_m, mf_fmax, mf_kmax, mf_params,
                            out_dir, t0);
    if (sweep->parsed())
      return run_sweep(
          ensemble_config(sweep_gen, parse_z_list(sweep_z), sweep_reps, sweep_rule,
                          sweep_fixed, pick_threads(sweep_threads), sweep_params),
          out_dir, t0);
    if (hist->parsed())
      return run_hist(ensemble_config(hist_gen, {hist_z}, hist_reps, hist_rule,
                                      hist_fixed, pick_threads(hist_threads),
                                      hist_params),
                      hist_fmax, out_dir, t0);
  } catch (const contagion::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
