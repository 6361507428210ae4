#include "contagion/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "contagion/clearing.hpp"
#include "contagion/netgen.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {

// separates the shock-selection stream from the graph stream of a replicate
constexpr std::uint64_t kShockStreamTag = 0x7368'6f63'6b21'5aa5ULL;

int ba_attachment(double z) {
  const int m = static_cast<int>(std::lround(z / 2.0));
  if (m < 1 || std::abs(z - 2.0 * m) > 1e-9)
    throw std::domain_error("BA family needs an even integer mean degree z = 2m");
  return m;
}

int cayley_depth_for(int k, int n) {
  if (cayley_node_count(k, 1) > n)
    throw std::domain_error("node budget too small for a cayley tree of this degree");
  int depth = 1;
  while (cayley_node_count(k, depth + 1) <= n) ++depth;
  return depth;
}

NetworkGraph make_graph(const ExperimentConfig& cfg, double z, std::uint64_t seed) {
  switch (cfg.family) {
    case NetworkFamily::er:
      return gen_er(cfg.n, z, seed, cfg.directed);
    case NetworkFamily::ba:
      return gen_ba(cfg.n, ba_attachment(z), seed, cfg.directed, cfg.recip_prob);
    case NetworkFamily::cayley: {
      const int k = static_cast<int>(std::lround(z));
      return gen_cayley_tree(k, cayley_depth_for(k, cfg.n));
    }
  }
  throw std::logic_error("unknown network family");
}

int pick_shocked(const ExperimentConfig& cfg, const NetworkGraph& g,
                 const Eigen::VectorXi& degree, Rng& rng) {
  switch (cfg.shock_rule) {
    case ShockRule::fixed_node:
      return cfg.fixed_shock_node;
    case ShockRule::degree_weighted: {
      std::int64_t total = 0;
      for (int i = 0; i < g.node_count; ++i) total += degree(i);
      if (total == 0) return static_cast<int>(rng.uniform_index(g.node_count));
      std::int64_t pos =
          static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(total)));
      for (int i = 0; i < g.node_count; ++i) {
        pos -= degree(i);
        if (pos < 0) return i;
      }
      return g.node_count - 1;
    }
    case ShockRule::uniform_random:
    default: {
      // uniform over banks that have at least one counterparty; an isolated
      // shocked bank cannot propagate anything
      int connected = 0;
      for (int i = 0; i < g.node_count; ++i)
        if (degree(i) > 0) ++connected;
      if (connected == 0) return static_cast<int>(rng.uniform_index(g.node_count));
      std::int64_t pos =
          static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(connected)));
      for (int i = 0; i < g.node_count; ++i) {
        if (degree(i) > 0 && pos-- == 0) return i;
      }
      return g.node_count - 1;
    }
  }
}

DegreeDistribution analytic_distribution(const ExperimentConfig& cfg, double z) {
  const int k_max = cfg.analytic_k_max;
  switch (cfg.family) {
    case NetworkFamily::er:
      return poisson_degree_distribution(z, k_max > 0 ? k_max : -1);
    case NetworkFamily::ba:
      return ba_degree_distribution(ba_attachment(z), k_max > 0 ? k_max : 1000);
    case NetworkFamily::cayley: {
      const int k = static_cast<int>(std::lround(z));
      Eigen::VectorXd counts = Eigen::VectorXd::Zero(k + 1);
      counts(k) = 1.0;
      return empirical_degree_distribution(counts);
    }
  }
  throw std::logic_error("unknown network family");
}

}  // namespace

NetworkFamily family_from_string(const std::string& name) {
  if (name == "er") return NetworkFamily::er;
  if (name == "ba") return NetworkFamily::ba;
  if (name == "cayley") return NetworkFamily::cayley;
  throw std::invalid_argument("unknown network family: " + name);
}

const char* to_string(NetworkFamily family) {
  switch (family) {
    case NetworkFamily::er: return "er";
    case NetworkFamily::ba: return "ba";
    case NetworkFamily::cayley: return "cayley";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  params.validate();
  if (n < 2) throw std::domain_error("experiments need at least two banks");
  if (replicates < 1) throw std::domain_error("replicates must be >= 1");
  if (z_values.empty()) throw std::domain_error("at least one mean degree required");
  if (threads < 1) throw std::domain_error("threads must be >= 1");
  if (recip_prob < 0.0 || recip_prob > 1.0)
    throw std::domain_error("reciprocity probability must lie in [0, 1]");
  if (shock_rule == ShockRule::fixed_node &&
      (fixed_shock_node < 0 || fixed_shock_node >= n))
    throw std::domain_error("fixed shock node out of range");
  for (double z : z_values) {
    if (!(z >= 0.0)) throw std::domain_error("mean degrees must be >= 0");
    switch (family) {
      case NetworkFamily::er:
        if (z > n - 1) throw std::domain_error("ER mean degree must be <= n-1");
        break;
      case NetworkFamily::ba:
        ba_attachment(z);  // throws unless z = 2m
        break;
      case NetworkFamily::cayley: {
        const int k = static_cast<int>(std::lround(z));
        if (k < 2 || std::abs(z - k) > 1e-9)
          throw std::domain_error("cayley family needs integer degree z >= 2");
        cayley_depth_for(k, n);
        break;
      }
    }
  }
}

EnsembleResult run_ensemble(const ExperimentConfig& config) {
  config.validate();

  EnsembleResult result;
  result.config = config;
  const int z_count = static_cast<int>(config.z_values.size());
  const std::int64_t total = static_cast<std::int64_t>(z_count) * config.replicates;
  result.records.resize(total);

  std::mutex failure_mutex;
  std::exception_ptr first_failure;

  const auto run_item = [&](std::int64_t index) {
    const int zi = static_cast<int>(index / config.replicates);
    const int rep = static_cast<int>(index % config.replicates);
    const double z = config.z_values[zi];
    const std::uint64_t seed = child_seed(config.master_seed, index);

    ReplicateRecord rec;
    rec.z_index = zi;
    rec.replicate = rep;
    rec.seed = seed;

    const NetworkGraph g = make_graph(config, z, seed);
    const Eigen::VectorXi degree = degrees(g);
    Rng shock_rng(splitmix64(seed ^ kShockStreamTag));
    rec.shocked_bank = pick_shocked(config, g, degree, shock_rng);
    rec.shocked_degree = degree(rec.shocked_bank);

    const std::vector<BalanceSheet> sheets = build_sheets(g, config.params);
    try {
      const ClearingResult solved =
          solve_repayments(g, sheets, config.params, rec.shocked_bank);
      rec.failures = solved.induced_failures;
      rec.iterations = solved.iterations;
      rec.residual = solved.residual;
      rec.converged = true;
    } catch (const ConvergenceError& err) {
      rec.failures = 0;
      rec.iterations = err.iterations;
      rec.residual = err.residual;
      rec.converged = false;
    }
    result.records[index] = rec;
  };

  const int workers =
      static_cast<int>(std::min<std::int64_t>(config.threads, total));
  if (workers <= 1) {
    for (std::int64_t index = 0; index < total; ++index) run_item(index);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::int64_t index = w; index < total; index += workers) {
          try {
            run_item(index);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!first_failure) first_failure = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_failure) std::rethrow_exception(first_failure);
  }

  const CriticalDegrees stars = critical_degrees(config.params);
  result.per_z.reserve(z_count);
  for (int zi = 0; zi < z_count; ++zi) {
    ZSummary zs;
    zs.z = config.z_values[zi];
    zs.replicates = config.replicates;
    zs.k1_star = stars.k1_star;
    zs.k2_star = stars.k2_star;

    double sum = 0.0;
    std::int64_t count = 0;
    const std::int64_t lo = static_cast<std::int64_t>(zi) * config.replicates;
    for (std::int64_t i = lo; i < lo + config.replicates; ++i) {
      const ReplicateRecord& rec = result.records[i];
      if (!rec.converged) {
        ++zs.exclusions;
        continue;
      }
      sum += rec.failures;
      ++count;
    }
    zs.failures_mean = (count > 0) ? sum / count : 0.0;
    double ss = 0.0;
    for (std::int64_t i = lo; i < lo + config.replicates; ++i) {
      const ReplicateRecord& rec = result.records[i];
      if (!rec.converged) continue;
      const double d = rec.failures - zs.failures_mean;
      ss += d * d;
    }
    zs.failures_sem =
        (count > 1) ? std::sqrt(ss / (count - 1)) / std::sqrt(double(count)) : 0.0;

    const DegreeDistribution dist = analytic_distribution(config, zs.z);
    zs.failures_mean_mf =
        mean_failures_mf(dist, q_subcritical(dist, stars.k1_star));

    const int f_cap = std::min(config.n - 1, 1000);
    zs.histogram = Eigen::VectorXd::Zero(f_cap + 2);
    zs.histogram_overflow_from = f_cap + 1;
    for (std::int64_t i = lo; i < lo + config.replicates; ++i) {
      const ReplicateRecord& rec = result.records[i];
      if (!rec.converged) continue;
      zs.histogram(std::min(rec.failures, f_cap + 1)) += 1.0;
    }
    result.per_z.push_back(std::move(zs));
  }
  return result;
}

Eigen::VectorXd histogram(const std::vector<ReplicateRecord>& records, int f_max) {
  if (f_max < 0) throw std::invalid_argument("f_max must be >= 0");
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(f_max + 2);
  double count = 0.0;
  for (const ReplicateRecord& rec : records) {
    if (!rec.converged) continue;
    mass(std::min(rec.failures, f_max + 1)) += 1.0;
    count += 1.0;
  }
  if (count > 0.0) mass /= count;
  return mass;
}

std::vector<SweepRow> sweep_z(const EnsembleResult& result) {
  if (result.per_z.empty())
    throw std::invalid_argument("sweep needs at least one mean degree");
  std::vector<SweepRow> rows;
  rows.reserve(result.per_z.size());
  for (const ZSummary& zs : result.per_z)
    rows.push_back({zs.z, zs.failures_mean, zs.failures_sem, zs.failures_mean_mf,
                    zs.k1_star});
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "# contagion sweep v1\n";
  out << "z,F_mean_emp,F_sem,F_mean_mf,k1_star\n";
  out << std::setprecision(12);
  for (const SweepRow& row : rows)
    out << row.z << ',' << row.failures_mean_emp << ',' << row.failures_sem
        << ',' << row.failures_mean_mf << ',' << row.k1_star << '\n';
}

void write_hist_csv(const ZSummary& summary, const FailureDistribution& mf,
                    std::ostream& out) {
  out << "# contagion hist v1 (last row pools F >= " << summary.histogram_overflow_from
      << ")\n";
  out << "F,count,p_emp,p_mf\n";
  out << std::setprecision(12);
  const double total = summary.histogram.sum();
  for (Eigen::Index f = 0; f < summary.histogram.size(); ++f) {
    const double p_emp = (total > 0.0) ? summary.histogram(f) / total : 0.0;
    const double p_mf = (f < mf.mass.size()) ? mf.mass(f) : 0.0;
    out << f << ',' << summary.histogram(f) << ',' << p_emp << ',' << p_mf << '\n';
  }
}

}  // namespace contagion
