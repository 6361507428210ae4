#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "contagion/analytics.hpp"
#include "contagion/balance.hpp"

namespace contagion {

enum class NetworkFamily { er, ba, cayley };
enum class ShockRule { uniform_random, fixed_node, degree_weighted };

NetworkFamily family_from_string(const std::string& name);
const char* to_string(NetworkFamily family);

/// One Monte Carlo experiment: `replicates` networks per mean degree in
/// z_values, a single shocked bank each, failures recorded.
struct ExperimentConfig {
  NetworkFamily family = NetworkFamily::er;
  int n = 200;
  std::vector<double> z_values;
  int replicates = 1000;
  FinancialParams params;
  ShockRule shock_rule = ShockRule::uniform_random;
  int fixed_shock_node = 0;      // used when shock_rule == fixed_node
  std::uint64_t master_seed = 12345;
  bool directed = false;
  double recip_prob = 1.0;       // directed BA reciprocity
  int threads = 1;
  int analytic_k_max = 0;        // 0: family default truncation

  void validate() const;         // throws std::domain_error
};

struct ReplicateRecord {
  int z_index = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  int shocked_bank = -1;
  int shocked_degree = 0;
  int failures = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// Aggregates for one mean degree.
struct ZSummary {
  double z = 0.0;
  int replicates = 0;
  int exclusions = 0;            // non-converged replicates, excluded
  double failures_mean = 0.0;
  double failures_sem = 0.0;     // sample stdev / sqrt(replicates)
  double failures_mean_mf = 0.0;
  double k1_star = 0.0;
  std::optional<double> k2_star;
  Eigen::VectorXd histogram;     // counts, index F; overflow in last bin
  int histogram_overflow_from = 0;
};

struct EnsembleResult {
  ExperimentConfig config;
  std::vector<ZSummary> per_z;
  std::vector<ReplicateRecord> records;  // all replicates, ordered
};

/// Runs the experiment. Fully deterministic given config.master_seed: each
/// replicate draws its child seed from the documented splitting rule and
/// aggregation is ordered by replicate index, so the thread count never
/// changes the result. Non-converged replicates are recorded and excluded
/// from the aggregates, never silently dropped.
EnsembleResult run_ensemble(const ExperimentConfig& config);

/// Normalised empirical failures mass over F = 0..f_max with an overflow
/// bin at the end.
Eigen::VectorXd histogram(const std::vector<ReplicateRecord>& records, int f_max);

struct SweepRow {
  double z;
  double failures_mean_emp;
  double failures_sem;
  double failures_mean_mf;
  double k1_star;
};

/// Per-z table of empirical vs mean-field failure means. Requires at least
/// one z value; rows come out in config order.
std::vector<SweepRow> sweep_z(const EnsembleResult& result);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// hist CSV: per-F empirical and mean-field mass for one summary.
void write_hist_csv(const ZSummary& summary, const FailureDistribution& mf,
                    std::ostream& out);

}  // namespace contagion
