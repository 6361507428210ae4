#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "contagion/balance.hpp"
#include "contagion/degree_dist.hpp"

namespace contagion {

/// First critical degree,
///   k1* = ( r(1-f) - [r(1-f) + 2 Lambda - 1]+ ) / ( (R-1)(1-Lambda) + Lambda ).
/// A shocked bank's neighbour fails iff its degree is below k1*. Throws
/// std::domain_error when the denominator is not positive (no finite
/// critical degree).
double critical_degree_1(const FinancialParams& params);

/// Second critical degree,
///   k2* = ( sqrt(1 + 4 r (1-f) / ((R-1)(1-Lambda) + Lambda)) - 1 ) / 2,
/// valid when r < (1 - 2 Lambda)/(1 - f) so the shocked bank pays nothing.
/// Outside that region the closed form does not apply and a domain_error
/// points callers at the exact shell solver.
double critical_degree_2(const FinancialParams& params);

struct CriticalDegrees {
  double k1_star = 0.0;
  std::optional<double> k2_star;  // empty when the closed form is inapplicable
  FinancialParams params;
};

/// Both degrees at once; k2* left empty instead of throwing.
CriticalDegrees critical_degrees(const FinancialParams& params);

/// Exact shell-by-shell clearing solution on an (unbounded) Cayley tree with
/// degree k, shocked at the root. Banks at distance d share one repayment
/// x_(d). The defaulting shell count q is found by raising a trial q from 0:
/// shells beyond q are assumed to repay in full, the finite linear recursion
/// for x_(0..q) is solved, and the first self-consistent assignment wins.
struct CayleyShellSolution {
  int defaulting_shells = 0;      // q: shells 1..q fail
  std::uint64_t failures = 0;     // F = sum_{p<=q} k (k-1)^(p-1)
  Eigen::VectorXd shell_repayments;  // x_(0), x_(1), ..., x_(q+1)
};

/// Throws std::domain_error for k < 2 and when q would exceed max_depth
/// (the parameters imply collapse past the modelled depth).
CayleyShellSolution solve_cayley_shells(int k, const FinancialParams& params,
                                        int max_depth);

/// Largest integer degree counted subcritical: floor(k1*), since a bank at
/// exact integer k = k1* is critical, ends at zero net worth, and is failed.
int max_subcritical_degree(double k1_star);

/// q(k) = sum over subcritical l of p(l | k): probability that a neighbour
/// of a degree-k shocked bank fails. Indexed k = 0..dist.k_max.
Eigen::VectorXd q_subcritical(const DegreeDistribution& dist, double k1_star);

/// Mean-field expected failures <F> = sum_k k p(k) q(k). Reduces to z q on
/// uncorrelated networks.
double mean_failures_mf(const DegreeDistribution& dist, const Eigen::VectorXd& q);

enum class FailureSource { mean_field, empirical, poisson_closed_form, scalefree_asymptotic };

/// Probability mass over the number of failures F.
struct FailureDistribution {
  Eigen::VectorXd mass;      // index F = 0..F_max
  double mean = 0.0;         // sum_F F P(F)
  FailureSource source = FailureSource::mean_field;
  Eigen::VectorXd q_values;  // q(k) used, indexed by k (empty for empirical)
};

/// First-neighbour mean-field failures distribution
///   P(F) = sum_{k >= F} p(k) C(k, F) q(k)^F (1 - q(k))^(k-F),
/// binomial terms evaluated in log space. Truncation follows dist.k_max.
FailureDistribution failures_dist_mf(const DegreeDistribution& dist,
                                     const Eigen::VectorXd& q, int f_max);

/// Convenience: q from (dist, k1*), then the distribution.
FailureDistribution failures_dist_mf(const DegreeDistribution& dist,
                                     double k1_star, int f_max);

/// Poisson closure of the failures law on homogeneous networks:
/// P(F) = e^(-mu) mu^F / F! with mu = <F>. Large-z limit of the binomial
/// mixture; a point of comparison, not a replacement for it.
FailureDistribution failures_dist_poisson(double mean_failures, int f_max);

/// Scale-free tail asymptote P(F) ~ q^(gamma-1) / F^gamma (unnormalised;
/// for tail-shape comparisons only). Requires gamma > 1 and q in (0, 1].
double scalefree_tail(double gamma, double q, double failures);

}  // namespace contagion
