#pragma once

#include <Eigen/Core>

namespace contagion {

enum class DegreeKind { poisson, ba_scalefree, empirical };

/// Finite-support degree distribution. mass(k) is p(k) for k = 0..k_max,
/// renormalised to sum to one after truncation; the discarded tail is kept
/// in truncated_mass so the truncation error stays auditable.
struct DegreeDistribution {
  DegreeKind kind = DegreeKind::empirical;
  Eigen::VectorXd mass;        // index k, size k_max + 1
  int k_min = 0;               // lowest degree with support
  int k_max = 0;
  double mean_degree = 0.0;    // z parameter (poisson) or 2m (BA)
  int ba_min_degree = 0;       // m, BA only
  double truncated_mass = 0.0; // analytic mass beyond k_max, pre-renormalisation

  double mean() const;         // mean of the stored (truncated) mass
};

/// Poisson p(k) = exp(-z) z^k / k!, truncated at k_max (default 10z).
DegreeDistribution poisson_degree_distribution(double z, int k_max = -1);

/// BA stationary distribution p(k) = 2m(m+1) / (k(k+1)(k+2)) for k >= m,
/// truncated at k_max (default 1000).
DegreeDistribution ba_degree_distribution(int m, int k_max = 1000);

/// Wraps an observed histogram (index = degree) as a distribution.
DegreeDistribution empirical_degree_distribution(const Eigen::VectorXd& counts);

/// Conditional degree distribution p(l | k): probability that a neighbour of
/// a degree-k node has degree l.
///   poisson / empirical: l p(l) / z (uncorrelated network);
///   ba_scalefree: the closed form
///     p(l|k) = (m/(kl)) [ (k+2)/(l+1)
///                         - C(2m+2, m+1) C(k+l-z, l-m) / C(k+l+2, l) ]
///   with z = 2m inside the binomial argument. Out-of-support degrees give 0.
double conditional_degree(const DegreeDistribution& dist, int k, int l);

}  // namespace contagion
