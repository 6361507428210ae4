#include "contagion/degree_dist.hpp"

#include <cmath>
#include <stdexcept>

namespace contagion {

namespace {

// log C(a, b) for integer 0 <= b <= a
double log_binom(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

}  // namespace

double DegreeDistribution::mean() const {
  double acc = 0.0;
  for (int k = 0; k <= k_max; ++k) acc += k * mass(k);
  return acc;
}

DegreeDistribution poisson_degree_distribution(double z, int k_max) {
  if (z < 0.0 || !std::isfinite(z))
    throw std::domain_error("poisson mean degree must be finite and >= 0");
  if (k_max < 0) k_max = std::max(30, static_cast<int>(std::ceil(10.0 * z)));

  DegreeDistribution dist;
  dist.kind = DegreeKind::poisson;
  dist.k_min = 0;
  dist.k_max = k_max;
  dist.mean_degree = z;
  dist.mass = Eigen::VectorXd::Zero(k_max + 1);

  // p(k) = p(k-1) z / k keeps the recurrence stable for large z
  double p = std::exp(-z);
  double total = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    dist.mass(k) = p;
    total += p;
    p *= z / (k + 1);
  }
  dist.truncated_mass = std::max(0.0, 1.0 - total);
  dist.mass /= total;
  return dist;
}

DegreeDistribution ba_degree_distribution(int m, int k_max) {
  if (m < 1) throw std::domain_error("BA minimum degree must be >= 1");
  if (k_max < m) throw std::domain_error("BA truncation must be >= m");

  DegreeDistribution dist;
  dist.kind = DegreeKind::ba_scalefree;
  dist.k_min = m;
  dist.k_max = k_max;
  dist.mean_degree = 2.0 * m;
  dist.ba_min_degree = m;
  dist.mass = Eigen::VectorXd::Zero(k_max + 1);

  const double a = 2.0 * m * (m + 1);
  double total = 0.0;
  for (int k = m; k <= k_max; ++k) {
    const double p = a / (static_cast<double>(k) * (k + 1) * (k + 2));
    dist.mass(k) = p;
    total += p;
  }
  // tail sum telescopes: sum_{k > K} 1/(k(k+1)(k+2)) = 1/(2(K+1)(K+2))
  dist.truncated_mass =
      a / (2.0 * (static_cast<double>(k_max) + 1) * (k_max + 2));
  dist.mass /= total;
  return dist;
}

DegreeDistribution empirical_degree_distribution(const Eigen::VectorXd& counts) {
  if (counts.size() == 0)
    throw std::domain_error("empirical degree histogram is empty");
  double total = 0.0;
  for (Eigen::Index k = 0; k < counts.size(); ++k) {
    const double c = counts(k);
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::domain_error("degree histogram counts must be finite and >= 0");
    total += c;
  }
  if (total <= 0.0)
    throw std::domain_error("degree histogram has no observations");

  DegreeDistribution dist;
  dist.kind = DegreeKind::empirical;
  dist.k_max = static_cast<int>(counts.size()) - 1;
  dist.mass = counts / total;
  dist.k_min = dist.k_max;
  for (int k = 0; k <= dist.k_max; ++k)
    if (dist.mass(k) > 0.0) {
      dist.k_min = k;
      break;
    }
  dist.truncated_mass = 0.0;
  dist.mean_degree = dist.mean();
  return dist;
}

double conditional_degree(const DegreeDistribution& dist, int k, int l) {
  if (k < 1 || l < 1) return 0.0;

  if (dist.kind == DegreeKind::ba_scalefree) {
    const int m = dist.ba_min_degree;
    if (k < m || l < m) return 0.0;
    // p(l|k) = (m/(kl)) [ (k+2)/(l+1) - C(2m+2,m+1) C(k+l-2m,l-m) / C(k+l+2,l) ]
    const double kd = k, ld = l;
    const double first = (kd + 2.0) / (ld + 1.0);
    const double second =
        std::exp(log_binom(2.0 * m + 2.0, m + 1.0) +
                 log_binom(kd + ld - 2.0 * m, ld - m) - log_binom(kd + ld + 2.0, ld));
    const double p = m / (kd * ld) * (first - second);
    return std::max(0.0, p);
  }

  // uncorrelated: a neighbour has degree l with probability l p(l) / <l>
  if (l > dist.k_max) return 0.0;
  const double mean = dist.mean();
  if (mean <= 0.0) return 0.0;
  return l * dist.mass(l) / mean;
}

}  // namespace contagion
