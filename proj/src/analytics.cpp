#include "contagion/analytics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace contagion {

namespace {

// base resources per unit degree: (rho + liquid - senior)/k for a bank earning
// gross rate `rate` under the standard ratio sheets
double base_coeff(const FinancialParams& p, double rate) {
  return ((rate - 1.0) * (1.0 - p.leverage_ratio) + p.leverage_ratio) /
         (1.0 - p.liquidity_ratio);
}

double log_binom(double a, double b) {
  return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

}  // namespace

double critical_degree_1(const FinancialParams& params) {
  params.validate();
  const double r = params.interbank_rate;
  const double f = params.liquidity_ratio;
  const double lev = params.leverage_ratio;
  const double denom = base_coeff(params, params.external_rate) * (1.0 - f);
  if (denom <= 0.0)
    throw std::domain_error(
        "no finite first critical degree: (R-1)(1-Lambda)+Lambda must be positive");
  const double bracket = std::max(0.0, r * (1.0 - f) + 2.0 * lev - 1.0);
  return (r * (1.0 - f) - bracket) / denom;
}

double critical_degree_2(const FinancialParams& params) {
  params.validate();
  const double r = params.interbank_rate;
  const double f = params.liquidity_ratio;
  const double lev = params.leverage_ratio;
  const double denom = base_coeff(params, params.external_rate) * (1.0 - f);
  if (denom <= 0.0)
    throw std::domain_error(
        "no finite second critical degree: (R-1)(1-Lambda)+Lambda must be positive");
  // closed form assumes the shocked bank pays nothing
  if (!(r < (1.0 - 2.0 * lev) / (1.0 - f)))
    throw std::domain_error(
        "second critical degree closed form needs r < (1-2*Lambda)/(1-f); "
        "use the exact shell solver instead");
  return 0.5 * (std::sqrt(1.0 + 4.0 * r * (1.0 - f) / denom) - 1.0);
}

CriticalDegrees critical_degrees(const FinancialParams& params) {
  CriticalDegrees out;
  out.params = params;
  out.k1_star = critical_degree_1(params);
  try {
    out.k2_star = critical_degree_2(params);
  } catch (const std::domain_error&) {
    out.k2_star.reset();
  }
  return out;
}

CayleyShellSolution solve_cayley_shells(int k, const FinancialParams& params,
                                        int max_depth) {
  params.validate();
  if (k < 2) throw std::domain_error("cayley shells require degree k >= 2");
  if (max_depth < 1) throw std::domain_error("max_depth must be >= 1");

  const double r = params.interbank_rate;
  const double rk = r * k;
  const double ck = base_coeff(params, params.external_rate) * k;
  const double root_base = base_coeff(params, params.shocked_rate) * k;
  const double tol = 1e-9;

  // Trial q: shells 1..q partially repay, shells > q repay rk in full. The
  // root can sit in any clamp regime, so each trial checks all three.
  enum RootRegime { kZero = 0, kPartial = 1, kFull = 2 };
  for (int q = 0; q <= max_depth; ++q) {
    for (int root_regime = kZero; root_regime <= kFull; ++root_regime) {
      Eigen::VectorXd shells(q);  // x_(1..q)
      double x0;
      if (q == 0) {
        if (root_regime != kZero) continue;  // the clamp covers every regime here
        x0 = std::min(rk, std::max(0.0, root_base + rk));
      } else {
        // x_(d) = ck + x_(d-1)/k + (k-1) x_(d+1)/k, tridiagonal in d = 1..q
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(q, q);
        Eigen::VectorXd rhs = Eigen::VectorXd::Constant(q, ck);
        for (int d = 1; d < q; ++d) {
          a(d, d - 1) = -1.0 / k;
          a(d - 1, d) = -(k - 1.0) / k;
        }
        switch (root_regime) {
          case kZero: break;                       // x_(0) = 0
          case kFull: rhs(0) += r; break;          // x_(0) = rk
          default:                                 // x_(0) = root_base + x_(1)
            a(0, 0) -= 1.0 / k;
            rhs(0) += root_base / k;
        }
        rhs(q - 1) += (k - 1.0) * r;  // x_(q+1) = rk
        shells = Eigen::FullPivLU<Eigen::MatrixXd>(a).solve(rhs);

        const double root_resources = root_base + shells(0);
        switch (root_regime) {
          case kZero:
            if (root_resources > tol) continue;
            x0 = 0.0;
            break;
          case kFull:
            if (root_resources < rk - tol) continue;
            x0 = rk;
            break;
          default:
            if (root_resources < -tol || root_resources > rk + tol) continue;
            x0 = std::min(rk, std::max(0.0, root_resources));
        }
        bool shells_ok = true;
        for (int d = 0; d < q; ++d)
          if (shells(d) < -tol || shells(d) > rk + tol) shells_ok = false;
        if (!shells_ok) continue;
      }

      // shell q+1 must be strictly safe, a critical shell belongs in q
      const double parent = (q == 0) ? x0 : shells(q - 1);
      if (ck + parent / k + (k - 1.0) * r <= rk + tol) continue;

      CayleyShellSolution sol;
      sol.defaulting_shells = q;
      sol.shell_repayments.resize(q + 2);
      sol.shell_repayments(0) = x0;
      for (int d = 0; d < q; ++d)
        sol.shell_repayments(d + 1) = std::min(rk, std::max(0.0, shells(d)));
      sol.shell_repayments(q + 1) = rk;

      std::uint64_t shell_size = static_cast<std::uint64_t>(k);
      for (int p = 1; p <= q; ++p) {
        sol.failures += shell_size;
        if (p < q) {
          if (shell_size > std::numeric_limits<std::uint64_t>::max() / (k - 1))
            throw std::overflow_error("shell failure count overflows");
          shell_size *= k - 1;
        }
      }
      return sol;
    }
  }
  throw std::domain_error(
      "no consistent shell assignment within max_depth: parameters imply "
      "collapse past the modelled depth at this degree");
}

int max_subcritical_degree(double k1_star) {
  // nudge so an analytically integer threshold stays included (a bank at
  // exactly the critical degree ends at zero net worth and counts as failed)
  return static_cast<int>(std::floor(k1_star + 1e-9));
}

Eigen::VectorXd q_subcritical(const DegreeDistribution& dist, double k1_star) {
  const int top = max_subcritical_degree(k1_star);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dist.k_max + 1);
  const int lo = std::max(1, dist.k_min);
  for (int k = 1; k <= dist.k_max; ++k) {
    double acc = 0.0;
    for (int l = lo; l <= top; ++l) acc += conditional_degree(dist, k, l);
    q(k) = std::min(1.0, acc);
  }
  return q;
}

double mean_failures_mf(const DegreeDistribution& dist, const Eigen::VectorXd& q) {
  if (q.size() != dist.k_max + 1)
    throw std::invalid_argument("q must be indexed 0..k_max");
  double acc = 0.0;
  for (int k = 1; k <= dist.k_max; ++k) acc += k * dist.mass(k) * q(k);
  return acc;
}

FailureDistribution failures_dist_mf(const DegreeDistribution& dist,
                                     const Eigen::VectorXd& q, int f_max) {
  if (q.size() != dist.k_max + 1)
    throw std::invalid_argument("q must be indexed 0..k_max");
  if (f_max < 0) throw std::invalid_argument("f_max must be >= 0");

  FailureDistribution out;
  out.source = FailureSource::mean_field;
  out.q_values = q;
  out.mass = Eigen::VectorXd::Zero(f_max + 1);

  for (int k = 0; k <= dist.k_max; ++k) {
    const double pk = dist.mass(k);
    if (pk <= 0.0) continue;
    const double qk = (k >= 1) ? q(k) : 0.0;
    if (qk <= 0.0) {
      out.mass(0) += pk;
      continue;
    }
    if (qk >= 1.0) {
      if (k <= f_max) out.mass(k) += pk;
      continue;
    }
    const double lq = std::log(qk), l1q = std::log1p(-qk);
    const int hi = std::min(k, f_max);
    for (int f = 0; f <= hi; ++f)
      out.mass(f) +=
          pk * std::exp(log_binom(k, f) + f * lq + (k - f) * l1q);
  }
  for (int f = 0; f <= f_max; ++f) out.mean += f * out.mass(f);
  return out;
}

FailureDistribution failures_dist_mf(const DegreeDistribution& dist,
                                     double k1_star, int f_max) {
  return failures_dist_mf(dist, q_subcritical(dist, k1_star), f_max);
}

FailureDistribution failures_dist_poisson(double mean_failures, int f_max) {
  if (!(mean_failures >= 0.0) || !std::isfinite(mean_failures))
    throw std::domain_error("mean failure count must be finite and >= 0");
  if (f_max < 0) throw std::invalid_argument("f_max must be >= 0");

  FailureDistribution out;
  out.source = FailureSource::poisson_closed_form;
  out.mass = Eigen::VectorXd::Zero(f_max + 1);
  if (mean_failures == 0.0) {
    out.mass(0) = 1.0;
    return out;
  }
  const double lmu = std::log(mean_failures);
  for (int f = 0; f <= f_max; ++f) {
    out.mass(f) = std::exp(-mean_failures + f * lmu - std::lgamma(f + 1.0));
    out.mean += f * out.mass(f);
  }
  return out;
}

double scalefree_tail(double gamma, double q, double failures) {
  if (!(gamma > 1.0)) throw std::domain_error("tail exponent must exceed 1");
  if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("q must lie in (0, 1]");
  if (!(failures > 0.0)) throw std::domain_error("failure count must be positive");
  return std::exp((gamma - 1.0) * std::log(q) - gamma * std::log(failures));
}

}  // namespace contagion
