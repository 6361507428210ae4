#include <doctest.h>

#include <cmath>
#include <vector>

#include "contagion/analytics.hpp"
#include "contagion/clearing.hpp"
#include "contagion/degree_dist.hpp"
#include "contagion/netgen.hpp"

using namespace contagion;

namespace {

FinancialParams standard_params() {
  FinancialParams p;
  p.external_rate = 1.02;
  p.interbank_rate = 1.01;
  p.liquidity_ratio = 0.5;
  p.leverage_ratio = 0.03;
  p.shocked_rate = 0.0;
  return p;
}

}  // namespace

TEST_SUITE("critical_degrees") {
  TEST_CASE("first critical degree at standard parameters") {
    // r(1-f) = 0.505, cushion per unit degree (R-1)(1-L)+L = 0.0494,
    // and the shocked bank pays nothing (r(1-f)+2L-1 < 0)
    const double k1 = critical_degree_1(standard_params());
    CHECK(k1 == doctest::Approx(0.505 / 0.0494).epsilon(1e-12));
    CHECK(k1 == doctest::Approx(10.222672064777328).epsilon(1e-12));
  }

  TEST_CASE("partial shocked-bank repayment trims the numerator") {
    FinancialParams p = standard_params();
    p.liquidity_ratio = 0.2;
    p.leverage_ratio = 0.2;
    // r(1-f) = 0.808 and r(1-f)+2L-1 = 0.208 > 0: the shocked bank's own
    // creditors recover part of the exposure
    const double denom = 0.02 * 0.8 + 0.2;
    CHECK(critical_degree_1(p) ==
          doctest::Approx((0.808 - 0.208) / denom).epsilon(1e-12));
  }

  TEST_CASE("degenerate economy has no finite critical degree") {
    FinancialParams p = standard_params();
    p.external_rate = 0.9;
    p.leverage_ratio = 0.05;
    // (R-1)(1-L)+L = -0.045: losses grow with degree instead of shrinking
    CHECK_THROWS_AS(critical_degree_1(p), std::domain_error);
  }

  TEST_CASE("second critical degree solves its quadratic") {
    const FinancialParams p = standard_params();
    const double k2 = critical_degree_2(p);
    CHECK(k2 == doctest::Approx(2.73615080996).epsilon(1e-9));
    // defining identity: k2 (k2 + 1) ((R-1)(1-L)+L) = r (1-f)
    CHECK(k2 * (k2 + 1.0) * 0.0494 == doctest::Approx(0.505).epsilon(1e-12));
  }

  TEST_CASE("second degree is refused when the shocked bank pays out") {
    FinancialParams p = standard_params();
    p.interbank_rate = 1.89;  // r >= (1-2L)/(1-f) = 1.88
    CHECK_THROWS_AS(critical_degree_2(p), std::domain_error);

    const CriticalDegrees both = critical_degrees(p);
    CHECK(both.k1_star > 0.0);
    CHECK(!both.k2_star.has_value());
  }

  TEST_CASE("both degrees together") {
    const CriticalDegrees both = critical_degrees(standard_params());
    CHECK(both.k1_star == doctest::Approx(10.222672064777328));
    REQUIRE(both.k2_star.has_value());
    CHECK(*both.k2_star == doctest::Approx(2.73615080996).epsilon(1e-9));
  }

  TEST_CASE("vanishing liquidity and leverage recover the bare-margin law") {
    for (double R : {1.01, 1.02, 1.05}) {
      FinancialParams p = standard_params();
      p.external_rate = R;
      p.liquidity_ratio = 0.0;
      p.leverage_ratio = 0.0;
      // numerator collapses to r - (r-1) = 1
      CHECK(std::abs(critical_degree_1(p) - 1.0 / (R - 1.0)) < 1e-9);
    }
  }

  TEST_CASE("max subcritical degree floors, holding exact integers") {
    CHECK(max_subcritical_degree(10.222672064777328) == 10);
    CHECK(max_subcritical_degree(10.0) == 10);
    CHECK(max_subcritical_degree(0.3) == 0);
  }
}

TEST_SUITE("cayley_shells") {
  TEST_CASE("k=4: exactly the first shell defaults") {
    const CayleyShellSolution sol =
        solve_cayley_shells(4, standard_params(), 30);
    CHECK(sol.defaulting_shells == 1);
    CHECK(sol.failures == 4);
    REQUIRE(sol.shell_repayments.size() == 3);
    CHECK(sol.shell_repayments(0) == 0.0);  // root wiped out, pays nothing
    // shell 1 collects c k from its own book plus (k-1) full repayments r
    CHECK(sol.shell_repayments(1) ==
          doctest::Approx(0.0988 * 4 + 3 * 1.01).epsilon(1e-12));
    CHECK(sol.shell_repayments(2) == doctest::Approx(4 * 1.01));  // full
  }

  TEST_CASE("k=2: contagion reaches the second shell") {
    const CayleyShellSolution sol =
        solve_cayley_shells(2, standard_params(), 30);
    CHECK(sol.defaulting_shells == 2);
    CHECK(sol.failures == 4);  // k + k(k-1)
    REQUIRE(sol.shell_repayments.size() == 4);
    CHECK(sol.shell_repayments(0) == 0.0);
    // tridiagonal pair: x1 = ck + x2/2, x2 = ck + x1/2 + r
    CHECK(sol.shell_repayments(1) ==
          doctest::Approx(1.06853333333333).epsilon(1e-10));
    CHECK(sol.shell_repayments(2) ==
          doctest::Approx(1.74186666666667).epsilon(1e-10));
    CHECK(sol.shell_repayments(3) == doctest::Approx(2.02));
  }

  TEST_CASE("k=12 sits above the critical degree: no failures") {
    const CayleyShellSolution sol =
        solve_cayley_shells(12, standard_params(), 30);
    CHECK(sol.defaulting_shells == 0);
    CHECK(sol.failures == 0);
    CHECK(sol.shell_repayments(0) == 0.0);  // shocked root still pays nothing
    CHECK(sol.shell_repayments(1) == doctest::Approx(12 * 1.01));
  }

  TEST_CASE("mild shock lets the root pay in part or in full") {
    FinancialParams p = standard_params();
    p.shocked_rate = 0.9;
    CayleyShellSolution sol = solve_cayley_shells(4, p, 30);
    CHECK(sol.failures == 0);
    // root base (c_s k with c_s = -0.134) plus k incoming repayments r
    CHECK(sol.shell_repayments(0) ==
          doctest::Approx(-0.134 * 4 + 4 * 1.01).epsilon(1e-12));

    p.shocked_rate = p.external_rate;  // no shock at all
    sol = solve_cayley_shells(4, p, 30);
    CHECK(sol.failures == 0);
    CHECK(sol.shell_repayments(0) == doctest::Approx(4 * 1.01));
  }

  TEST_CASE("depth budget cuts off deep cascades") {
    CHECK_THROWS_AS(solve_cayley_shells(2, standard_params(), 1),
                    std::domain_error);
    CHECK_THROWS_AS(solve_cayley_shells(1, standard_params(), 30),
                    std::domain_error);
  }

  TEST_CASE("shell solution matches full clearing on finite trees") {
    const FinancialParams p = standard_params();
    // interior shells must stay interior: valid whenever q <= depth-2
    const std::vector<std::pair<int, int>> cases = {
        {2, 4}, {4, 3}, {6, 3}, {9, 3}, {12, 3}};
    for (const auto& [k, depth] : cases) {
      const CayleyShellSolution shells = solve_cayley_shells(k, p, 30);
      REQUIRE(shells.defaulting_shells <= depth - 2);

      const NetworkGraph g = gen_cayley_tree(k, depth);
      const ClearingResult res = solve_repayments(g, build_sheets(g, p), p, 0);
      CHECK(static_cast<std::uint64_t>(res.induced_failures) ==
            shells.failures);
      // node 0 is the root; shells 1..q+1 start right after it
      CHECK(std::abs(res.repayments(0) - shells.shell_repayments(0)) < 1e-9);
      int node = 1;
      for (int d = 1; d <= shells.defaulting_shells + 1; ++d) {
        const int shell_size = static_cast<int>(
            static_cast<double>(k) * std::pow(k - 1.0, d - 1));
        for (int s = 0; s < shell_size; ++s, ++node)
          CHECK(std::abs(res.repayments(node) -
                         shells.shell_repayments(d)) < 1e-9);
      }
    }
  }

  TEST_CASE("two-shell cascade agrees with exhaustive enumeration") {
    const FinancialParams p = standard_params();
    const NetworkGraph g = gen_cayley_tree(2, 4);  // 9-bank path
    const ClearingResult fast = solve_repayments(g, build_sheets(g, p), p, 0);
    const ClearingResult slow = brute_force_oracle(g, build_sheets(g, p), p, 0);
    CHECK((fast.repayments - slow.repayments).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(fast.induced_failures == 4);
    CHECK(slow.induced_failures == 4);
  }
}

TEST_SUITE("mean_field") {
  TEST_CASE("neighbour failure probability on an uncorrelated network") {
    const DegreeDistribution d = poisson_degree_distribution(8.0, 80);
    const double k1 = critical_degree_1(standard_params());
    const Eigen::VectorXd q = q_subcritical(d, k1);

    // sum over l <= 10 of l p(l) / z telescopes to the Poisson CDF at 9
    double cdf9 = 0.0, term = std::exp(-8.0);
    for (int m = 0; m <= 9; ++m) {
      cdf9 += term;
      term *= 8.0 / (m + 1);
    }
    for (int k : {1, 5, 17, 80})
      CHECK(q(k) == doctest::Approx(cdf9).epsilon(1e-10));

    CHECK(mean_failures_mf(d, q) ==
          doctest::Approx(8.0 * cdf9).epsilon(1e-10));
    CHECK(mean_failures_mf(d, q) ==
          doctest::Approx(5.73299406982).epsilon(1e-9));
  }

  TEST_CASE("regular market tuned to its critical degree loses every neighbour") {
    // matches the 11-bank complete-graph clearing fixture: k1* forced to 10
    FinancialParams p = standard_params();
    p.external_rate = 1.0 + 0.0205 / 0.97;
    const double k1 = critical_degree_1(p);
    CHECK(k1 == doctest::Approx(10.0).epsilon(1e-12));

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(11);
    counts(10) = 11.0;
    const DegreeDistribution d = empirical_degree_distribution(counts);
    const Eigen::VectorXd q = q_subcritical(d, k1);
    CHECK(q(10) == doctest::Approx(1.0));
    CHECK(mean_failures_mf(d, q) == doctest::Approx(10.0));
  }

  TEST_CASE("failures law on a two-degree toy market") {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(4);
    counts(2) = 1.0;
    counts(3) = 1.0;
    const DegreeDistribution d = empirical_degree_distribution(counts);
    const FailureDistribution fd = failures_dist_mf(d, 2.4, 3);

    // q = (sum_{l<=2} l p(l)) / mean = 1/2.5 = 0.4 for every k, so F mixes
    // Binomial(2, 0.4) and Binomial(3, 0.4) with equal weight
    CHECK(fd.mass(0) == doctest::Approx(0.288).epsilon(1e-12));
    CHECK(fd.mass(1) == doctest::Approx(0.456).epsilon(1e-12));
    CHECK(fd.mass(2) == doctest::Approx(0.224).epsilon(1e-12));
    CHECK(fd.mass(3) == doctest::Approx(0.032).epsilon(1e-12));
    CHECK(fd.mass.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fd.mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fd.mean == doctest::Approx(mean_failures_mf(d, fd.q_values)));
  }

  TEST_CASE("degenerate neighbour probabilities") {
    const DegreeDistribution d = poisson_degree_distribution(6.0, 60);
    FailureDistribution none = failures_dist_mf(d, 0.5, 60);
    CHECK(none.mass(0) == doctest::Approx(1.0));
    CHECK(none.mean == doctest::Approx(0.0));

    // every neighbour fails: F equals the shocked bank's own degree
    const Eigen::VectorXd all = Eigen::VectorXd::Ones(61);
    FailureDistribution sure = failures_dist_mf(d, all, 60);
    for (int f = 0; f <= 60; ++f)
      CHECK(sure.mass(f) == doctest::Approx(d.mass(f)).epsilon(1e-12));
  }

  TEST_CASE("mean identity holds for ER and BA inputs") {
    const double k1 = critical_degree_1(standard_params());
    for (const DegreeDistribution& d :
         {poisson_degree_distribution(8.0, 80),
          ba_degree_distribution(4, 400)}) {
      const Eigen::VectorXd q = q_subcritical(d, k1);
      const FailureDistribution fd = failures_dist_mf(d, q, d.k_max);
      CHECK(std::abs(fd.mean - mean_failures_mf(d, q)) < 1e-9);
    }
  }

  TEST_CASE("poisson closure matches the binomial mixture at large z") {
    const DegreeDistribution d = poisson_degree_distribution(30.0, 400);
    const Eigen::VectorXd q = Eigen::VectorXd::Constant(401, 0.2);
    const FailureDistribution mix = failures_dist_mf(d, q, 100);
    const FailureDistribution closed = failures_dist_poisson(30.0 * 0.2, 100);
    CHECK(closed.mean == doctest::Approx(6.0).epsilon(1e-9));
    // thinning: a Poisson count of Bernoulli(q) neighbours is again Poisson,
    // so mixture and closure agree to rounding, not merely asymptotically
    double tv = 0.0;
    for (int f = 0; f <= 100; ++f)
      tv += std::abs(mix.mass(f) - closed.mass(f));
    CHECK(tv / 2.0 < 1e-9);
  }

  TEST_CASE("scale-free tail shape") {
    CHECK(scalefree_tail(3.0, 0.5, 10.0) ==
          doctest::Approx(0.25 / 1000.0).epsilon(1e-12));
    // doubling F under gamma = 3 divides the tail by 8
    CHECK(scalefree_tail(3.0, 0.3, 40.0) /
              scalefree_tail(3.0, 0.3, 80.0) ==
          doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS_AS(scalefree_tail(1.0, 0.5, 10.0), std::domain_error);
    CHECK_THROWS_AS(scalefree_tail(3.0, 0.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(scalefree_tail(3.0, 0.5, 0.0), std::domain_error);
  }
}
