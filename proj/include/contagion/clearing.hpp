#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <stdexcept>
#include <vector>

#include "contagion/balance.hpp"
#include "contagion/network.hpp"

namespace contagion {

enum class BankStatus { safe, critical, failed, shocked };

const char* to_string(BankStatus s);

struct ClearingOptions {
  double tolerance = 1e-10;      // sup-norm change to declare convergence
  int max_iterations = 100000;
  double classify_epsilon = 1e-8;
};

/// Thrown when the fixed-point iteration fails to reach tolerance.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(double residual_, int iterations_);
  double residual;
  int iterations;
};

/// The repayment system in vector form. Bank i pays
///   x_i = clamp( base_i + (shares * x)_i, 0, cap_i )
/// where base_i = rho_i + liquid_i - senior_i, cap_i = r b_i and
/// shares(i, j) = l_ij / b_j is the fraction of debtor j's payment owed to
/// creditor i. Columns of `shares` sum to 1 wherever b_j > 0, so payments
/// are conserved.
struct ClearingSystem {
  Eigen::SparseMatrix<double> shares;
  Eigen::VectorXd base;
  Eigen::VectorXd cap;
  Eigen::VectorXd illiquid;
  std::optional<int> shocked_bank;
};

/// Assembles the system from graph + sheets. external_rates carries R_i per
/// bank (the shocked bank's entry already set). Borrowed/lent totals are
/// taken from the graph; sheet totals must agree with them.
/// Throws std::domain_error on NaN or negative sheet inputs.
ClearingSystem build_clearing_system(const NetworkGraph& g,
                                     const std::vector<BalanceSheet>& sheets,
                                     double interbank_rate,
                                     const Eigen::VectorXd& external_rates,
                                     std::optional<int> shocked_bank);

struct ClearingResult {
  Eigen::VectorXd repayments;   // x, total paid per bank
  Eigen::VectorXd resources;    // base + incoming at the fixed point
  Eigen::VectorXd net_worths;   // K' after writedowns and repayments
  std::vector<BankStatus> statuses;
  int induced_failures = 0;     // F: non-shocked banks with K' <= eps
  int iterations = 0;
  double residual = 0.0;
  std::optional<int> shocked_bank;
};

/// Greatest clearing fixed point by monotone Jacobi descent from full
/// repayment x = cap. Iterates are component-wise non-increasing; the solver
/// asserts this every sweep. Throws ConvergenceError when max_iterations is
/// hit first.
ClearingResult solve_repayments(const ClearingSystem& sys,
                                const ClearingOptions& opts = {});

/// Convenience overload: single shocked bank, all other banks at params.R.
ClearingResult solve_repayments(const NetworkGraph& g,
                                const std::vector<BalanceSheet>& sheets,
                                const FinancialParams& params,
                                std::optional<int> shocked_bank,
                                const ClearingOptions& opts = {});

/// Status labels from a solved system. Precedence: shocked, then failed
/// (net worth <= eps), then critical (resources within eps of the full-
/// repayment boundary r b_i), else safe. Banks with no interbank position
/// at all sit at exactly zero net worth by construction; they have nothing
/// at stake and classify safe, not failed.
std::vector<BankStatus> classify(const ClearingSystem& sys,
                                 const ClearingResult& result,
                                 double classify_epsilon);

/// F: banks classified `failed` (the shocked bank is labelled `shocked`,
/// never `failed`, so it is excluded by construction).
int count_failures(const ClearingResult& result);

/// Pairwise payments: x_ij = (l_ji / b_i) x_i, bank i paying creditor j its
/// pro-rata share. Row i sums to x_i.
Eigen::SparseMatrix<double> pairwise_repayments(const NetworkGraph& g,
                                                const Eigen::VectorXd& repayments);

/// Exhaustive reference solver for N <= 10: enumerates all 3^N assignments
/// of {full, partial, zero} regimes, solves the induced linear system for
/// the partial block, keeps consistent assignments and returns the one
/// maximising total payments (the greatest fixed point). Independent of the
/// iterative path; used to cross-check it.
ClearingResult brute_force_oracle(const ClearingSystem& sys,
                                  const ClearingOptions& opts = {});

ClearingResult brute_force_oracle(const NetworkGraph& g,
                                  const std::vector<BalanceSheet>& sheets,
                                  const FinancialParams& params,
                                  std::optional<int> shocked_bank,
                                  const ClearingOptions& opts = {});

}  // namespace contagion
