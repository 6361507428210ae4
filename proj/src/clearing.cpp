#include "contagion/clearing.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace contagion {

const char* to_string(BankStatus s) {
  switch (s) {
    case BankStatus::safe: return "safe";
    case BankStatus::critical: return "critical";
    case BankStatus::failed: return "failed";
    case BankStatus::shocked: return "shocked";
  }
  return "unknown";
}

ConvergenceError::ConvergenceError(double residual_, int iterations_)
    : std::runtime_error("clearing iteration failed to converge (residual " +
                         std::to_string(residual_) + " after " +
                         std::to_string(iterations_) + " sweeps)"),
      residual(residual_),
      iterations(iterations_) {}

ClearingSystem build_clearing_system(const NetworkGraph& g,
                                     const std::vector<BalanceSheet>& sheets,
                                     double interbank_rate,
                                     const Eigen::VectorXd& external_rates,
                                     std::optional<int> shocked_bank) {
  const int n = g.node_count;
  if (static_cast<int>(sheets.size()) != n)
    throw std::invalid_argument("one balance sheet per bank required");
  if (external_rates.size() != n)
    throw std::invalid_argument("one external rate per bank required");
  if (shocked_bank && (*shocked_bank < 0 || *shocked_bank >= n))
    throw std::invalid_argument("shocked bank index out of range");
  if (!(interbank_rate > 1.0))
    throw std::domain_error("interbank gross rate r must exceed 1");

  const Eigen::VectorXd borrowed = borrowed_totals(g);

  ClearingSystem sys;
  sys.base.resize(n);
  sys.cap.resize(n);
  sys.illiquid.resize(n);
  sys.shocked_bank = shocked_bank;
  for (int i = 0; i < n; ++i) {
    const BalanceSheet& sh = sheets[i];
    const bool bad = !std::isfinite(sh.liquid) || !std::isfinite(sh.illiquid) ||
                     !std::isfinite(sh.senior) || sh.liquid < 0.0 ||
                     sh.illiquid < 0.0 || !std::isfinite(external_rates(i));
    if (bad) throw std::domain_error("balance sheet entries must be finite, "
                                     "liquid/illiquid non-negative");
    if (std::abs(sh.interbank_borrowed - borrowed(i)) >
        1e-9 * std::max(1.0, borrowed(i)))
      throw std::domain_error("sheet borrowed total disagrees with the graph");
    sys.base(i) = profit(sh, external_rates(i)) + sh.liquid - sh.senior;
    sys.cap(i) = interbank_rate * borrowed(i);
    sys.illiquid(i) = sh.illiquid;
  }

  // shares(creditor, debtor) = weight / debtor's total borrowings
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.edges.size());
  for (const Edge& e : g.edges)
    if (borrowed(e.borrower) > 0.0)
      trips.emplace_back(e.lender, e.borrower, e.weight / borrowed(e.borrower));
  sys.shares.resize(n, n);
  sys.shares.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

namespace {

ClearingResult finish_result(const ClearingSystem& sys, const Eigen::VectorXd& x,
                             int iterations, double residual,
                             const ClearingOptions& opts) {
  ClearingResult res;
  res.repayments = x;
  res.resources = sys.base + sys.shares * x;
  res.net_worths = res.resources + sys.illiquid - x;
  res.iterations = iterations;
  res.residual = residual;
  res.shocked_bank = sys.shocked_bank;
  res.statuses = classify(sys, res, opts.classify_epsilon);
  res.induced_failures = count_failures(res);
  return res;
}

}  // namespace

ClearingResult solve_repayments(const ClearingSystem& sys,
                                const ClearingOptions& opts) {
  const Eigen::Index n = sys.base.size();
  Eigen::VectorXd x = sys.cap;  // greatest fixed point: descend from full repayment
  if (n == 0) return finish_result(sys, x, 0, 0.0, opts);
  Eigen::VectorXd next(n);

  double residual = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    next = (sys.base + sys.shares * x).cwiseMin(sys.cap).cwiseMax(0.0);
    if ((next - x).maxCoeff() > 1e-9)
      throw std::logic_error("clearing iterate increased; monotonicity broken");
    next = next.cwiseMin(x);  // keep descent exact against rounding
    residual = (x - next).lpNorm<Eigen::Infinity>();
    x.swap(next);
    if (residual < opts.tolerance) return finish_result(sys, x, it, residual, opts);
  }
  throw ConvergenceError(residual, opts.max_iterations);
}

ClearingResult solve_repayments(const NetworkGraph& g,
                                const std::vector<BalanceSheet>& sheets,
                                const FinancialParams& params,
                                std::optional<int> shocked_bank,
                                const ClearingOptions& opts) {
  params.validate();
  Eigen::VectorXd rates =
      Eigen::VectorXd::Constant(g.node_count, params.external_rate);
  if (shocked_bank) rates(*shocked_bank) = params.shocked_rate;
  return solve_repayments(
      build_clearing_system(g, sheets, params.interbank_rate, rates, shocked_bank),
      opts);
}

std::vector<BankStatus> classify(const ClearingSystem& sys,
                                 const ClearingResult& result,
                                 double classify_epsilon) {
  const Eigen::Index n = result.repayments.size();

  // a bank is in the market if it borrows (cap > 0) or lends (it appears as
  // a creditor in some debtor's column)
  std::vector<char> active(n, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (sys.cap(i) > 0.0) active[i] = 1;
  for (int c = 0; c < sys.shares.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.shares, c); it; ++it)
      active[it.row()] = 1;

  std::vector<BankStatus> statuses(n, BankStatus::safe);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (result.shocked_bank && *result.shocked_bank == i) {
      statuses[i] = BankStatus::shocked;
    } else if (!active[i]) {
      // isolated: zero net worth from an empty sheet is not a failure
    } else if (result.net_worths(i) <= classify_epsilon) {
      statuses[i] = BankStatus::failed;
    } else if (sys.cap(i) > classify_epsilon &&
               std::abs(result.resources(i) - sys.cap(i)) <= classify_epsilon) {
      // at the full-repayment boundary but still solvent (illiquid cushion)
      statuses[i] = BankStatus::critical;
    }
  }
  return statuses;
}

int count_failures(const ClearingResult& result) {
  int f = 0;
  for (BankStatus s : result.statuses)
    if (s == BankStatus::failed) ++f;
  return f;
}

Eigen::SparseMatrix<double> pairwise_repayments(const NetworkGraph& g,
                                                const Eigen::VectorXd& repayments) {
  if (repayments.size() != g.node_count)
    throw std::invalid_argument("one repayment per bank required");
  const Eigen::VectorXd borrowed = borrowed_totals(g);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.edges.size());
  // the borrower on edge (lender, borrower, w) owes the lender w/b of its payment
  for (const Edge& e : g.edges)
    if (borrowed(e.borrower) > 0.0)
      trips.emplace_back(e.borrower, e.lender,
                         repayments(e.borrower) * e.weight / borrowed(e.borrower));
  Eigen::SparseMatrix<double> pay(g.node_count, g.node_count);
  pay.setFromTriplets(trips.begin(), trips.end());
  return pay;
}

ClearingResult brute_force_oracle(const ClearingSystem& sys,
                                  const ClearingOptions& opts) {
  const int n = static_cast<int>(sys.base.size());
  if (n > 10)
    throw std::invalid_argument("brute-force oracle refuses N > 10");

  // banks with no interbank debt always pay zero; enumerate only the rest
  std::vector<int> active;
  for (int i = 0; i < n; ++i)
    if (sys.cap(i) > 0.0) active.push_back(i);
  const int a = static_cast<int>(active.size());

  const Eigen::MatrixXd shares = Eigen::MatrixXd(sys.shares);
  const double tol = 1e-9;

  std::int64_t combos = 1;
  for (int i = 0; i < a; ++i) combos *= 3;

  bool found = false;
  double best_total = 0.0;
  Eigen::VectorXd best_x;

  enum { kFull = 0, kZero = 1, kPartial = 2 };
  std::vector<int> regime(a);
  Eigen::VectorXd x(n);
  for (std::int64_t code = 0; code < combos; ++code) {
    std::int64_t c = code;
    std::vector<int> partial;
    for (int i = 0; i < a; ++i) {
      regime[i] = static_cast<int>(c % 3);
      c /= 3;
      if (regime[i] == kPartial) partial.push_back(active[i]);
    }

    x.setZero();
    for (int i = 0; i < a; ++i)
      if (regime[i] == kFull) x(active[i]) = sys.cap(active[i]);

    if (!partial.empty()) {
      // partial banks pay exactly their resources:
      // (I - S_pp) x_p = base_p + S_pf x_fixed
      const int p = static_cast<int>(partial.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(p, p);
      Eigen::VectorXd rhs(p);
      for (int r = 0; r < p; ++r) {
        const int i = partial[r];
        rhs(r) = sys.base(i) + shares.row(i) * x;
        for (int cidx = 0; cidx < p; ++cidx) A(r, cidx) -= shares(i, partial[cidx]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd xp = lu.solve(rhs);
      for (int r = 0; r < p; ++r) x(partial[r]) = xp(r);
    }

    // regime consistency against the actual resources
    const Eigen::VectorXd resources = sys.base + shares * x;
    bool ok = true;
    for (int i = 0; i < a && ok; ++i) {
      const int bank = active[i];
      switch (regime[i]) {
        case kFull: ok = resources(bank) >= sys.cap(bank) - tol; break;
        case kZero: ok = resources(bank) <= tol; break;
        default:
          ok = x(bank) >= -tol && x(bank) <= sys.cap(bank) + tol;
          break;
      }
    }
    if (!ok) continue;

    const double total = x.sum();
    if (!found || total > best_total) {
      found = true;
      best_total = total;
      best_x = x.cwiseMin(sys.cap).cwiseMax(0.0);
    }
  }

  if (!found)
    throw std::logic_error("no consistent regime assignment; oracle failed");
  const Eigen::VectorXd res = sys.base + shares * best_x;
  const Eigen::VectorXd phi = res.cwiseMin(sys.cap).cwiseMax(0.0);
  const double residual = (best_x - phi).lpNorm<Eigen::Infinity>();
  return finish_result(sys, best_x, 0, residual, opts);
}

ClearingResult brute_force_oracle(const NetworkGraph& g,
                                  const std::vector<BalanceSheet>& sheets,
                                  const FinancialParams& params,
                                  std::optional<int> shocked_bank,
                                  const ClearingOptions& opts) {
  params.validate();
  Eigen::VectorXd rates =
      Eigen::VectorXd::Constant(g.node_count, params.external_rate);
  if (shocked_bank) rates(*shocked_bank) = params.shocked_rate;
  return brute_force_oracle(
      build_clearing_system(g, sheets, params.interbank_rate, rates, shocked_bank),
      opts);
}

}  // namespace contagion
