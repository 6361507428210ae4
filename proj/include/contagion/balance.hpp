#pragma once

#include <vector>

#include "contagion/network.hpp"

namespace contagion {

/// The four model scalars plus the rate applied to the shocked bank.
struct FinancialParams {
  double external_rate = 1.02;   // R, gross return on outside investment
  double interbank_rate = 1.01;  // r > 1, gross rate on interbank loans
  double liquidity_ratio = 0.5;  // f in [0, 1)
  double leverage_ratio = 0.03;  // Lambda in [0, 1)
  double shocked_rate = 0.0;     // R applied to the shocked bank

  /// Throws std::domain_error unless f in [0,1), r > 1, Lambda in [0,1),
  /// R >= 0, shocked rate >= 0.
  void validate() const;
};

/// Per-bank balance sheet. Accounting identity:
/// lent + liquid + illiquid = borrowed + senior + net_worth.
struct BalanceSheet {
  double liquid = 0.0;             // lambda_i
  double illiquid = 0.0;           // iota_i
  double senior = 0.0;             // s_i, may be negative when f < Lambda
  double interbank_borrowed = 0.0; // b_i
  double interbank_lent = 0.0;     // l_i
  double net_worth = 0.0;          // K_i

  double assets() const { return interbank_lent + liquid + illiquid; }
  double liabilities() const { return interbank_borrowed + senior; }
};

/// Builds sheets with the fixed ratios f = liquid/assets and
/// Lambda = net worth/assets, no illiquid assets. With lent total l_i this
/// gives assets l_i/(1-f), liquid f l_i/(1-f), net worth Lambda l_i/(1-f)
/// and senior = assets - net worth - borrowed. On undirected unit-loan
/// graphs l_i = b_i = k_i and the sheet reduces to
///   liquid = f k/(1-f), senior = (f-Lambda) k/(1-f), net worth = Lambda k/(1-f).
std::vector<BalanceSheet> build_sheets(const NetworkGraph& g,
                                       const FinancialParams& params);

/// Investment profit rho_i = (R_i - 1) max{borrowed + senior, borrowed}.
/// The max applies the negative-senior rule: a bank never earns on a
/// negative deposit base.
double profit(const BalanceSheet& sheet, double gross_rate);

}  // namespace contagion
