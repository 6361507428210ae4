#include "contagion/balance.hpp"

#include <cmath>
#include <stdexcept>

namespace contagion {

void FinancialParams::validate() const {
  if (!(liquidity_ratio >= 0.0 && liquidity_ratio < 1.0))
    throw std::domain_error("liquidity ratio f must lie in [0, 1)");
  if (!(leverage_ratio >= 0.0 && leverage_ratio < 1.0))
    throw std::domain_error("leverage ratio must lie in [0, 1)");
  if (!(interbank_rate > 1.0))
    throw std::domain_error("interbank gross rate r must exceed 1");
  if (!(external_rate >= 0.0))
    throw std::domain_error("external gross rate R must be >= 0");
  if (!(shocked_rate >= 0.0))
    throw std::domain_error("shocked gross rate must be >= 0");
}

std::vector<BalanceSheet> build_sheets(const NetworkGraph& g,
                                       const FinancialParams& params) {
  params.validate();
  const double f = params.liquidity_ratio;
  const double leverage = params.leverage_ratio;

  const Eigen::VectorXd lent = lent_totals(g);
  const Eigen::VectorXd borrowed = borrowed_totals(g);

  std::vector<BalanceSheet> sheets(g.node_count);
  for (int i = 0; i < g.node_count; ++i) {
    BalanceSheet& sh = sheets[i];
    sh.interbank_lent = lent(i);
    sh.interbank_borrowed = borrowed(i);
    const double assets = lent(i) / (1.0 - f);
    sh.liquid = f * assets;
    sh.illiquid = 0.0;
    sh.net_worth = leverage * assets;
    // identity lent + liquid = borrowed + senior + net_worth fixes senior
    sh.senior = assets - sh.net_worth - borrowed(i);
  }
  return sheets;
}

double profit(const BalanceSheet& sheet, double gross_rate) {
  const double deposits = sheet.interbank_borrowed + sheet.senior;
  // negative senior shrinks nothing: the bank still invests its borrowings
  const double invested = std::max(deposits, sheet.interbank_borrowed);
  return (gross_rate - 1.0) * invested;
}

}  // namespace contagion
