#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace contagion {

/// One loan: `lender` extended `weight` units of credit to `borrower`.
struct Edge {
  int lender = 0;
  int borrower = 0;
  double weight = 1.0;
};

/// Weighted loan graph. Undirected networks are stored as reciprocal pairs:
/// edge (i, j, w) present iff (j, i, w) is, so every loan is mirrored and
/// lent == borrowed at each node.
struct NetworkGraph {
  int node_count = 0;
  bool directed = false;
  std::vector<Edge> edges;
};

/// Total lent per node: l_i = sum of weights on edges out of i.
Eigen::VectorXd lent_totals(const NetworkGraph& g);

/// Total borrowed per node: b_i = sum of weights on edges into i.
Eigen::VectorXd borrowed_totals(const NetworkGraph& g);

/// Number of distinct neighbours of each node (either edge direction).
Eigen::VectorXi degrees(const NetworkGraph& g);

/// Checks structural invariants: indices in range, positive weights, no
/// self-loops, no duplicate (lender, borrower) pairs, reciprocity when the
/// graph is undirected. Throws std::invalid_argument on violation.
void validate(const NetworkGraph& g);

/// Edge-list text format, the interchange between CLI subcommands:
///   #nodes N directed {0,1}
///   lender borrower weight
void write_edge_list(const NetworkGraph& g, std::ostream& out);
NetworkGraph read_edge_list(std::istream& in);
NetworkGraph read_edge_list_file(const std::string& path);
void write_edge_list_file(const NetworkGraph& g, const std::string& path);

}  // namespace contagion
