#pragma once

#include <cstdint>

#include "contagion/network.hpp"

namespace contagion {

/// Cayley tree: node 0 is the root with degree k, interior nodes have degree
/// k, leaves sit at distance `depth`. Shell d holds k(k-1)^(d-1) nodes, so
/// N = 1 + sum_d k(k-1)^(d-1). All loans are reciprocal with unit weight.
/// Requires k >= 2, depth >= 1.
NetworkGraph gen_cayley_tree(int k, int depth);

/// Erdos-Renyi: each pair (ordered pair when directed) is a unit loan with
/// probability phi = z / (n - 1). Requires n >= 2 and 0 <= z <= n - 1.
/// Deterministic for a fixed seed.
NetworkGraph gen_er(int n, double z, std::uint64_t seed, bool directed = false);

/// Barabasi-Albert preferential attachment. Starts from a complete graph on
/// the m initial nodes; each new node attaches to m distinct existing nodes
/// with probability proportional to their current degree. Minimum degree is
/// m and the mean degree tends to 2m. Requires n > m >= 1.
///
/// When directed, each attachment is a loan from the chosen target (lender)
/// to the new node (borrower); the reverse loan is added with probability
/// recip_prob. recip_prob = 1 reproduces the undirected graph.
NetworkGraph gen_ba(int n, int m, std::uint64_t seed, bool directed = false,
                    double recip_prob = 1.0);

/// Node count of gen_cayley_tree(k, depth) without building it.
std::int64_t cayley_node_count(int k, int depth);

}  // namespace contagion
