#include "contagion/netgen.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

namespace {

void add_reciprocal(NetworkGraph& g, int a, int b) {
  g.edges.push_back({a, b, 1.0});
  g.edges.push_back({b, a, 1.0});
}

}  // namespace

std::int64_t cayley_node_count(int k, int depth) {
  if (k < 2) throw std::domain_error("cayley tree requires degree k >= 2");
  if (depth < 1) throw std::domain_error("cayley tree requires depth >= 1");
  std::int64_t total = 1;
  std::int64_t shell = k;  // k (k-1)^(d-1) nodes at distance d
  for (int d = 1; d <= depth; ++d) {
    total += shell;
    if (d < depth) {
      if (shell > std::numeric_limits<std::int64_t>::max() / (k - 1))
        throw std::overflow_error("cayley tree too large");
      shell *= k - 1;
    }
  }
  return total;
}

NetworkGraph gen_cayley_tree(int k, int depth) {
  const std::int64_t n = cayley_node_count(k, depth);
  if (n > std::numeric_limits<int>::max())
    throw std::overflow_error("cayley tree too large");

  NetworkGraph g;
  g.node_count = static_cast<int>(n);
  g.directed = false;
  g.edges.reserve(2 * (n - 1));

  // Breadth-first layout: node 0 is the root, shells are contiguous.
  int next = 1;
  std::vector<int> frontier{0};
  for (int d = 1; d <= depth; ++d) {
    std::vector<int> shell;
    for (int parent : frontier) {
      const int children = (parent == 0) ? k : k - 1;
      for (int c = 0; c < children; ++c) {
        add_reciprocal(g, parent, next);
        shell.push_back(next);
        ++next;
      }
    }
    frontier = std::move(shell);
  }
  return g;
}

NetworkGraph gen_er(int n, double z, std::uint64_t seed, bool directed) {
  if (n < 2) throw std::domain_error("ER graph requires n >= 2");
  if (z < 0.0 || z > n - 1)
    throw std::domain_error("ER mean degree must satisfy 0 <= z <= n-1");
  const double phi = z / (n - 1);

  NetworkGraph g;
  g.node_count = n;
  g.directed = directed;
  Rng rng(seed);

  // Geometric skip sampling over the pair sequence: after each accepted
  // pair, jump past a Geometric(phi) number of rejected ones. One draw per
  // edge instead of one per pair. Row i holds slots j = 0..row_last(i);
  // directed rows cover every target but i, undirected rows the pairs
  // (i, i+1+j).
  const auto row_last = [&](std::int64_t i) {
    return directed ? static_cast<std::int64_t>(n) - 2
                    : static_cast<std::int64_t>(n) - 2 - i;
  };
  const auto emit_pairs = [&](auto&& accept) {
    const std::int64_t rows = n;
    std::int64_t i = 0;
    std::int64_t j = -1;  // position before the first slot of row i
    const double log1mphi = std::log1p(-phi);
    std::int64_t advance = 0;
    while (i < rows) {
      if (phi >= 1.0) {
        advance = 1;
      } else if (phi <= 0.0) {
        return;
      } else {
        const double u = rng.uniform_double();
        const double s = std::floor(std::log1p(-u) / log1mphi);
        if (s > 4.0e18) return;  // beyond any pair sequence we can hold
        advance = static_cast<std::int64_t>(s) + 1;
      }
      while (i < rows && advance > 0) {
        const std::int64_t room = row_last(i) - j;
        if (advance <= room) {
          j += advance;
          advance = 0;
          accept(static_cast<int>(i), static_cast<int>(j));
        } else {
          advance -= room;
          ++i;
          j = -1;
        }
      }
    }
  };

  if (directed) {
    // slot j in row i targets j, with the diagonal skipped
    emit_pairs([&](int i, int j) {
      const int target = j + (j >= i ? 1 : 0);
      g.edges.push_back({i, target, 1.0});
    });
  } else {
    emit_pairs([&](int i, int j) { add_reciprocal(g, i, i + 1 + j); });
  }
  return g;
}

NetworkGraph gen_ba(int n, int m, std::uint64_t seed, bool directed,
                    double recip_prob) {
  if (m < 1) throw std::domain_error("BA graph requires m >= 1");
  if (n <= m) throw std::domain_error("BA graph requires n > m");
  if (recip_prob < 0.0 || recip_prob > 1.0)
    throw std::domain_error("reciprocity probability must lie in [0, 1]");

  NetworkGraph g;
  g.node_count = n;
  g.directed = directed;
  Rng rng(seed);

  // stubs holds one entry per attachment-edge endpoint, so a uniform draw
  // from it is degree-proportional.
  std::vector<int> stubs;
  stubs.reserve(2 * (static_cast<std::size_t>(m) * (m - 1) +
                     static_cast<std::size_t>(n - m) * m));

  const auto link = [&](int lender, int borrower) {
    if (directed) {
      g.edges.push_back({lender, borrower, 1.0});
      if (recip_prob >= 1.0 || rng.bernoulli(recip_prob))
        g.edges.push_back({borrower, lender, 1.0});
    } else {
      add_reciprocal(g, lender, borrower);
    }
  };

  // complete graph over the m initial nodes
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      link(i, j);
      stubs.push_back(i);
      stubs.push_back(j);
    }

  std::vector<int> chosen;
  chosen.reserve(m);
  for (int v = m; v < n; ++v) {
    chosen.clear();
    std::unordered_set<int> chosen_set;
    while (static_cast<int>(chosen.size()) < m) {
      int target;
      if (stubs.empty()) {
        // m = 1 start: no edges yet, fall back to a uniform draw
        target = static_cast<int>(rng.uniform_index(v));
      } else {
        target = stubs[rng.uniform_index(stubs.size())];
      }
      if (chosen_set.insert(target).second) chosen.push_back(target);
    }
    // new node borrows from each chosen lender
    for (int target : chosen) {
      link(target, v);
      stubs.push_back(target);
      stubs.push_back(v);
    }
  }
  return g;
}

}  // namespace contagion
