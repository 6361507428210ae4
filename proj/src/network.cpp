#include "contagion/network.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace contagion {

Eigen::VectorXd lent_totals(const NetworkGraph& g) {
  Eigen::VectorXd l = Eigen::VectorXd::Zero(g.node_count);
  for (const Edge& e : g.edges) l[e.lender] += e.weight;
  return l;
}

Eigen::VectorXd borrowed_totals(const NetworkGraph& g) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.node_count);
  for (const Edge& e : g.edges) b[e.borrower] += e.weight;
  return b;
}

Eigen::VectorXi degrees(const NetworkGraph& g) {
  std::vector<std::unordered_set<int>> nbrs(g.node_count);
  for (const Edge& e : g.edges) {
    nbrs[e.lender].insert(e.borrower);
    nbrs[e.borrower].insert(e.lender);
  }
  Eigen::VectorXi k(g.node_count);
  for (int i = 0; i < g.node_count; ++i) k[i] = static_cast<int>(nbrs[i].size());
  return k;
}

void validate(const NetworkGraph& g) {
  if (g.node_count <= 0)
    throw std::invalid_argument("graph must have at least one node");
  std::unordered_map<std::int64_t, double> seen;
  seen.reserve(g.edges.size() * 2);
  const auto key = [&](int a, int b) {
    return static_cast<std::int64_t>(a) * g.node_count + b;
  };
  for (const Edge& e : g.edges) {
    if (e.lender < 0 || e.lender >= g.node_count || e.borrower < 0 ||
        e.borrower >= g.node_count)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.lender == e.borrower)
      throw std::invalid_argument("self-loop not allowed");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument("edge weight must be finite and positive");
    if (!seen.emplace(key(e.lender, e.borrower), e.weight).second)
      throw std::invalid_argument("duplicate (lender, borrower) pair");
  }
  if (!g.directed) {
    for (const Edge& e : g.edges) {
      auto it = seen.find(key(e.borrower, e.lender));
      if (it == seen.end() || it->second != e.weight)
        throw std::invalid_argument(
            "undirected graph must store reciprocal pairs of equal weight");
    }
  }
}

void write_edge_list(const NetworkGraph& g, std::ostream& out) {
  out << "#nodes " << g.node_count << " directed " << (g.directed ? 1 : 0)
      << '\n';
  out << std::setprecision(17);
  for (const Edge& e : g.edges)
    out << e.lender << ' ' << e.borrower << ' ' << e.weight << '\n';
}

NetworkGraph read_edge_list(std::istream& in) {
  NetworkGraph g;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("edge list: empty input");
  {
    std::istringstream header(line);
    std::string tag_nodes, tag_directed;
    int directed_flag = -1;
    header >> tag_nodes >> g.node_count >> tag_directed >> directed_flag;
    if (header.fail() || tag_nodes != "#nodes" || tag_directed != "directed" ||
        (directed_flag != 0 && directed_flag != 1))
      throw std::invalid_argument(
          "edge list: expected header '#nodes N directed {0,1}'");
    g.directed = directed_flag == 1;
  }
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Edge e;
    row >> e.lender >> e.borrower >> e.weight;
    if (row.fail())
      throw std::invalid_argument("edge list: bad row '" + line + "'");
    g.edges.push_back(e);
  }
  validate(g);
  return g;
}

NetworkGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  return read_edge_list(in);
}

void write_edge_list_file(const NetworkGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write graph file: " + path);
  write_edge_list(g, out);
}

}  // namespace contagion
