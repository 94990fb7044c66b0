#include "trustrec/trustgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace trustrec {

std::size_t SocialGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& adj : out) total += adj.size();
  return total;
}

bool SocialGraph::linked(int from, int to) const {
  const auto& adj = out[from];
  return std::binary_search(adj.begin(), adj.end(), to);
}

SocialGraph build_graph(std::span<const FriendEdge> friends, int n_users) {
  SocialGraph g;
  g.n = n_users;
  g.out.resize(n_users);
  for (const auto& f : friends) {
    if (f.a < 0 || f.a >= n_users || f.b < 0 || f.b >= n_users) {
      throw std::out_of_range("build_graph: friend edge references unknown user");
    }
    g.out[f.a].push_back(f.b);
    g.out[f.b].push_back(f.a);
  }
  for (auto& adj : g.out) std::sort(adj.begin(), adj.end());
  return g;
}

SocialGraph build_graph(const Dataset& d) {
  SocialGraph g = build_graph(d.friends, static_cast<int>(d.users.size()));
  g.node_ids.reserve(d.users.size());
  for (const auto& u : d.users) g.node_ids.push_back(u.id);
  return g;
}

double importance_of_rank(int rank) { return 1.0 / (1.0 + std::log(static_cast<double>(rank))); }

double PageRankResult::importance(int v) const { return importance_of_rank(rank[v]); }

std::vector<double> PageRankResult::importances() const {
  std::vector<double> imp(rank.size());
  for (std::size_t v = 0; v < rank.size(); ++v) imp[v] = importance_of_rank(rank[v]);
  return imp;
}

PageRankResult pagerank(const SocialGraph& g, const PageRankOptions& opt) {
  if (g.n == 0) throw std::invalid_argument("pagerank: empty graph");
  if (!(opt.damping > 0.0 && opt.damping < 1.0)) {
    throw std::invalid_argument("pagerank: damping must lie in (0,1)");
  }
  if (!(opt.tol > 0.0)) throw std::invalid_argument("pagerank: tol must be positive");

  const int n = g.n;
  const double d = opt.damping;
  std::vector<double> x(n, 1.0 / n), next(n);

  std::vector<int> outdeg(n);
  for (int v = 0; v < n; ++v) outdeg[v] = static_cast<int>(g.out[v].size());

  PageRankResult res;
  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    double dangling = 0.0;
    for (int v = 0; v < n; ++v) {
      if (outdeg[v] == 0) dangling += x[v];
    }
    const double base = (1.0 - d) / n + d * dangling / n;
    std::fill(next.begin(), next.end(), base);
    for (int v = 0; v < n; ++v) {
      if (outdeg[v] == 0) continue;
      const double share = d * x[v] / outdeg[v];
      for (int w : g.out[v]) next[w] += share;
    }
    double delta = 0.0;
    for (int v = 0; v < n; ++v) delta += std::abs(next[v] - x[v]);
    x.swap(next);
    if (delta < opt.tol) {
      ++res.iterations;
      break;
    }
  }

  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& xi : x) xi /= sum;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  // ordinal ranking: descending score, ties by ascending node index
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });

  res.score = std::move(x);
  res.rank.resize(n);
  for (int pos = 0; pos < n; ++pos) res.rank[order[pos]] = pos + 1;
  return res;
}

void dump_pagerank_tsv(std::ostream& os, const SocialGraph& g, const PageRankResult& pr) {
  char buf[96];
  for (int v = 0; v < g.n; ++v) {
    const std::string& id = g.node_ids.empty() ? std::to_string(v) : g.node_ids[v];
    std::snprintf(buf, sizeof buf, "%.12g\t%d\t%.12g", pr.score[v], pr.rank[v], pr.importance(v));
    os << id << '\t' << buf << '\n';
  }
}

}  // namespace trustrec
