#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trustrec/dataset.hpp"

namespace trustrec {

// Directed social graph over user indices 0..n-1. Graphs built from friend
// edges are symmetric (each unordered pair becomes two directed links), but
// pagerank() accepts arbitrary digraphs.
struct SocialGraph {
  int n = 0;
  std::vector<std::vector<int>> out;  // sorted adjacency lists, no self-loops
  std::vector<std::string> node_ids;  // user ids, index order (may be empty)

  std::size_t edge_count() const;
  bool linked(int from, int to) const;
};

SocialGraph build_graph(std::span<const FriendEdge> friends, int n_users);
SocialGraph build_graph(const Dataset& d);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-8;  // L1 change between sweeps
  int max_iter = 100;
};

// Scores sum to 1; rank is ordinal over descending score with ties broken by
// ascending node index (== ascending user id for graphs built from a Dataset).
struct PageRankResult {
  std::vector<double> score;
  std::vector<int> rank;  // 1-based
  int iterations = 0;

  double importance(int v) const;
  std::vector<double> importances() const;
};

PageRankResult pagerank(const SocialGraph& g, const PageRankOptions& opt = {});

// importance = 1 / (1 + ln(rank)); equals 1 exactly at rank 1.
double importance_of_rank(int rank);

// Lines "user_id\tscore\trank\timportance".
void dump_pagerank_tsv(std::ostream& os, const SocialGraph& g, const PageRankResult& pr);

}  // namespace trustrec
