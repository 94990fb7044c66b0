#pragma once

#include <span>
#include <utility>
#include <vector>

#include "trustrec/dataset.hpp"
#include "trustrec/trustgraph.hpp"

namespace trustrec {

enum class NeighborSource { Similarity, Friends };

struct NeighborhoodSpec {
  int k_neighbors = 40;
  int min_overlap = 2;  // co-rated items required before Pearson is trusted
  NeighborSource source = NeighborSource::Similarity;
};

// User-to-user neighborhood predictor over a fixed training set. Similarity
// mode weighs mean-centered neighbor deviations by Pearson correlation
// (non-positive similarities are dropped); friends mode gives every friend
// weight 1. Predictions are clamped to [1,5].
class KnnModel {
 public:
  KnnModel(const TrainData& train, const SocialGraph* friends, NeighborhoodSpec spec);

  double predict(int user, int item) const;

  double user_mean(int user) const;  // global mean for users with no ratings

 private:
  NeighborhoodSpec spec_;
  const SocialGraph* friends_;
  double global_mean_;
  std::vector<std::vector<std::pair<int, double>>> by_user_;  // (item, rating) sorted
  std::vector<std::vector<std::pair<int, double>>> by_item_;  // (user, rating) sorted
  std::vector<double> mean_;
  std::vector<bool> has_ratings_;
};

}  // namespace trustrec
