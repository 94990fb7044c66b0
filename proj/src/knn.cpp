#include "trustrec/knn.hpp"

#include <algorithm>
#include <cmath>

#include "trustrec/factorization.hpp"

namespace trustrec {

KnnModel::KnnModel(const TrainData& train, const SocialGraph* friends, NeighborhoodSpec spec)
    : spec_(spec), friends_(friends), global_mean_(train.global_mean) {
  if (spec_.k_neighbors < 1) throw std::invalid_argument("k_neighbors must be >= 1");
  by_user_.resize(train.n_users);
  by_item_.resize(train.n_items);
  mean_.assign(train.n_users, 0.0);
  has_ratings_.assign(train.n_users, false);

  for (const auto& r : train.ratings) {
    by_user_[r.user].emplace_back(r.item, r.value);
    by_item_[r.item].emplace_back(r.user, r.value);
    mean_[r.user] += r.value;
  }
  for (int u = 0; u < train.n_users; ++u) {
    if (!by_user_[u].empty()) {
      has_ratings_[u] = true;
      mean_[u] /= static_cast<double>(by_user_[u].size());
    } else {
      mean_[u] = global_mean_;
    }
  }
}

double KnnModel::user_mean(int user) const {
  if (user < 0 || user >= static_cast<int>(mean_.size())) return global_mean_;
  return mean_[user];
}

double KnnModel::predict(int user, int item) const {
  const double base = user_mean(user);
  if (item < 0 || item >= static_cast<int>(by_item_.size())) {
    return std::clamp(base, 1.0, 5.0);
  }

  struct Neighbor {
    double sim;
    int id;
    double rating;
  };
  std::vector<Neighbor> candidates;
  const bool in_range = user >= 0 && user < static_cast<int>(by_user_.size());
  for (const auto& [v, rating] : by_item_[item]) {
    if (v == user) continue;
    double sim = 0;
    if (spec_.source == NeighborSource::Friends) {
      if (friends_ == nullptr || !in_range || !friends_->linked(user, v)) continue;
      sim = 1.0;
    } else {
      if (!in_range) continue;
      // Pearson counts only with enough co-rated items; non-positive
      // similarities carry no usable signal
      std::size_t overlap = 0;
      {
        std::size_t i = 0, j = 0;
        const auto& a = by_user_[user];
        const auto& b = by_user_[v];
        while (i < a.size() && j < b.size()) {
          if (a[i].first < b[j].first) {
            ++i;
          } else if (b[j].first < a[i].first) {
            ++j;
          } else {
            ++overlap;
            ++i;
            ++j;
          }
        }
      }
      if (overlap < static_cast<std::size_t>(spec_.min_overlap)) continue;
      sim = pearson(by_user_[user], by_user_[v]);
      if (sim <= 0.0) continue;
    }
    candidates.push_back(Neighbor{sim, v, rating});
  }

  double pred = base;
  if (!candidates.empty()) {
    std::sort(candidates.begin(), candidates.end(), [](const Neighbor& a, const Neighbor& b) {
      if (a.sim != b.sim) return a.sim > b.sim;
      return a.id < b.id;
    });
    if (candidates.size() > static_cast<std::size_t>(spec_.k_neighbors)) {
      candidates.resize(static_cast<std::size_t>(spec_.k_neighbors));
    }
    double num = 0, den = 0;
    for (const auto& nb : candidates) {
      num += nb.sim * (nb.rating - mean_[nb.id]);
      den += std::abs(nb.sim);
    }
    pred = base + num / den;
  }
  return std::clamp(pred, 1.0, 5.0);
}

}  // namespace trustrec
