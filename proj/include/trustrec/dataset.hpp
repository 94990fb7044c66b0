#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace trustrec {

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Whether contribution feedback is positive-only counts (appreciations) or
// explicit positive/negative vote pairs.
enum class FeedbackSchema { PositiveOnly, PositiveNegative };

enum class ContributionKind { Review, Tip };

struct User {
  std::string id;
  long long elite_years = 0;
  long long compliments_more = 0;
  long long compliments_thanks = 0;
  long long compliments_great_writer = 0;
  long long fans = 0;

  long long profile_compliments() const {
    return compliments_more + compliments_thanks + compliments_great_writer;
  }
};

struct Item {
  std::string id;
  std::vector<std::string> tags;
};

// One review or tip. Reviews carry a rating in [1,5] plus useful/funny/cool
// counts; tips carry a like count and no rating. positive/negative vote pairs
// are only present under FeedbackSchema::PositiveNegative.
struct Contribution {
  int user = -1;
  int item = -1;
  ContributionKind kind = ContributionKind::Review;
  int rating = 0;
  long long useful = 0;
  long long funny = 0;
  long long cool = 0;
  long long likes = 0;
  long long positive_votes = 0;
  long long negative_votes = 0;
};

// Unordered friend pair, canonicalized to a < b over user indices.
struct FriendEdge {
  int a = -1;
  int b = -1;
};

struct Rating {
  int user = -1;
  int item = -1;
  double value = 0.0;
};

// Key for a (user, item) cell.
constexpr std::int64_t pair_key(int user, int item) {
  return (static_cast<std::int64_t>(user) << 32) |
         static_cast<std::uint32_t>(item);
}

using PairMap = std::unordered_map<std::int64_t, double>;

// Immutable after construction; shared read-only by all downstream modules.
// Users, items, contributions, friends and ratings are kept in canonical
// sorted order, so index-based iteration is deterministic.
class Dataset {
 public:
  FeedbackSchema schema = FeedbackSchema::PositiveOnly;
  std::vector<User> users;                  // sorted by id
  std::vector<Item> items;                  // sorted by id
  std::vector<Contribution> contributions;  // sorted by (user, item, kind)
  std::vector<FriendEdge> friends;          // sorted by (a, b)
  std::vector<Rating> ratings;              // the known-rating set, sorted by (user, item)

  int user_index(const std::string& id) const;
  int item_index(const std::string& id) const;

  double rating_sparsity() const;  // 1 - |ratings| / (|users| * |items|)
  double friend_sparsity() const;  // 1 - |friend pairs| / |users|^2

 private:
  std::unordered_map<std::string, int> user_idx_;
  std::unordered_map<std::string, int> item_idx_;
  friend class DatasetBuilder;
};

// Incremental construction with eager invariant checks. Users and items must
// be registered before the contributions and friend edges that reference
// them; build() freezes everything into canonical order.
class DatasetBuilder {
 public:
  explicit DatasetBuilder(FeedbackSchema schema = FeedbackSchema::PositiveOnly);

  void add_user(User u);
  void add_item(Item it);
  void add_review(const std::string& user_id, const std::string& item_id, int rating,
                  long long useful, long long funny, long long cool);
  void add_review_votes(const std::string& user_id, const std::string& item_id, int rating,
                        long long positive_votes, long long negative_votes);
  void add_tip(const std::string& user_id, const std::string& item_id, long long likes);
  void add_friend(const std::string& a_id, const std::string& b_id);

  Dataset build();

 private:
  int require_user(const std::string& id) const;
  int require_item(const std::string& id) const;
  void add_contribution(Contribution c, const std::string& user_id, const std::string& item_id);

  Dataset d_;
  std::set<std::tuple<int, int, ContributionKind>> contribution_keys_;
  std::set<std::pair<int, int>> friend_keys_;
};

struct DatasetPaths {
  std::string users;
  std::string items;
  std::string reviews;
  std::string tips;
  std::string friends;

  static DatasetPaths in_dir(const std::string& dir);
};

// Parses the five JSON-Lines files. Errors carry "<file>:<line>: <reason>".
Dataset load_dataset(const DatasetPaths& paths, FeedbackSchema schema);

// Keeps items carrying at least one of `category_tags` (all items when the
// set is empty), then users with >= min_ratings reviews on surviving items.
// Contributions and friend edges are restricted to what survives.
Dataset filter_dataset(const Dataset& d, int min_ratings,
                       const std::set<std::string>& category_tags);

struct SplitPlan {
  std::vector<Rating> train;  // sorted by (user, item)
  std::vector<Rating> test;   // sorted by (user, item)
  std::vector<int> fold;      // parallel to train; empty until folds assigned
  int n_folds = 0;
};

// Uniform holdout over the known ratings; |test| = round(fraction * |O|).
SplitPlan split_holdout(const Dataset& d, double test_fraction, std::uint64_t seed);

// Fold assignment over n training pairs; sizes differ by at most one.
std::vector<int> kfold(std::size_t n, int k, std::uint64_t seed);

void assign_kfold(SplitPlan& plan, int k, std::uint64_t seed);

// Plain-text lines "user_id\titem_id\t{train|test|fold:<n>}".
std::string serialize_split(const Dataset& d, const SplitPlan& plan);

// Training view consumed by the factorization and knn modules.
struct TrainData {
  int n_users = 0;
  int n_items = 0;
  std::vector<Rating> ratings;  // sorted by (user, item)
  double global_mean = 3.0;     // scale midpoint when there are no ratings
};

TrainData make_train_data(const Dataset& d, std::vector<Rating> ratings);

}  // namespace trustrec
