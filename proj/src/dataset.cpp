#include "trustrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "trustrec/rng.hpp"

namespace trustrec {

using nlohmann::json;

int Dataset::user_index(const std::string& id) const {
  auto it = user_idx_.find(id);
  return it == user_idx_.end() ? -1 : it->second;
}

int Dataset::item_index(const std::string& id) const {
  auto it = item_idx_.find(id);
  return it == item_idx_.end() ? -1 : it->second;
}

double Dataset::rating_sparsity() const {
  if (users.empty() || items.empty()) return 0.0;
  return 1.0 - static_cast<double>(ratings.size()) /
                   (static_cast<double>(users.size()) * static_cast<double>(items.size()));
}

double Dataset::friend_sparsity() const {
  if (users.empty()) return 0.0;
  return 1.0 - static_cast<double>(friends.size()) /
                   (static_cast<double>(users.size()) * static_cast<double>(users.size()));
}

DatasetBuilder::DatasetBuilder(FeedbackSchema schema) { d_.schema = schema; }

void DatasetBuilder::add_user(User u) {
  if (u.id.empty()) throw DatasetError("user with empty id");
  if (u.elite_years < 0 || u.compliments_more < 0 || u.compliments_thanks < 0 ||
      u.compliments_great_writer < 0 || u.fans < 0) {
    throw DatasetError("negative count for user '" + u.id + "'");
  }
  if (!d_.user_idx_.emplace(u.id, static_cast<int>(d_.users.size())).second) {
    throw DatasetError("duplicate user id '" + u.id + "'");
  }
  d_.users.push_back(std::move(u));
}

void DatasetBuilder::add_item(Item it) {
  if (it.id.empty()) throw DatasetError("item with empty id");
  if (!d_.item_idx_.emplace(it.id, static_cast<int>(d_.items.size())).second) {
    throw DatasetError("duplicate item id '" + it.id + "'");
  }
  d_.items.push_back(std::move(it));
}

int DatasetBuilder::require_user(const std::string& id) const {
  int idx = d_.user_index(id);
  if (idx < 0) throw DatasetError("unknown user '" + id + "'");
  return idx;
}

int DatasetBuilder::require_item(const std::string& id) const {
  int idx = d_.item_index(id);
  if (idx < 0) throw DatasetError("unknown item '" + id + "'");
  return idx;
}

void DatasetBuilder::add_contribution(Contribution c, const std::string& user_id,
                                      const std::string& item_id) {
  c.user = require_user(user_id);
  c.item = require_item(item_id);
  if (!contribution_keys_.emplace(c.user, c.item, c.kind).second) {
    const char* kind = c.kind == ContributionKind::Review ? "review" : "tip";
    throw DatasetError("duplicate contribution (" + user_id + ", " + item_id + ", " + kind + ")");
  }
  d_.contributions.push_back(c);
}

void DatasetBuilder::add_review(const std::string& user_id, const std::string& item_id,
                                int rating, long long useful, long long funny, long long cool) {
  if (rating < 1 || rating > 5) {
    throw DatasetError("rating out of range: " + std::to_string(rating));
  }
  if (useful < 0 || funny < 0 || cool < 0) throw DatasetError("negative appreciation count");
  Contribution c;
  c.kind = ContributionKind::Review;
  c.rating = rating;
  c.useful = useful;
  c.funny = funny;
  c.cool = cool;
  add_contribution(c, user_id, item_id);
}

void DatasetBuilder::add_review_votes(const std::string& user_id, const std::string& item_id,
                                      int rating, long long positive_votes,
                                      long long negative_votes) {
  if (rating < 1 || rating > 5) {
    throw DatasetError("rating out of range: " + std::to_string(rating));
  }
  if (positive_votes < 0 || negative_votes < 0) throw DatasetError("negative vote count");
  Contribution c;
  c.kind = ContributionKind::Review;
  c.rating = rating;
  c.positive_votes = positive_votes;
  c.negative_votes = negative_votes;
  add_contribution(c, user_id, item_id);
}

void DatasetBuilder::add_tip(const std::string& user_id, const std::string& item_id,
                             long long likes) {
  if (likes < 0) throw DatasetError("negative like count");
  Contribution c;
  c.kind = ContributionKind::Tip;
  c.likes = likes;
  add_contribution(c, user_id, item_id);
}

void DatasetBuilder::add_friend(const std::string& a_id, const std::string& b_id) {
  int a = require_user(a_id);
  int b = require_user(b_id);
  if (a == b) throw DatasetError("self friendship '" + a_id + "'");
  if (a > b) std::swap(a, b);
  if (!friend_keys_.emplace(a, b).second) {
    throw DatasetError("duplicate friend edge (" + a_id + ", " + b_id + ")");
  }
  d_.friends.push_back(FriendEdge{a, b});
}

Dataset DatasetBuilder::build() {
  // Entities arrived in arbitrary order; rebuild indices over id-sorted users
  // and items so index order is canonical everywhere downstream.
  std::vector<int> user_order(d_.users.size());
  std::iota(user_order.begin(), user_order.end(), 0);
  std::sort(user_order.begin(), user_order.end(),
            [&](int a, int b) { return d_.users[a].id < d_.users[b].id; });
  std::vector<int> user_new(d_.users.size());
  for (std::size_t pos = 0; pos < user_order.size(); ++pos) user_new[user_order[pos]] = static_cast<int>(pos);

  std::vector<int> item_order(d_.items.size());
  std::iota(item_order.begin(), item_order.end(), 0);
  std::sort(item_order.begin(), item_order.end(),
            [&](int a, int b) { return d_.items[a].id < d_.items[b].id; });
  std::vector<int> item_new(d_.items.size());
  for (std::size_t pos = 0; pos < item_order.size(); ++pos) item_new[item_order[pos]] = static_cast<int>(pos);

  std::vector<User> users(d_.users.size());
  for (std::size_t old = 0; old < d_.users.size(); ++old) users[user_new[old]] = std::move(d_.users[old]);
  d_.users = std::move(users);
  std::vector<Item> items(d_.items.size());
  for (std::size_t old = 0; old < d_.items.size(); ++old) items[item_new[old]] = std::move(d_.items[old]);
  d_.items = std::move(items);

  d_.user_idx_.clear();
  for (std::size_t pos = 0; pos < d_.users.size(); ++pos) d_.user_idx_[d_.users[pos].id] = static_cast<int>(pos);
  d_.item_idx_.clear();
  for (std::size_t pos = 0; pos < d_.items.size(); ++pos) d_.item_idx_[d_.items[pos].id] = static_cast<int>(pos);

  for (auto& c : d_.contributions) {
    c.user = user_new[c.user];
    c.item = item_new[c.item];
  }
  std::sort(d_.contributions.begin(), d_.contributions.end(), [](const Contribution& a, const Contribution& b) {
    return std::tie(a.user, a.item, a.kind) < std::tie(b.user, b.item, b.kind);
  });

  for (auto& f : d_.friends) {
    f.a = user_new[f.a];
    f.b = user_new[f.b];
    if (f.a > f.b) std::swap(f.a, f.b);
  }
  std::sort(d_.friends.begin(), d_.friends.end(),
            [](const FriendEdge& a, const FriendEdge& b) { return std::tie(a.a, a.b) < std::tie(b.a, b.b); });

  d_.ratings.clear();
  for (const auto& c : d_.contributions) {
    if (c.kind == ContributionKind::Review) {
      d_.ratings.push_back(Rating{c.user, c.item, static_cast<double>(c.rating)});
    }
  }

  return std::move(d_);
}

DatasetPaths DatasetPaths::in_dir(const std::string& dir) {
  DatasetPaths p;
  p.users = dir + "/users.jsonl";
  p.items = dir + "/items.jsonl";
  p.reviews = dir + "/reviews.jsonl";
  p.tips = dir + "/tips.jsonl";
  p.friends = dir + "/friends.jsonl";
  return p;
}

namespace {

long long get_count(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0;
  if (!it->is_number_integer()) throw DatasetError(std::string(key) + " is not an integer");
  return it->get<long long>();
}

std::string get_id(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw DatasetError(std::string("missing ") + key);
  return it->get<std::string>();
}

// Applies `fn` to every JSON object line; errors gain a file:line prefix.
template <class Fn>
void for_each_line(const std::string& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw DatasetError(path + ":" + std::to_string(lineno) + ": parse error: " + e.what());
    } catch (const DatasetError& e) {
      throw DatasetError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

Dataset load_dataset(const DatasetPaths& paths, FeedbackSchema schema) {
  DatasetBuilder b(schema);

  for_each_line(paths.users, [&](const json& j) {
    User u;
    u.id = get_id(j, "user_id");
    u.elite_years = get_count(j, "elite_years");
    u.fans = get_count(j, "fans");
    if (auto it = j.find("compliments"); it != j.end() && it->is_object()) {
      u.compliments_more = get_count(*it, "more");
      u.compliments_thanks = get_count(*it, "thanks");
      u.compliments_great_writer = get_count(*it, "great_writer");
    }
    b.add_user(std::move(u));
  });

  for_each_line(paths.items, [&](const json& j) {
    Item it;
    it.id = get_id(j, "item_id");
    if (auto t = j.find("tags"); t != j.end() && t->is_array()) {
      for (const auto& tag : *t) it.tags.push_back(tag.get<std::string>());
    }
    b.add_item(std::move(it));
  });

  for_each_line(paths.reviews, [&](const json& j) {
    auto user = get_id(j, "user_id");
    auto item = get_id(j, "item_id");
    auto rating_it = j.find("rating");
    if (rating_it == j.end() || !rating_it->is_number_integer()) {
      throw DatasetError("review without integer rating");
    }
    int rating = rating_it->get<int>();
    if (schema == FeedbackSchema::PositiveNegative) {
      b.add_review_votes(user, item, rating, get_count(j, "positive_votes"),
                         get_count(j, "negative_votes"));
    } else {
      b.add_review(user, item, rating, get_count(j, "useful"), get_count(j, "funny"),
                   get_count(j, "cool"));
    }
  });

  for_each_line(paths.tips, [&](const json& j) {
    b.add_tip(get_id(j, "user_id"), get_id(j, "item_id"), get_count(j, "like"));
  });

  for_each_line(paths.friends, [&](const json& j) {
    b.add_friend(get_id(j, "a"), get_id(j, "b"));
  });

  return b.build();
}

Dataset filter_dataset(const Dataset& d, int min_ratings,
                       const std::set<std::string>& category_tags) {
  if (min_ratings < 0) throw DatasetError("min_ratings must be >= 0");

  // Pass 1: items by category tag.
  std::vector<bool> keep_item(d.items.size(), category_tags.empty());
  if (!category_tags.empty()) {
    for (std::size_t it = 0; it < d.items.size(); ++it) {
      for (const auto& tag : d.items[it].tags) {
        if (category_tags.count(tag)) {
          keep_item[it] = true;
          break;
        }
      }
    }
  }

  // Pass 2: users by review count on surviving items.
  std::vector<int> review_count(d.users.size(), 0);
  for (const auto& c : d.contributions) {
    if (c.kind == ContributionKind::Review && keep_item[c.item]) ++review_count[c.user];
  }
  std::vector<bool> keep_user(d.users.size());
  for (std::size_t u = 0; u < d.users.size(); ++u) keep_user[u] = review_count[u] >= min_ratings;

  DatasetBuilder b(d.schema);
  for (std::size_t u = 0; u < d.users.size(); ++u) {
    if (keep_user[u]) b.add_user(d.users[u]);
  }
  for (std::size_t it = 0; it < d.items.size(); ++it) {
    if (keep_item[it]) b.add_item(d.items[it]);
  }
  for (const auto& c : d.contributions) {
    if (!keep_user[c.user] || !keep_item[c.item]) continue;
    const auto& uid = d.users[c.user].id;
    const auto& iid = d.items[c.item].id;
    if (c.kind == ContributionKind::Tip) {
      b.add_tip(uid, iid, c.likes);
    } else if (d.schema == FeedbackSchema::PositiveNegative) {
      b.add_review_votes(uid, iid, c.rating, c.positive_votes, c.negative_votes);
    } else {
      b.add_review(uid, iid, c.rating, c.useful, c.funny, c.cool);
    }
  }
  for (const auto& f : d.friends) {
    if (keep_user[f.a] && keep_user[f.b]) b.add_friend(d.users[f.a].id, d.users[f.b].id);
  }
  return b.build();
}

namespace {

void sort_ratings(std::vector<Rating>& v) {
  std::sort(v.begin(), v.end(), [](const Rating& a, const Rating& b) {
    return std::tie(a.user, a.item) < std::tie(b.user, b.item);
  });
}

}  // namespace

SplitPlan split_holdout(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DatasetError("test_fraction must lie in (0,1)");
  }
  if (d.ratings.size() < 2) throw DatasetError("need at least 2 ratings to split");

  std::vector<std::size_t> order(d.ratings.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(d.ratings.size())));

  SplitPlan plan;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    (pos < n_test ? plan.test : plan.train).push_back(d.ratings[order[pos]]);
  }
  sort_ratings(plan.train);
  sort_ratings(plan.test);
  return plan;
}

std::vector<int> kfold(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw DatasetError("kfold: k must be >= 2");
  if (static_cast<std::size_t>(k) > n) throw DatasetError("kfold: k exceeds training size");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<int> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = static_cast<int>(pos % k);
  return fold;
}

void assign_kfold(SplitPlan& plan, int k, std::uint64_t seed) {
  plan.fold = kfold(plan.train.size(), k, seed);
  plan.n_folds = k;
}

std::string serialize_split(const Dataset& d, const SplitPlan& plan) {
  std::ostringstream os;
  for (std::size_t pos = 0; pos < plan.train.size(); ++pos) {
    const auto& r = plan.train[pos];
    os << d.users[r.user].id << '\t' << d.items[r.item].id << '\t';
    if (plan.fold.empty()) {
      os << "train";
    } else {
      os << "fold:" << plan.fold[pos];
    }
    os << '\n';
  }
  for (const auto& r : plan.test) {
    os << d.users[r.user].id << '\t' << d.items[r.item].id << "\ttest\n";
  }
  return os.str();
}

TrainData make_train_data(const Dataset& d, std::vector<Rating> ratings) {
  TrainData td;
  td.n_users = static_cast<int>(d.users.size());
  td.n_items = static_cast<int>(d.items.size());
  td.ratings = std::move(ratings);
  sort_ratings(td.ratings);
  if (!td.ratings.empty()) {
    double sum = 0;
    for (const auto& r : td.ratings) sum += r.value;
    td.global_mean = sum / static_cast<double>(td.ratings.size());
  }
  return td;
}

}  // namespace trustrec
