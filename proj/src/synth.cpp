#include "trustrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "trustrec/rng.hpp"

namespace trustrec {

namespace {

constexpr double kTau = 6.283185307179586;

std::string padded_id(char prefix, int index, int width) {
  const std::string digits = std::to_string(index);
  std::string out(1, prefix);
  for (int p = static_cast<int>(digits.size()); p < width; ++p) out += '0';
  out += digits;
  return out;
}

int id_width(int count) {
  int w = 1;
  for (int v = count - 1; v >= 10; v /= 10) ++w;
  return w;
}

}  // namespace

Dataset synth_dataset(const SynthConfig& cfg) {
  Rng rng(cfg.seed);
  const int uw = id_width(cfg.n_users);
  const int iw = id_width(cfg.n_items);
  const int n_noisy = static_cast<int>(std::llround(cfg.noisy_fraction * cfg.n_users));

  // Planted 2-d structure: item positions on the unit circle, reliable users
  // with preference directions; affinity decides the true rating.
  std::vector<double> item_angle(cfg.n_items);
  for (int i = 0; i < cfg.n_items; ++i) item_angle[i] = rng.uniform(0.0, kTau);
  std::vector<double> user_angle(cfg.n_users, 0.0);
  std::vector<bool> noisy(cfg.n_users, false);

  DatasetBuilder b(FeedbackSchema::PositiveOnly);

  for (int u = 0; u < cfg.n_users; ++u) {
    noisy[u] = u < n_noisy;  // ids are shuffled implicitly by the angle draw below
    user_angle[u] = rng.uniform(0.0, kTau);

    User user;
    user.id = padded_id('u', u, uw);
    if (!noisy[u]) {
      // noisy raters keep the all-zero profile: no elite status, no
      // compliments, no fans
      user.elite_years = rng.int_in(3, 9);
      user.compliments_more = rng.int_in(15, 60);
      user.compliments_thanks = rng.int_in(15, 60);
      user.compliments_great_writer = rng.int_in(10, 40);
      user.fans = rng.int_in(8, 45);
    }
    b.add_user(std::move(user));
  }

  for (int i = 0; i < cfg.n_items; ++i) {
    Item item;
    item.id = padded_id('i', i, iw);
    item.tags = {"Hotels"};
    b.add_item(std::move(item));
  }

  std::vector<int> all_items(cfg.n_items);
  std::iota(all_items.begin(), all_items.end(), 0);

  for (int u = 0; u < cfg.n_users; ++u) {
    const int quota = std::min(noisy[u] ? cfg.noisy_ratings_per_user : cfg.ratings_per_user,
                               cfg.n_items);
    std::vector<int> picks = all_items;
    rng.shuffle(picks);
    picks.resize(static_cast<std::size_t>(quota));
    std::sort(picks.begin(), picks.end());

    for (int i : picks) {
      int rating;
      long long useful = 0, funny = 0, cool = 0;
      if (noisy[u]) {
        rating = static_cast<int>(rng.int_in(1, 5));  // feedback stays zero
      } else {
        const double affinity = std::cos(user_angle[u] - item_angle[i]);  // [-1, 1]
        const double value = 3.0 + 2.0 * affinity + rng.uniform(-0.3, 0.3);
        rating = static_cast<int>(std::clamp(std::llround(value), 1LL, 5LL));
        useful = rng.int_in(24, 40);
        funny = rng.int_in(0, 4);
        cool = rng.int_in(0, 4);
      }
      b.add_review(padded_id('u', u, uw), padded_id('i', i, iw), rating, useful, funny, cool);
      if ((u + i) % 23 == 0) {
        b.add_tip(padded_id('u', u, uw), padded_id('i', i, iw), noisy[u] ? 0 : rng.int_in(1, 5));
      }
    }
  }

  // Reliable users befriend like-minded reliable users (nearest preference
  // angles); noisy users have no social presence at all.
  std::vector<int> reliable;
  for (int u = 0; u < cfg.n_users; ++u) {
    if (!noisy[u]) reliable.push_back(u);
  }
  std::sort(reliable.begin(), reliable.end(),
            [&](int a, int bb) { return user_angle[a] < user_angle[bb]; });
  std::set<std::pair<int, int>> edges;
  const int hops = std::min<int>(3, std::max<int>(1, static_cast<int>(reliable.size()) - 1));
  for (std::size_t pos = 0; pos < reliable.size(); ++pos) {
    for (int h = 1; h <= hops; ++h) {
      int a = reliable[pos];
      int bb = reliable[(pos + static_cast<std::size_t>(h)) % reliable.size()];
      if (a == bb) continue;
      if (a > bb) std::swap(a, bb);
      edges.emplace(a, bb);
    }
  }
  for (const auto& [a, bb] : edges) {
    b.add_friend(padded_id('u', a, uw), padded_id('u', bb, uw));
  }

  return b.build();
}

void write_dataset_jsonl(const Dataset& d, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  using nlohmann::json;

  {
    std::ofstream os(dir + "/users.jsonl");
    for (const auto& u : d.users) {
      json j{{"user_id", u.id},
             {"elite_years", u.elite_years},
             {"compliments",
              {{"more", u.compliments_more},
               {"thanks", u.compliments_thanks},
               {"great_writer", u.compliments_great_writer}}},
             {"fans", u.fans}};
      os << j.dump() << '\n';
    }
  }
  {
    std::ofstream os(dir + "/items.jsonl");
    for (const auto& it : d.items) {
      os << json{{"item_id", it.id}, {"tags", it.tags}}.dump() << '\n';
    }
  }
  {
    std::ofstream os(dir + "/reviews.jsonl");
    for (const auto& c : d.contributions) {
      if (c.kind != ContributionKind::Review) continue;
      json j{{"user_id", d.users[c.user].id},
             {"item_id", d.items[c.item].id},
             {"rating", c.rating}};
      if (d.schema == FeedbackSchema::PositiveNegative) {
        j["positive_votes"] = c.positive_votes;
        j["negative_votes"] = c.negative_votes;
      } else {
        j["useful"] = c.useful;
        j["funny"] = c.funny;
        j["cool"] = c.cool;
      }
      os << j.dump() << '\n';
    }
  }
  {
    std::ofstream os(dir + "/tips.jsonl");
    for (const auto& c : d.contributions) {
      if (c.kind != ContributionKind::Tip) continue;
      os << json{{"user_id", d.users[c.user].id},
                 {"item_id", d.items[c.item].id},
                 {"like", c.likes}}
                .dump()
         << '\n';
    }
  }
  {
    std::ofstream os(dir + "/friends.jsonl");
    for (const auto& f : d.friends) {
      os << json{{"a", d.users[f.a].id}, {"b", d.users[f.b].id}}.dump() << '\n';
    }
  }
}

}  // namespace trustrec
