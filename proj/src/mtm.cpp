#include "trustrec/mtm.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace trustrec {

int TrustConfig::active_flags() const {
  int n = 0;
  for (bool f : flags) n += f ? 1 : 0;
  return n;
}

AblationSettings ablation_config(Ablation name) {
  AblationSettings s;
  s.name = name;
  switch (name) {
    case Ablation::Full:
      break;
    case Ablation::NoF:  // no feedback on contributions
      s.trust.flags[TrustConfig::kQ] = false;
      s.trust.use_fcontr = false;
      break;
    case Ablation::NoE:  // no endorsements on user profiles
      s.trust.flags[TrustConfig::kElite] = false;
      s.trust.flags[TrustConfig::kLup] = false;
      s.trust.flags[TrustConfig::kOpLeader] = false;
      s.trust.flags[TrustConfig::kVis] = false;
      break;
    case Ablation::NoS:  // no social relations
      s.trust.flags[TrustConfig::kImp] = false;
      s.force_alpha_zero = true;
      break;
  }
  return s;
}

Ablation parse_ablation(const std::string& name) {
  if (name == "full") return Ablation::Full;
  if (name == "noF") return Ablation::NoF;
  if (name == "noE") return Ablation::NoE;
  if (name == "noS") return Ablation::NoS;
  throw std::invalid_argument("unknown ablation '" + name + "'");
}

std::string ablation_name(Ablation name) {
  switch (name) {
    case Ablation::Full: return "full";
    case Ablation::NoF: return "noF";
    case Ablation::NoE: return "noE";
    case Ablation::NoS: return "noS";
  }
  return "full";
}

namespace {

// value / per-item max, 0 when the max is 0
std::vector<double> normalize_by_item_max(std::span<const double> value,
                                          std::span<const int> item_of, int n_items) {
  std::vector<double> item_max(n_items, 0.0);
  for (std::size_t c = 0; c < value.size(); ++c) {
    item_max[item_of[c]] = std::max(item_max[item_of[c]], value[c]);
  }
  std::vector<double> q(value.size(), 0.0);
  for (std::size_t c = 0; c < value.size(); ++c) {
    if (item_max[item_of[c]] > 0.0) q[c] = value[c] / item_max[item_of[c]];
  }
  return q;
}

}  // namespace

std::vector<double> contribution_quality_pos(std::span<const long long> appreciations,
                                             std::span<const int> item_of, int n_items) {
  std::vector<double> value(appreciations.size());
  for (std::size_t c = 0; c < appreciations.size(); ++c) {
    value[c] = static_cast<double>(appreciations[c]);
  }
  return normalize_by_item_max(value, item_of, n_items);
}

std::vector<double> contribution_quality_pn(std::span<const long long> positive,
                                            std::span<const long long> negative,
                                            std::span<const int> item_of, int n_items) {
  std::vector<double> helpfulness(positive.size(), 0.0);
  for (std::size_t c = 0; c < positive.size(); ++c) {
    const long long total = positive[c] + negative[c];
    if (total > 0) {
      helpfulness[c] = static_cast<double>(positive[c]) / static_cast<double>(total);
    }
  }
  return normalize_by_item_max(helpfulness, item_of, n_items);
}

long long yelp_appreciations(const Contribution& c) {
  return c.kind == ContributionKind::Review ? c.useful + c.funny + c.cool : c.likes;
}

std::vector<double> endorsement_score(std::span<const long long> raw) {
  long long mx = 0;
  for (long long r : raw) mx = std::max(mx, r);
  std::vector<double> score(raw.size(), 0.0);
  if (mx > 0) {
    for (std::size_t v = 0; v < raw.size(); ++v) {
      score[v] = static_cast<double>(raw[v]) / static_cast<double>(mx);
    }
  }
  return score;
}

std::vector<double> visibility(std::span<const long long> endorsements,
                               std::span<const long long> contribution_count) {
  long long mx = 0;
  for (long long e : endorsements) mx = std::max(mx, e);
  std::vector<double> vis(endorsements.size(), 0.0);
  if (mx > 0) {
    for (std::size_t v = 0; v < endorsements.size(); ++v) {
      if (contribution_count[v] > 0) {
        vis[v] = static_cast<double>(endorsements[v]) /
                 (static_cast<double>(mx) * static_cast<double>(contribution_count[v]));
        vis[v] = std::min(vis[v], 1.0);
      }
    }
  }
  return vis;
}

std::vector<double> contributor_quality(std::span<const double> contribution_value,
                                        std::span<const int> author_of, int n_users) {
  std::vector<double> sum(n_users, 0.0);
  for (std::size_t c = 0; c < contribution_value.size(); ++c) {
    sum[author_of[c]] += contribution_value[c];
  }
  double mx = 0.0;
  for (double s : sum) mx = std::max(mx, s);
  std::vector<double> q(n_users, 0.0);
  if (mx > 0.0) {
    for (int v = 0; v < n_users; ++v) q[v] = sum[v] / mx;
  }
  return q;
}

const std::vector<double>& IndicatorVector::component(int l) const {
  switch (l) {
    case TrustConfig::kImp: return imp;
    case TrustConfig::kElite: return elite;
    case TrustConfig::kLup: return lup;
    case TrustConfig::kOpLeader: return op_leader;
    case TrustConfig::kVis: return vis;
    case TrustConfig::kQ: return q;
  }
  throw std::out_of_range("indicator index");
}

std::vector<double> contribution_quality(const Dataset& d) {
  const auto n = d.contributions.size();
  std::vector<int> item_of(n);
  for (std::size_t c = 0; c < n; ++c) item_of[c] = d.contributions[c].item;

  if (d.schema == FeedbackSchema::PositiveNegative) {
    std::vector<long long> pos(n), neg(n);
    for (std::size_t c = 0; c < n; ++c) {
      pos[c] = d.contributions[c].positive_votes;
      neg[c] = d.contributions[c].negative_votes;
    }
    return contribution_quality_pn(pos, neg, item_of, static_cast<int>(d.items.size()));
  }

  std::vector<long long> count(n);
  for (std::size_t c = 0; c < n; ++c) count[c] = yelp_appreciations(d.contributions[c]);
  return contribution_quality_pos(count, item_of, static_cast<int>(d.items.size()));
}

IndicatorVector compute_indicators(const Dataset& d, const TrustConfig& cfg,
                                   const PageRankResult* importance_source) {
  const int n_users = static_cast<int>(d.users.size());
  IndicatorVector ind;

  if (cfg.flags[TrustConfig::kImp] && importance_source != nullptr) {
    ind.imp = importance_source->importances();
  } else {
    ind.imp.assign(n_users, 0.0);
  }

  std::vector<long long> elite_years(n_users), compliments(n_users), fans(n_users);
  for (int v = 0; v < n_users; ++v) {
    elite_years[v] = d.users[v].elite_years;
    compliments[v] = d.users[v].profile_compliments();
    fans[v] = d.users[v].fans;
  }
  ind.elite = endorsement_score(elite_years);
  ind.lup = endorsement_score(compliments);
  ind.op_leader = endorsement_score(fans);

  std::vector<long long> n_contributions(n_users, 0);
  for (const auto& c : d.contributions) ++n_contributions[c.user];
  ind.vis = visibility(compliments, n_contributions);

  std::vector<int> author_of(d.contributions.size());
  for (std::size_t c = 0; c < d.contributions.size(); ++c) author_of[c] = d.contributions[c].user;
  std::vector<double> value;
  if (d.schema == FeedbackSchema::PositiveNegative) {
    value = contribution_quality(d);
  } else {
    value.resize(d.contributions.size());
    for (std::size_t c = 0; c < d.contributions.size(); ++c) {
      value[c] = static_cast<double>(yelp_appreciations(d.contributions[c]));
    }
  }
  ind.q = contributor_quality(value, author_of, n_users);

  return ind;
}

std::vector<double> multi_dimensional_reputation(const IndicatorVector& ind,
                                                 const TrustConfig& cfg) {
  const int active = cfg.active_flags();
  if (active == 0) {
    throw std::invalid_argument("multi_dimensional_reputation: every indicator flag is off");
  }
  const std::size_t n_users = ind.elite.size();
  std::vector<double> mgr(n_users, 0.0);
  for (int l = 0; l < 6; ++l) {
    if (!cfg.flags[l]) continue;
    const auto& comp = ind.component(l);
    for (std::size_t v = 0; v < n_users; ++v) mgr[v] += comp[v];
  }
  for (double& m : mgr) m /= active;
  return mgr;
}

PairMap review_fcontr(const Dataset& d) {
  const auto quality = contribution_quality(d);
  PairMap fcontr;
  for (std::size_t c = 0; c < d.contributions.size(); ++c) {
    if (d.contributions[c].kind == ContributionKind::Review) {
      fcontr[pair_key(d.contributions[c].user, d.contributions[c].item)] = quality[c];
    }
  }
  return fcontr;
}

PairMap multi_faceted_trust(const std::vector<double>& mgr, const PairMap& fcontr,
                            const TrustConfig& cfg, std::span<const Rating> known_ratings) {
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) {
    throw std::invalid_argument("multi_faceted_trust: beta must lie in [0,1]");
  }
  const double c = cfg.use_fcontr ? 1.0 : 0.0;
  PairMap mft;
  mft.reserve(known_ratings.size());
  for (const auto& r : known_ratings) {
    const auto key = pair_key(r.user, r.item);
    const auto it = fcontr.find(key);
    const double fc = it == fcontr.end() ? 0.0 : it->second;
    mft[key] = cfg.beta * mgr[r.user] + c * (1.0 - cfg.beta) * fc;
  }
  return mft;
}

TrustScores compute_trust(const Dataset& d, const TrustConfig& cfg,
                          const PageRankResult* importance_source) {
  TrustScores scores;
  scores.mgr = multi_dimensional_reputation(compute_indicators(d, cfg, importance_source), cfg);
  scores.fcontr = review_fcontr(d);
  scores.mft = multi_faceted_trust(scores.mgr, scores.fcontr, cfg, d.ratings);
  return scores;
}

void dump_trust_tsv(std::ostream& os, const Dataset& d, const TrustScores& scores) {
  char buf[96];
  for (std::size_t v = 0; v < d.users.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%.12g", scores.mgr[v]);
    os << d.users[v].id << '\t' << buf << '\n';
  }
  for (const auto& r : d.ratings) {
    const auto key = pair_key(r.user, r.item);
    const auto fc = scores.fcontr.find(key);
    const auto mft = scores.mft.find(key);
    std::snprintf(buf, sizeof buf, "%.12g\t%.12g", fc == scores.fcontr.end() ? 0.0 : fc->second,
                  mft == scores.mft.end() ? 0.0 : mft->second);
    os << d.users[r.user].id << '\t' << d.items[r.item].id << '\t' << buf << '\n';
  }
}

}  // namespace trustrec
