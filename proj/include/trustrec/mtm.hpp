#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "trustrec/dataset.hpp"
#include "trustrec/trustgraph.hpp"

namespace trustrec {

// Compositional switches for the trust fusion. `flags` holds C_1..C_6 for the
// importance, elite, profile-liking, opinion-leader, visibility and
// contributor-quality indicators; `use_fcontr` is the C switch that gates
// per-contribution feedback inside the per-rating fusion.
struct TrustConfig {
  enum Index { kImp = 0, kElite, kLup, kOpLeader, kVis, kQ };

  double beta = 0.0;
  bool use_fcontr = true;
  std::array<bool, 6> flags{true, true, true, true, true, true};

  int active_flags() const;
};

enum class Ablation { Full, NoF, NoE, NoS };

struct AblationSettings {
  Ablation name = Ablation::Full;
  TrustConfig trust;
  bool force_alpha_zero = false;  // NoS also disables social regularization
};

AblationSettings ablation_config(Ablation name);
Ablation parse_ablation(const std::string& name);
std::string ablation_name(Ablation name);

// --- contribution quality -------------------------------------------------

// Positive-only feedback: quality = count / max count among the contributions
// on the same item; 0 whenever that max is 0. Inputs are parallel arrays over
// contributions.
std::vector<double> contribution_quality_pos(std::span<const long long> appreciations,
                                             std::span<const int> item_of, int n_items);

// Positive/negative feedback: helpfulness = pos / (pos + neg) (0 on an empty
// vote set), then normalized by the best helpfulness on the same item.
std::vector<double> contribution_quality_pn(std::span<const long long> positive,
                                            std::span<const long long> negative,
                                            std::span<const int> item_of, int n_items);

// Yelp mapping: useful + funny + cool for reviews, like for tips.
long long yelp_appreciations(const Contribution& c);

// --- per-user indicators ----------------------------------------------------

// score = count / global max count; all zero when the max is 0. Feeding elite
// years, profile compliments or fan counts yields the elite / lup / opLeader
// indicators respectively.
std::vector<double> endorsement_score(std::span<const long long> raw);

// vis = endorsements / (global max endorsements * |contributions of user|),
// 0 for users with no contributions, clamped to <= 1.
std::vector<double> visibility(std::span<const long long> endorsements,
                               std::span<const long long> contribution_count);

// q = sum of the user's per-contribution values / best such sum in the
// community. Values are raw appreciations under positive-only feedback and
// per-contribution quality under positive/negative feedback.
std::vector<double> contributor_quality(std::span<const double> contribution_value,
                                        std::span<const int> author_of, int n_users);

struct IndicatorVector {
  std::vector<double> imp, elite, lup, op_leader, vis, q;

  const std::vector<double>& component(int l) const;
};

// Computes the six indicators for every user. `importance_source` supplies
// imp and may be null when the imp flag is off (imp is then all zero).
IndicatorVector compute_indicators(const Dataset& d, const TrustConfig& cfg,
                                   const PageRankResult* importance_source);

// mgr_v = sum of flagged indicators / number of flags on.
std::vector<double> multi_dimensional_reputation(const IndicatorVector& ind,
                                                 const TrustConfig& cfg);

// Quality of every contribution under the dataset's feedback schema.
std::vector<double> contribution_quality(const Dataset& d);

// (user, item) -> quality of the review contribution on that pair. A rating
// whose review drew no feedback maps to 0, never "missing".
PairMap review_fcontr(const Dataset& d);

// mft_vi = beta * mgr_v + C * (1 - beta) * fcontr_vi for every pair in O.
PairMap multi_faceted_trust(const std::vector<double>& mgr, const PairMap& fcontr,
                            const TrustConfig& cfg, std::span<const Rating> known_ratings);

struct TrustScores {
  std::vector<double> mgr;  // per user
  PairMap fcontr;           // per rated pair
  PairMap mft;              // per rated pair
};

TrustScores compute_trust(const Dataset& d, const TrustConfig& cfg,
                          const PageRankResult* importance_source);

// "user_id\tmgr" lines followed by "user_id\titem_id\tfcontr\tmft" lines.
void dump_trust_tsv(std::ostream& os, const Dataset& d, const TrustScores& scores);

}  // namespace trustrec
