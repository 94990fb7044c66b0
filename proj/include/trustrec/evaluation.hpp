#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trustrec/dataset.hpp"
#include "trustrec/factorization.hpp"
#include "trustrec/knn.hpp"
#include "trustrec/mtm.hpp"
#include "trustrec/trustgraph.hpp"

namespace trustrec {

enum class Algorithm { MF, Locabal, LocabalPlus, U2UCF, U2USocial };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
bool is_factorization(Algorithm a);

using Predictor = std::function<double(int user, int item)>;

struct RankedItem {
  int item = -1;
  double score = 0.0;
};

// Items the predictor scores above the relevance threshold (rating > 3),
// descending by score with ties on ascending item id, truncated to k.
struct RankedList {
  int user = -1;
  std::vector<RankedItem> items;
};

RankedList recommend(const Predictor& predict, int user,
                     std::span<const std::pair<int, double>> candidates, int k);

// Held-out ratings grouped per user; users and item lists sorted.
struct TestSet {
  std::vector<int> users;
  std::vector<std::vector<std::pair<int, double>>> items;  // (item, true rating)

  double truth(std::size_t user_pos, int item) const;
};

TestSet make_test_set(std::span<const Rating> ratings);

struct MetricsReport {
  double p = 0, r = 0, f1 = 0, map = 0, rmse = 0, mae = 0, mrr = 0, ucov = 0;
  int k = 10;
  // config echo
  std::string algorithm = "-";
  std::string ablation = "-";
  double alpha = 0, beta = 0;
};

// What RMSE/MAE average over: the predicted scores of recommended items
// (the default) or every held-out prediction.
enum class ErrorScope { Recommended, AllTest };

// Users whose recommendation list is empty are excluded from the P/R/MAP/MRR
// averages and only lower user coverage; F1 is the harmonic mean of the
// aggregate P and R; RMSE/MAE run over the predicted scores of recommended
// items against their held-out ratings.
MetricsReport metrics_at_k(std::span<const RankedList> lists, const TestSet& truth, int k);

// recommend() for every test user, then metrics_at_k.
MetricsReport evaluate(const Predictor& predict, const TestSet& truth, int k,
                       ErrorScope scope = ErrorScope::Recommended);

// Immutable per-experiment inputs shared across grid cells: the social graph
// plus whatever reputation data the algorithm variant consumes.
struct TrustContext {
  SocialGraph graph;
  bool has_pagerank = false;
  PageRankResult pagerank;
  std::vector<double> mgr;  // LOCABAL+ only
  PairMap fcontr;           // LOCABAL+ only
};

TrustContext build_trust_context(const Dataset& d, Algorithm algorithm,
                                 const AblationSettings& ablation);

// Per-rating objective weights for one grid cell.
std::vector<double> rating_weights(Algorithm algorithm, std::span<const Rating> ratings,
                                   const TrustContext& ctx, double beta, bool use_fcontr);

std::vector<double> neighbor_weights(Algorithm algorithm, const SimilarityMatrix& sim,
                                     const TrustContext& ctx);

struct GridCell {
  double alpha = 0;
  double beta = 0;
  double mean_map = 0;
  bool diverged = false;
};

struct GridSearchResult {
  std::vector<GridCell> cells;
  std::size_t best = 0;  // argmax mean_map, ties to lower alpha then lower beta
  int folds = 0;
};

struct ExperimentParams {
  HyperParams hp;
  NeighborhoodSpec knn;
  int k = 10;  // list length for @k metrics
  int folds = 5;
  int threads = 0;  // 0 = hardware concurrency
  ErrorScope error_scope = ErrorScope::Recommended;
};

// Exhaustive (alpha, beta) search by mean MAP over cross-validation folds.
// Cells whose training diverges score -inf and the search continues. The
// alpha grid collapses to {0} when the ablation switches social
// regularization off, and beta to {0} for variants without multi-faceted
// trust.
GridSearchResult grid_search(const Dataset& d, const TrustContext& ctx,
                             const SplitPlan& plan, Algorithm algorithm,
                             const AblationSettings& ablation,
                             std::vector<double> alphas, std::vector<double> betas,
                             const ExperimentParams& params, std::uint64_t fold_seed);

// Trains on the full training split at fixed (alpha, beta) and reports
// metrics on the held-out test pairs. `model_out`, when given, receives the
// trained factorization model.
MetricsReport evaluate_final(const Dataset& d, const TrustContext& ctx,
                             const SplitPlan& plan, Algorithm algorithm,
                             const AblationSettings& ablation, double alpha, double beta,
                             const ExperimentParams& params,
                             ModelParams* model_out = nullptr);

// CSV "algorithm,ablation,alpha,beta,k,P,R,F1,MAP,RMSE,MAE,MRR,UCov".
void write_report_csv(std::ostream& os, std::span<const MetricsReport> rows);

// CSV "alpha,beta,fold,map", one row per grid cell; the fold column records
// how many folds the mean covers.
void write_grid_csv(std::ostream& os, const GridSearchResult& grid);

}  // namespace trustrec
