#include "trustrec/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace trustrec {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::MF: return "mf";
    case Algorithm::Locabal: return "locabal";
    case Algorithm::LocabalPlus: return "locabalplus";
    case Algorithm::U2UCF: return "u2ucf";
    case Algorithm::U2USocial: return "u2usocial";
  }
  return "mf";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mf") return Algorithm::MF;
  if (name == "locabal") return Algorithm::Locabal;
  if (name == "locabalplus") return Algorithm::LocabalPlus;
  if (name == "u2ucf") return Algorithm::U2UCF;
  if (name == "u2usocial") return Algorithm::U2USocial;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

bool is_factorization(Algorithm a) {
  return a == Algorithm::MF || a == Algorithm::Locabal || a == Algorithm::LocabalPlus;
}

RankedList recommend(const Predictor& predict, int user,
                     std::span<const std::pair<int, double>> candidates, int k) {
  if (k < 1) throw std::invalid_argument("recommend: k must be >= 1");
  RankedList list;
  list.user = user;
  for (const auto& [item, truth] : candidates) {
    (void)truth;
    const double score = predict(user, item);
    if (score > 3.0) list.items.push_back(RankedItem{item, score});
  }
  std::sort(list.items.begin(), list.items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  });
  if (list.items.size() > static_cast<std::size_t>(k)) list.items.resize(static_cast<std::size_t>(k));
  return list;
}

TestSet make_test_set(std::span<const Rating> ratings) {
  TestSet t;
  for (const auto& r : ratings) {
    if (t.users.empty() || t.users.back() != r.user) {
      t.users.push_back(r.user);
      t.items.emplace_back();
    }
    t.items.back().emplace_back(r.item, r.value);
  }
  return t;
}

double TestSet::truth(std::size_t user_pos, int item) const {
  const auto& row = items[user_pos];
  auto it = std::lower_bound(row.begin(), row.end(), item,
                             [](const std::pair<int, double>& p, int i) { return p.first < i; });
  if (it == row.end() || it->first != item) {
    throw std::out_of_range("no ground-truth rating for requested item");
  }
  return it->second;
}

MetricsReport metrics_at_k(std::span<const RankedList> lists, const TestSet& truth, int k) {
  if (k < 1) throw std::invalid_argument("metrics_at_k: k must be >= 1");
  if (lists.size() != truth.users.size()) {
    throw std::invalid_argument("metrics_at_k: one ranked list per test user expected");
  }

  MetricsReport rep;
  rep.k = k;

  std::size_t covered = 0;
  double sum_p = 0, sum_r = 0, sum_ap = 0, sum_rr = 0;
  double sq_err = 0, abs_err = 0;
  std::size_t n_pred = 0;

  for (std::size_t pos = 0; pos < lists.size(); ++pos) {
    const auto& list = lists[pos];
    if (list.items.empty()) continue;  // counted only against coverage
    ++covered;

    std::size_t n_relevant = 0;
    for (const auto& [item, value] : truth.items[pos]) {
      (void)item;
      if (value > 3.0) ++n_relevant;
    }

    std::size_t hits = 0;
    double ap = 0;
    double rr = 0;
    for (std::size_t x = 0; x < list.items.size(); ++x) {
      const double value = truth.truth(pos, list.items[x].item);
      const bool relevant = value > 3.0;
      if (relevant) {
        ++hits;
        ap += static_cast<double>(hits) / static_cast<double>(x + 1);
        if (rr == 0) rr = 1.0 / static_cast<double>(x + 1);
      }
      const double err = list.items[x].score - value;
      sq_err += err * err;
      abs_err += std::abs(err);
      ++n_pred;
    }

    sum_p += static_cast<double>(hits) / static_cast<double>(list.items.size());
    if (n_relevant > 0) {
      sum_r += static_cast<double>(hits) / static_cast<double>(n_relevant);
      sum_ap += ap / static_cast<double>(n_relevant);
    }
    sum_rr += rr;
  }

  if (covered > 0) {
    rep.p = sum_p / static_cast<double>(covered);
    rep.r = sum_r / static_cast<double>(covered);
    rep.map = sum_ap / static_cast<double>(covered);
    rep.mrr = sum_rr / static_cast<double>(covered);
  }
  rep.f1 = (rep.p + rep.r) > 0 ? 2.0 * rep.p * rep.r / (rep.p + rep.r) : 0.0;
  if (n_pred > 0) {
    rep.rmse = std::sqrt(sq_err / static_cast<double>(n_pred));
    rep.mae = abs_err / static_cast<double>(n_pred);
  }
  rep.ucov = truth.users.empty()
                 ? 0.0
                 : static_cast<double>(covered) / static_cast<double>(truth.users.size());
  return rep;
}

MetricsReport evaluate(const Predictor& predict, const TestSet& truth, int k, ErrorScope scope) {
  std::vector<RankedList> lists;
  lists.reserve(truth.users.size());
  for (std::size_t pos = 0; pos < truth.users.size(); ++pos) {
    lists.push_back(recommend(predict, truth.users[pos], truth.items[pos], k));
  }
  MetricsReport rep = metrics_at_k(lists, truth, k);
  if (scope == ErrorScope::AllTest) {
    double sq_err = 0, abs_err = 0;
    std::size_t n_pred = 0;
    for (std::size_t pos = 0; pos < truth.users.size(); ++pos) {
      for (const auto& [item, value] : truth.items[pos]) {
        const double err = predict(truth.users[pos], item) - value;
        sq_err += err * err;
        abs_err += std::abs(err);
        ++n_pred;
      }
    }
    rep.rmse = n_pred > 0 ? std::sqrt(sq_err / static_cast<double>(n_pred)) : 0.0;
    rep.mae = n_pred > 0 ? abs_err / static_cast<double>(n_pred) : 0.0;
  }
  return rep;
}

TrustContext build_trust_context(const Dataset& d, Algorithm algorithm,
                                 const AblationSettings& ablation) {
  TrustContext ctx;
  ctx.graph = build_graph(d);

  const bool wants_importance =
      algorithm == Algorithm::Locabal ||
      (algorithm == Algorithm::LocabalPlus && ablation.trust.flags[TrustConfig::kImp]);
  if (wants_importance && ctx.graph.n > 0) {
    ctx.pagerank = pagerank(ctx.graph);
    ctx.has_pagerank = true;
  }

  if (algorithm == Algorithm::LocabalPlus) {
    const auto ind =
        compute_indicators(d, ablation.trust, ctx.has_pagerank ? &ctx.pagerank : nullptr);
    ctx.mgr = multi_dimensional_reputation(ind, ablation.trust);
    ctx.fcontr = review_fcontr(d);
  }
  return ctx;
}

std::vector<double> rating_weights(Algorithm algorithm, std::span<const Rating> ratings,
                                   const TrustContext& ctx, double beta, bool use_fcontr) {
  std::vector<double> w(ratings.size(), 1.0);
  if (algorithm == Algorithm::Locabal) {
    for (std::size_t r = 0; r < ratings.size(); ++r) {
      w[r] = ctx.has_pagerank ? ctx.pagerank.importance(ratings[r].user) : 1.0;
    }
  } else if (algorithm == Algorithm::LocabalPlus) {
    const double c = use_fcontr ? 1.0 : 0.0;
    for (std::size_t r = 0; r < ratings.size(); ++r) {
      const auto it = ctx.fcontr.find(pair_key(ratings[r].user, ratings[r].item));
      const double fc = it == ctx.fcontr.end() ? 0.0 : it->second;
      w[r] = beta * ctx.mgr[ratings[r].user] + c * (1.0 - beta) * fc;
    }
  }
  return w;
}

std::vector<double> neighbor_weights(Algorithm algorithm, const SimilarityMatrix& sim,
                                     const TrustContext& ctx) {
  std::vector<double> w(sim.entries.size(), 1.0);
  if (algorithm == Algorithm::LocabalPlus) {
    for (std::size_t n = 0; n < sim.entries.size(); ++n) w[n] = ctx.mgr[sim.entries[n].z];
  }
  return w;
}

namespace {

Variant to_variant(Algorithm a) {
  switch (a) {
    case Algorithm::Locabal: return Variant::Locabal;
    case Algorithm::LocabalPlus: return Variant::LocabalPlus;
    default: return Variant::MF;
  }
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (std::size_t j = 0; j < n; ++j) body(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next.fetch_add(1); j < n; j = next.fetch_add(1)) body(j);
  };
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// Trains one factorization configuration and reports MAP on the held-out pairs.
double train_and_map(const TrustContext& ctx, Algorithm algorithm,
                     const AblationSettings& ablation, double alpha, double beta,
                     const TrainData& td, const SimilarityMatrix& sim,
                     std::span<const Rating> heldout, const ExperimentParams& params) {
  HyperParams hp = params.hp;
  hp.alpha = alpha;

  ObjectiveSpec spec;
  spec.variant = to_variant(algorithm);
  spec.rating_weight = rating_weights(algorithm, td.ratings, ctx, beta, ablation.trust.use_fcontr);
  spec.neighbor_weight = neighbor_weights(algorithm, sim, ctx);

  const TrainResult result = train(td, spec, sim, hp);
  const TestSet truth = make_test_set(heldout);
  const auto predictor = [&model = result.model](int u, int i) { return predict(model, u, i); };
  return evaluate(predictor, truth, params.k).map;
}

}  // namespace

GridSearchResult grid_search(const Dataset& d, const TrustContext& ctx,
                             const SplitPlan& plan, Algorithm algorithm,
                             const AblationSettings& ablation,
                             std::vector<double> alphas, std::vector<double> betas,
                             const ExperimentParams& params, std::uint64_t fold_seed) {
  if (!is_factorization(algorithm)) {
    throw std::invalid_argument("grid_search applies to factorization algorithms only");
  }
  if (alphas.empty() || betas.empty()) throw std::invalid_argument("grid_search: empty grid");
  if (ablation.force_alpha_zero || algorithm == Algorithm::MF) alphas = {0.0};
  if (algorithm != Algorithm::LocabalPlus) betas = {0.0};

  GridSearchResult res;
  res.folds = params.folds;
  for (double a : alphas) {
    for (double b : betas) res.cells.push_back(GridCell{a, b, 0.0, false});
  }

  const std::vector<int> fold_of = kfold(plan.train.size(), params.folds, fold_seed);

  // shared per-fold training data and similarity entries
  std::vector<TrainData> fold_train(params.folds);
  std::vector<std::vector<Rating>> fold_val(params.folds);
  std::vector<SimilarityMatrix> fold_sim(params.folds);
  const bool social = algorithm != Algorithm::MF && !ablation.force_alpha_zero &&
                      std::any_of(alphas.begin(), alphas.end(), [](double a) { return a > 0; });
  for (int f = 0; f < params.folds; ++f) {
    std::vector<Rating> tr;
    for (std::size_t p = 0; p < plan.train.size(); ++p) {
      (fold_of[p] == f ? fold_val[f] : tr).push_back(plan.train[p]);
    }
    fold_train[f] = make_train_data(d, std::move(tr));
    if (social) fold_sim[f] = build_similarity(fold_train[f], ctx.graph);
  }

  struct Job {
    std::size_t cell;
    int fold;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < res.cells.size(); ++c) {
    for (int f = 0; f < params.folds; ++f) jobs.push_back(Job{c, f});
  }
  std::vector<double> job_map(jobs.size(), 0.0);
  std::vector<std::uint8_t> job_diverged(jobs.size(), 0);

  parallel_for(jobs.size(), params.threads, [&](std::size_t j) {
    const auto [cell, fold] = jobs[j];
    try {
      job_map[j] = train_and_map(ctx, algorithm, ablation, res.cells[cell].alpha,
                                 res.cells[cell].beta, fold_train[fold], fold_sim[fold],
                                 fold_val[fold], params);
    } catch (const TrainingDiverged&) {
      job_diverged[j] = 1;
    }
  });

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    auto& cell = res.cells[jobs[j].cell];
    if (job_diverged[j]) {
      cell.diverged = true;
    } else {
      cell.mean_map += job_map[j];
    }
  }
  for (auto& cell : res.cells) {
    if (cell.diverged) {
      cell.mean_map = -std::numeric_limits<double>::infinity();
    } else {
      cell.mean_map /= static_cast<double>(params.folds);
    }
  }

  res.best = 0;
  for (std::size_t c = 1; c < res.cells.size(); ++c) {
    const auto& cand = res.cells[c];
    const auto& best = res.cells[res.best];
    if (cand.mean_map > best.mean_map ||
        (cand.mean_map == best.mean_map &&
         std::tie(cand.alpha, cand.beta) < std::tie(best.alpha, best.beta))) {
      res.best = c;
    }
  }
  return res;
}

MetricsReport evaluate_final(const Dataset& d, const TrustContext& ctx,
                             const SplitPlan& plan, Algorithm algorithm,
                             const AblationSettings& ablation, double alpha, double beta,
                             const ExperimentParams& params, ModelParams* model_out) {
  if (plan.test.empty()) throw std::invalid_argument("empty split");
  if (ablation.force_alpha_zero) alpha = 0.0;

  const TrainData td = make_train_data(d, plan.train);
  const TestSet truth = make_test_set(plan.test);

  MetricsReport rep;
  if (is_factorization(algorithm)) {
    SimilarityMatrix sim;
    if (algorithm != Algorithm::MF && alpha > 0) sim = build_similarity(td, ctx.graph);

    ObjectiveSpec spec;
    spec.variant = to_variant(algorithm);
    spec.rating_weight = rating_weights(algorithm, td.ratings, ctx, beta, ablation.trust.use_fcontr);
    spec.neighbor_weight = neighbor_weights(algorithm, sim, ctx);

    HyperParams hp = params.hp;
    hp.alpha = alpha;
    TrainResult result = train(td, spec, sim, hp);
    const auto predictor = [&model = result.model](int u, int i) { return predict(model, u, i); };
    rep = evaluate(predictor, truth, params.k, params.error_scope);
    if (model_out != nullptr) {
      for (const auto& u : d.users) result.model.user_ids.push_back(u.id);
      for (const auto& it : d.items) result.model.item_ids.push_back(it.id);
      *model_out = std::move(result.model);
    }
  } else {
    NeighborhoodSpec spec = params.knn;
    spec.source =
        algorithm == Algorithm::U2USocial ? NeighborSource::Friends : NeighborSource::Similarity;
    const KnnModel knn(td, &ctx.graph, spec);
    const auto predictor = [&knn](int u, int i) { return knn.predict(u, i); };
    rep = evaluate(predictor, truth, params.k, params.error_scope);
  }

  rep.algorithm = algorithm_name(algorithm);
  rep.ablation = algorithm == Algorithm::LocabalPlus ? ablation_name(ablation.name) : "-";
  rep.alpha = is_factorization(algorithm) && algorithm != Algorithm::MF ? alpha : 0.0;
  rep.beta = algorithm == Algorithm::LocabalPlus ? beta : 0.0;
  return rep;
}

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& os, std::span<const MetricsReport> rows) {
  os << "algorithm,ablation,alpha,beta,k,P,R,F1,MAP,RMSE,MAE,MRR,UCov\n";
  for (const auto& r : rows) {
    os << r.algorithm << ',' << r.ablation << ',' << fmt(r.alpha, "%g") << ','
       << fmt(r.beta, "%g") << ',' << r.k << ',' << fmt(r.p) << ',' << fmt(r.r) << ','
       << fmt(r.f1) << ',' << fmt(r.map) << ',' << fmt(r.rmse) << ',' << fmt(r.mae) << ','
       << fmt(r.mrr) << ',' << fmt(r.ucov) << '\n';
  }
}

void write_grid_csv(std::ostream& os, const GridSearchResult& grid) {
  os << "alpha,beta,fold,map\n";
  for (const auto& cell : grid.cells) {
    os << fmt(cell.alpha, "%g") << ',' << fmt(cell.beta, "%g") << ',' << grid.folds << ','
       << fmt(cell.mean_map) << '\n';
  }
}

}  // namespace trustrec
