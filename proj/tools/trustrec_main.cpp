// Command-line driver: ingestion -> trust -> training -> evaluation, with a
// flat key=value configuration file and per-run flag overrides.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trustrec/dataset.hpp"
#include "trustrec/evaluation.hpp"
#include "trustrec/factorization.hpp"
#include "trustrec/mtm.hpp"
#include "trustrec/synth.hpp"
#include "trustrec/trustgraph.hpp"

namespace {

using namespace trustrec;
namespace fs = std::filesystem;

struct RunConfig {
  std::string data_dir;
  std::string schema = "positive-only";
  int min_ratings = 0;
  std::string tags;  // comma-separated category filter; empty keeps everything

  double test_fraction = 0.1;
  int folds = 5;
  int k = 10;
  std::uint64_t seed = 42;

  std::string algorithm = "locabalplus";
  std::string ablation = "full";
  std::string alpha_grid = "0,0.1,0.3,0.5,0.7,0.9";
  std::string beta_grid = "0,0.1,0.3,0.5,0.7,1.0";
  std::optional<double> alpha;  // fixed value collapses the grid to one cell
  std::optional<double> beta;

  int latent_factors = 50;
  double lambda = 0.05;
  double learning_rate = 0.01;
  int epochs = 100;
  double init_scale = 0.1;

  int k_neighbors = 40;
  int min_overlap = 2;

  std::string error_scope = "recommended";  // or "all-test"
  int threads = 0;
  std::string out = "out";
};

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) values.push_back(std::stod(cell));
  }
  return values;
}

std::set<std::string> parse_tags(const std::string& csv) {
  std::set<std::string> tags;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) tags.insert(cell);
  }
  return tags;
}

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data_dir") cfg.data_dir = value;
  else if (key == "schema") cfg.schema = value;
  else if (key == "min_ratings") cfg.min_ratings = std::stoi(value);
  else if (key == "tags") cfg.tags = value;
  else if (key == "test_fraction") cfg.test_fraction = std::stod(value);
  else if (key == "folds") cfg.folds = std::stoi(value);
  else if (key == "k") cfg.k = std::stoi(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "algorithm" || key == "variant") cfg.algorithm = value;
  else if (key == "ablation") cfg.ablation = value;
  else if (key == "alpha_grid") cfg.alpha_grid = value;
  else if (key == "beta_grid") cfg.beta_grid = value;
  else if (key == "alpha") cfg.alpha = std::stod(value);
  else if (key == "beta") cfg.beta = std::stod(value);
  else if (key == "latent_factors") cfg.latent_factors = std::stoi(value);
  else if (key == "lambda") cfg.lambda = std::stod(value);
  else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
  else if (key == "epochs") cfg.epochs = std::stoi(value);
  else if (key == "init_scale") cfg.init_scale = std::stod(value);
  else if (key == "k_neighbors") cfg.k_neighbors = std::stoi(value);
  else if (key == "min_overlap") cfg.min_overlap = std::stoi(value);
  else if (key == "error_scope") cfg.error_scope = value;
  else if (key == "threads") cfg.threads = std::stoi(value);
  else if (key == "out") cfg.out = value;
  else throw std::runtime_error("unknown configuration key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string trimmed = line.substr(first, last - first + 1);
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    try {
      apply_config_line(cfg, strip(trimmed.substr(0, eq)), strip(trimmed.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

FeedbackSchema schema_of(const RunConfig& cfg) {
  if (cfg.schema == "positive-only") return FeedbackSchema::PositiveOnly;
  if (cfg.schema == "positive-negative") return FeedbackSchema::PositiveNegative;
  throw std::runtime_error("unknown schema '" + cfg.schema + "'");
}

Dataset load_and_filter(const RunConfig& cfg) {
  if (cfg.data_dir.empty()) throw std::runtime_error("no data_dir configured");
  Dataset d = load_dataset(DatasetPaths::in_dir(cfg.data_dir), schema_of(cfg));
  const auto tags = parse_tags(cfg.tags);
  if (cfg.min_ratings > 0 || !tags.empty()) d = filter_dataset(d, cfg.min_ratings, tags);
  return d;
}

ExperimentParams experiment_params(const RunConfig& cfg) {
  ExperimentParams p;
  p.hp.k = cfg.latent_factors;
  p.hp.lambda = cfg.lambda;
  p.hp.learning_rate = cfg.learning_rate;
  p.hp.epochs = cfg.epochs;
  p.hp.init_scale = cfg.init_scale;
  p.hp.seed = cfg.seed;
  p.knn.k_neighbors = cfg.k_neighbors;
  p.knn.min_overlap = cfg.min_overlap;
  p.knn.source = cfg.algorithm == "u2usocial" ? NeighborSource::Friends : NeighborSource::Similarity;
  p.k = cfg.k;
  p.folds = cfg.folds;
  p.threads = cfg.threads;
  if (cfg.error_scope == "all-test") {
    p.error_scope = ErrorScope::AllTest;
  } else if (cfg.error_scope != "recommended") {
    throw std::runtime_error("unknown error_scope '" + cfg.error_scope + "'");
  }
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

int cmd_ingest(const RunConfig& cfg) {
  const Dataset d = load_and_filter(cfg);
  std::size_t n_reviews = 0, n_tips = 0;
  for (const auto& c : d.contributions) {
    (c.kind == ContributionKind::Review ? n_reviews : n_tips)++;
  }
  char buf[64];
  std::printf("users: %zu\n", d.users.size());
  std::printf("items: %zu\n", d.items.size());
  std::printf("ratings: %zu\n", d.ratings.size());
  std::printf("reviews: %zu\n", n_reviews);
  std::printf("tips: %zu\n", n_tips);
  std::printf("friend_edges: %zu\n", d.friends.size());
  std::snprintf(buf, sizeof buf, "%.10f", d.rating_sparsity());
  std::printf("rating_sparsity: %s\n", buf);
  std::snprintf(buf, sizeof buf, "%.10f", d.friend_sparsity());
  std::printf("friend_sparsity: %s\n", buf);
  return 0;
}

int cmd_trust(const RunConfig& cfg) {
  const Dataset d = load_and_filter(cfg);
  AblationSettings ablation = ablation_config(parse_ablation(cfg.ablation));
  ablation.trust.beta = cfg.beta.value_or(0.0);

  fs::create_directories(cfg.out);
  const SocialGraph graph = build_graph(d);
  PageRankResult pr;
  const PageRankResult* pr_ptr = nullptr;
  if (ablation.trust.flags[TrustConfig::kImp] && graph.n > 0) {
    pr = pagerank(graph);
    pr_ptr = &pr;
    std::ofstream os(cfg.out + "/pagerank.tsv");
    dump_pagerank_tsv(os, graph, pr);
  }
  const TrustScores scores = compute_trust(d, ablation.trust, pr_ptr);
  std::ofstream os(cfg.out + "/trust.tsv");
  dump_trust_tsv(os, d, scores);
  std::printf("wrote %s/trust.tsv (%zu users, %zu rated pairs)\n", cfg.out.c_str(),
              d.users.size(), d.ratings.size());
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const Dataset d = load_and_filter(cfg);
  const Algorithm algorithm = parse_algorithm(cfg.algorithm);
  if (!is_factorization(algorithm)) throw std::runtime_error("train expects a factorization algorithm");
  AblationSettings ablation = ablation_config(parse_ablation(cfg.ablation));

  SplitPlan plan = split_holdout(d, cfg.test_fraction, cfg.seed);
  const TrustContext ctx = build_trust_context(d, algorithm, ablation);
  const ExperimentParams params = experiment_params(cfg);

  double alpha = cfg.alpha.value_or(0.0);
  if (ablation.force_alpha_zero) alpha = 0.0;
  const double beta = cfg.beta.value_or(0.0);

  const TrainData td = make_train_data(d, plan.train);
  SimilarityMatrix sim;
  if (algorithm != Algorithm::MF && alpha > 0) sim = build_similarity(td, ctx.graph);

  ObjectiveSpec spec;
  spec.variant = algorithm == Algorithm::Locabal
                     ? Variant::Locabal
                     : (algorithm == Algorithm::LocabalPlus ? Variant::LocabalPlus : Variant::MF);
  spec.rating_weight = rating_weights(algorithm, td.ratings, ctx, beta, ablation.trust.use_fcontr);
  spec.neighbor_weight = neighbor_weights(algorithm, sim, ctx);

  HyperParams hp = params.hp;
  hp.alpha = alpha;
  TrainResult result = train(td, spec, sim, hp);
  for (const auto& u : d.users) result.model.user_ids.push_back(u.id);
  for (const auto& it : d.items) result.model.item_ids.push_back(it.id);

  fs::create_directories(cfg.out);
  save_model(result.model, cfg.out + "/model.bin");
  {
    std::ofstream os(cfg.out + "/objective.csv");
    os << "epoch,objective\n";
    char buf[64];
    for (std::size_t e = 0; e < result.objective_trace.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%.10g", result.objective_trace[e]);
      os << e << ',' << buf << '\n';
    }
  }
  std::printf("trained %s on %zu ratings: objective %.6f -> %.6f\n", cfg.algorithm.c_str(),
              td.ratings.size(), result.objective_trace.front(), result.objective_trace.back());
  return 0;
}

struct GridInputs {
  Dataset dataset;
  SplitPlan plan;
  AblationSettings ablation;
  TrustContext ctx;
  ExperimentParams params;
  Algorithm algorithm = Algorithm::MF;
  std::vector<double> alphas, betas;
};

GridInputs prepare_grid(const RunConfig& cfg) {
  GridInputs in;
  in.dataset = load_and_filter(cfg);
  in.algorithm = parse_algorithm(cfg.algorithm);
  in.ablation = ablation_config(parse_ablation(cfg.ablation));
  in.plan = split_holdout(in.dataset, cfg.test_fraction, cfg.seed);
  in.ctx = build_trust_context(in.dataset, in.algorithm, in.ablation);
  in.params = experiment_params(cfg);
  in.alphas = cfg.alpha ? std::vector<double>{*cfg.alpha} : parse_grid(cfg.alpha_grid);
  in.betas = cfg.beta ? std::vector<double>{*cfg.beta} : parse_grid(cfg.beta_grid);
  return in;
}

int cmd_grid(const RunConfig& cfg) {
  GridInputs in = prepare_grid(cfg);
  if (!is_factorization(in.algorithm)) throw std::runtime_error("grid expects a factorization algorithm");
  const GridSearchResult grid = grid_search(in.dataset, in.ctx, in.plan, in.algorithm,
                                            in.ablation, in.alphas, in.betas, in.params,
                                            cfg.seed + 1);
  fs::create_directories(cfg.out);
  std::ostringstream os;
  write_grid_csv(os, grid);
  write_file(cfg.out + "/grid.csv", os.str());
  const auto& best = grid.cells[grid.best];
  std::printf("best cell: alpha=%g beta=%g map=%.6f\n", best.alpha, best.beta, best.mean_map);
  return 0;
}

// The full experiment pipeline: split -> trust -> grid search -> final
// evaluation on the holdout, with every artifact written under `out`.
int cmd_eval(const RunConfig& cfg) {
  GridInputs in = prepare_grid(cfg);
  fs::create_directories(cfg.out);

  double alpha = 0.0, beta = 0.0;
  GridSearchResult grid;
  grid.folds = in.params.folds;
  if (is_factorization(in.algorithm)) {
    grid = grid_search(in.dataset, in.ctx, in.plan, in.algorithm, in.ablation, in.alphas,
                       in.betas, in.params, cfg.seed + 1);
    alpha = grid.cells[grid.best].alpha;
    beta = grid.cells[grid.best].beta;
  }
  {
    std::ostringstream os;
    write_grid_csv(os, grid);
    write_file(cfg.out + "/grid.csv", os.str());
  }

  ModelParams model;
  const MetricsReport report =
      evaluate_final(in.dataset, in.ctx, in.plan, in.algorithm, in.ablation, alpha, beta,
                     in.params, is_factorization(in.algorithm) ? &model : nullptr);
  {
    std::ostringstream os;
    write_report_csv(os, std::vector<MetricsReport>{report});
    write_file(cfg.out + "/report.csv", os.str());
  }
  if (is_factorization(in.algorithm)) save_model(model, cfg.out + "/model.bin");

  if (in.ctx.has_pagerank) {
    std::ofstream os(cfg.out + "/pagerank.tsv");
    dump_pagerank_tsv(os, in.ctx.graph, in.ctx.pagerank);
  }
  if (in.algorithm == Algorithm::LocabalPlus) {
    TrustConfig tc = in.ablation.trust;
    tc.beta = beta;
    const TrustScores scores =
        compute_trust(in.dataset, tc, in.ctx.has_pagerank ? &in.ctx.pagerank : nullptr);
    std::ofstream os(cfg.out + "/trust.tsv");
    dump_trust_tsv(os, in.dataset, scores);
  }
  write_file(cfg.out + "/split.txt", serialize_split(in.dataset, in.plan));

  std::printf("%s ablation=%s alpha=%g beta=%g: MAP@%d=%.6f P=%.6f R=%.6f UCov=%.6f\n",
              report.algorithm.c_str(), report.ablation.c_str(), report.alpha, report.beta,
              report.k, report.map, report.p, report.r, report.ucov);
  return 0;
}

int cmd_synth(const RunConfig& cfg, int users, int items) {
  SynthConfig sc;
  sc.n_users = users;
  sc.n_items = items;
  sc.seed = cfg.seed;
  const Dataset d = synth_dataset(sc);
  write_dataset_jsonl(d, cfg.out);
  std::printf("wrote synthetic dataset to %s (%zu users, %zu items, %zu ratings)\n",
              cfg.out.c_str(), d.users.size(), d.items.size(), d.ratings.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trust-aware collaborative filtering toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> data_flag, out_flag, variant_flag, ablation_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<double> alpha_flag, beta_flag;
  std::optional<int> k_flag, threads_flag;
  int synth_users = 200, synth_items = 200;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--data", data_flag, "dataset directory (users/items/reviews/tips/friends .jsonl)");
    sub->add_option("--seed", seed_flag, "random seed");
    sub->add_option("--out", out_flag, "output directory");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--variant", variant_flag, "mf|locabal|locabalplus|u2ucf|u2usocial");
    sub->add_option("--ablation", ablation_flag, "full|noF|noE|noS");
    sub->add_option("--alpha", alpha_flag, "fixed social-regularization weight");
    sub->add_option("--beta", beta_flag, "fixed reputation/feedback balance");
    sub->add_option("--k", k_flag, "recommendation list length");
    sub->add_option("--threads", threads_flag, "grid-search worker threads (0 = auto)");
  };

  auto* ingest = app.add_subcommand("ingest", "load and filter a dataset, print statistics");
  add_common(ingest);
  auto* trust = app.add_subcommand("trust", "compute reputation and trust dumps");
  add_common(trust);
  add_model(trust);
  auto* train_cmd = app.add_subcommand("train", "train one configuration and dump the model");
  add_common(train_cmd);
  add_model(train_cmd);
  auto* grid = app.add_subcommand("grid", "cross-validated grid search on MAP");
  add_common(grid);
  add_model(grid);
  auto* eval = app.add_subcommand("eval", "grid search plus final holdout evaluation");
  add_common(eval);
  add_model(eval);
  auto* synth = app.add_subcommand("synth", "generate a synthetic planted-signal dataset");
  add_common(synth);
  synth->add_option("--users", synth_users, "number of users");
  synth->add_option("--items", synth_items, "number of items");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    // flags win over the file
    if (data_flag) cfg.data_dir = *data_flag;
    if (out_flag) cfg.out = *out_flag;
    if (variant_flag) cfg.algorithm = *variant_flag;
    if (ablation_flag) cfg.ablation = *ablation_flag;
    if (seed_flag) cfg.seed = *seed_flag;
    if (alpha_flag) cfg.alpha = alpha_flag;
    if (beta_flag) cfg.beta = beta_flag;
    if (k_flag) cfg.k = *k_flag;
    if (threads_flag) cfg.threads = *threads_flag;

    if (ingest->parsed()) return cmd_ingest(cfg);
    if (trust->parsed()) return cmd_trust(cfg);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (grid->parsed()) return cmd_grid(cfg);
    if (eval->parsed()) return cmd_eval(cfg);
    if (synth->parsed()) return cmd_synth(cfg, synth_users, synth_items);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
