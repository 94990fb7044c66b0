// Acceptance checklist for the toolkit. Each criterion prints exactly one
// PASS/FAIL line; the process exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "trustrec/dataset.hpp"
#include "trustrec/evaluation.hpp"
#include "trustrec/factorization.hpp"
#include "trustrec/knn.hpp"
#include "trustrec/mtm.hpp"
#include "trustrec/rng.hpp"
#include "trustrec/synth.hpp"
#include "trustrec/trustgraph.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace trustrec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd = std::string(TRUSTREC_CLI_PATH) + " " + args + " > " + stdout_path + " 2>&1";
  return std::system(cmd.c_str());
}

// ---------------------------------------------------------------------------
// 1. analytic gradients vs central finite differences

Outcome criterion_gradients() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(80831);
  const double h = 1e-5;
  int instances = 0;

  while (instances < 20) {
    const Variant variant = instances % 3 == 0   ? Variant::MF
                            : instances % 3 == 1 ? Variant::Locabal
                                                 : Variant::LocabalPlus;
    const int n = 2 + static_cast<int>(rng.below(5));
    const int m = 2 + static_cast<int>(rng.below(5));
    const int k = 1 + static_cast<int>(rng.below(3));

    TrainData train;
    train.n_users = n;
    train.n_items = m;
    for (int u = 0; u < n; ++u) {
      for (int i = 0; i < m; ++i) {
        if (rng.next_unit() < 0.5) train.ratings.push_back(Rating{u, i, static_cast<double>(rng.int_in(1, 5))});
      }
    }
    SimilarityMatrix sim;
    if (variant != Variant::MF) {
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          if (rng.next_unit() < 0.5) {
            const double s = rng.next_unit();
            sim.entries.push_back(SimilarityEntry{a, b, s});
            sim.entries.push_back(SimilarityEntry{b, a, s});
          }
        }
      }
    }
    ObjectiveSpec spec = uniform_spec(variant, train.ratings.size(), sim.entries.size());
    for (auto& w : spec.rating_weight) w = rng.next_unit();
    for (auto& w : spec.neighbor_weight) w = rng.next_unit();

    HyperParams hp;
    hp.k = k;
    hp.alpha = variant == Variant::MF ? 0.0 : 0.2 + rng.next_unit();
    hp.lambda = 0.1 * rng.next_unit();
    hp.seed = rng.next_u64();
    hp.init_scale = 0.6;
    ModelParams model = init_model(train, variant, hp);
    ++instances;

    const Gradients grad = gradients(model, spec, train, sim, hp);
    auto objective_at = [&]() { return objective(model, spec, train, sim, hp); };
    auto check_block = [&](std::vector<double>& params, const std::vector<double>& analytic,
                           const char* block) {
      for (std::size_t p = 0; p < params.size(); ++p) {
        const double keep = params[p];
        params[p] = keep + h;
        const double up = objective_at();
        params[p] = keep - h;
        const double down = objective_at();
        params[p] = keep;
        const double fd = (up - down) / (2 * h);
        const double denom = std::max({1.0, std::abs(analytic[p]), std::abs(fd)});
        if (std::abs(analytic[p] - fd) / denom >= 1e-5) {
          out.fail(std::string("partial mismatch in ") + block);
        }
      }
    };
    check_block(model.u, grad.u, "U");
    check_block(model.i, grad.i, "I");
    check_block(model.h, grad.h, "H");
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) out.fail("runtime " + std::to_string(elapsed) + "s exceeds 10s");
  if (out.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "20 instances, 3 variants, %.2fs", elapsed);
    out.detail = buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// 2. LOCABAL+ with unit trust and no social term reproduces the MF trace

Outcome criterion_reduction() {
  Outcome out;
  TrainData td;
  td.n_users = 5;
  td.n_items = 6;
  for (int u = 0; u < 5; ++u) {
    for (int i = 0; i < 6; ++i) {
      if ((u * 7 + i * 3) % 4 != 0) td.ratings.push_back(Rating{u, i, static_cast<double>(1 + (u + 2 * i) % 5)});
    }
  }
  HyperParams hp;
  hp.k = 3;
  hp.alpha = 0.0;
  hp.lambda = 0.1;
  hp.learning_rate = 0.02;
  hp.epochs = 100;
  hp.seed = 424242;

  const SimilarityMatrix none;
  const TrainResult mf = train(td, uniform_spec(Variant::MF, td.ratings.size(), 0), none, hp);
  const TrainResult lp = train(td, uniform_spec(Variant::LocabalPlus, td.ratings.size(), 0), none, hp);

  if (mf.objective_trace.size() != lp.objective_trace.size()) {
    out.fail("trace lengths differ");
    return out;
  }
  double worst = 0;
  for (std::size_t e = 0; e < mf.objective_trace.size(); ++e) {
    worst = std::max(worst, std::abs(mf.objective_trace[e] - lp.objective_trace[e]));
  }
  if (worst > 1e-12) out.fail("max per-epoch gap " + std::to_string(worst));
  if (out.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "100 epochs, max |gap| = %.3g", worst);
    out.detail = buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// 3. trust ranges, exact max-normalization and flag independence

Dataset random_trust_dataset(Rng& rng) {
  const int n_users = 2 + static_cast<int>(rng.below(7));
  const int n_items = 1 + static_cast<int>(rng.below(6));
  DatasetBuilder b;
  for (int u = 0; u < n_users; ++u) {
    User user;
    user.id = "u" + std::to_string(100 + u);
    user.elite_years = rng.int_in(0, 10);
    user.compliments_more = rng.int_in(0, 25);
    user.compliments_thanks = rng.int_in(0, 25);
    user.compliments_great_writer = rng.int_in(0, 25);
    user.fans = rng.int_in(0, 40);
    b.add_user(std::move(user));
  }
  for (int i = 0; i < n_items; ++i) b.add_item(Item{"i" + std::to_string(100 + i), {}});
  for (int u = 0; u < n_users; ++u) {
    for (int i = 0; i < n_items; ++i) {
      const double coin = rng.next_unit();
      if (coin < 0.5) {
        b.add_review("u" + std::to_string(100 + u), "i" + std::to_string(100 + i),
                     static_cast<int>(rng.int_in(1, 5)), rng.int_in(0, 15), rng.int_in(0, 8),
                     rng.int_in(0, 8));
      }
      if (coin > 0.85) {
        b.add_tip("u" + std::to_string(100 + u), "i" + std::to_string(100 + i), rng.int_in(0, 9));
      }
    }
  }
  for (int a = 0; a < n_users; ++a) {
    for (int bb = a + 1; bb < n_users; ++bb) {
      if (rng.next_unit() < 0.3) {
        b.add_friend("u" + std::to_string(100 + a), "u" + std::to_string(100 + bb));
      }
    }
  }
  return b.build();
}

Outcome criterion_trust_ranges() {
  Outcome out;
  Rng rng(515151);
  for (int round = 0; round < 1000 && out.pass; ++round) {
    const Dataset d = random_trust_dataset(rng);
    const SocialGraph g = build_graph(d);
    const PageRankResult pr = pagerank(g);
    TrustConfig cfg;
    cfg.beta = rng.next_unit();
    const IndicatorVector ind = compute_indicators(d, cfg, &pr);
    const TrustScores scores = compute_trust(d, cfg, &pr);

    for (int l = 0; l < 6 && out.pass; ++l) {
      for (double v : ind.component(l)) {
        if (!(v >= 0.0 && v <= 1.0)) out.fail("indicator out of range");
      }
    }
    for (double v : scores.mgr) {
      if (!(v >= 0.0 && v <= 1.0)) out.fail("mgr out of range");
    }
    for (const auto& [key, v] : scores.mft) {
      (void)key;
      if (!(v >= 0.0 && v <= 1.0)) out.fail("mft out of range");
    }
    for (const auto& r : d.ratings) {
      if (scores.mft.find(pair_key(r.user, r.item)) == scores.mft.end()) {
        out.fail("mft misses a rated pair");
      }
    }

    // exact 1.0 at the maximal raw value of each max-normalized indicator
    auto attains_one = [&out](const std::vector<double>& comp, bool any_raw, const char* what) {
      if (!any_raw) {
        for (double v : comp) {
          if (v != 0.0) out.fail(std::string(what) + " nonzero without raw feedback");
        }
        return;
      }
      bool found = false;
      for (double v : comp) found = found || v == 1.0;
      if (!found) out.fail(std::string(what) + " never reaches 1.0");
    };
    bool any_elite = false, any_compl = false, any_fans = false, any_appr = false;
    for (const auto& u : d.users) {
      any_elite = any_elite || u.elite_years > 0;
      any_compl = any_compl || u.profile_compliments() > 0;
      any_fans = any_fans || u.fans > 0;
    }
    for (const auto& c : d.contributions) any_appr = any_appr || yelp_appreciations(c) > 0;
    attains_one(ind.elite, any_elite, "elite");
    attains_one(ind.lup, any_compl, "lup");
    attains_one(ind.op_leader, any_fans, "opLeader");
    attains_one(ind.q, any_appr, "q");
    if (pr.rank.size() > 0) {
      bool imp_one = false;
      for (double v : ind.imp) imp_one = imp_one || v == 1.0;
      if (!imp_one) out.fail("imp never reaches 1.0");
    }

    // per-item max of fcontr
    const auto quality = contribution_quality(d);
    std::vector<long long> item_max(d.items.size(), 0);
    for (std::size_t c = 0; c < d.contributions.size(); ++c) {
      item_max[d.contributions[c].item] =
          std::max(item_max[d.contributions[c].item], yelp_appreciations(d.contributions[c]));
    }
    std::vector<bool> item_hit(d.items.size(), false);
    for (std::size_t c = 0; c < d.contributions.size(); ++c) {
      if (quality[c] == 1.0) item_hit[d.contributions[c].item] = true;
      if (!(quality[c] >= 0.0 && quality[c] <= 1.0)) out.fail("fcontr out of range");
    }
    for (std::size_t i = 0; i < d.items.size(); ++i) {
      if (item_max[i] > 0 && !item_hit[i]) out.fail("per-item fcontr never reaches 1.0");
    }

    // switched-off indicators cannot move mgr
    TrustConfig off = cfg;
    const int victim = static_cast<int>(rng.below(6));
    off.flags[victim] = false;
    if (off.active_flags() > 0) {
      IndicatorVector perturbed = compute_indicators(d, off, &pr);
      const auto before = multi_dimensional_reputation(perturbed, off);
      std::vector<double>* slot = nullptr;
      switch (victim) {
        case TrustConfig::kImp: slot = &perturbed.imp; break;
        case TrustConfig::kElite: slot = &perturbed.elite; break;
        case TrustConfig::kLup: slot = &perturbed.lup; break;
        case TrustConfig::kOpLeader: slot = &perturbed.op_leader; break;
        case TrustConfig::kVis: slot = &perturbed.vis; break;
        default: slot = &perturbed.q; break;
      }
      for (auto& v : *slot) v = rng.next_unit();
      const auto after = multi_dimensional_reputation(perturbed, off);
      if (before != after) out.fail("flagged-off indicator leaked into mgr");
    }
  }
  if (out.pass) out.detail = "1000 datasets, exact predicates";
  return out;
}

// ---------------------------------------------------------------------------
// 4. pagerank against the dense oracle on every friend set with <= 5 nodes

Outcome criterion_pagerank() {
  Outcome out;
  int graphs = 0;
  for (int n = 1; n <= 5 && out.pass; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
    const int subsets = 1 << pairs.size();
    for (int mask = 0; mask < subsets && out.pass; ++mask) {
      std::vector<FriendEdge> friends;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        if ((mask >> p) & 1) friends.push_back(FriendEdge{pairs[p].first, pairs[p].second});
      }
      const SocialGraph g = build_graph(friends, n);
      PageRankOptions opt;
      opt.tol = 1e-13;
      opt.max_iter = 100000;
      const PageRankResult pr = pagerank(g, opt);
      ++graphs;

      std::vector<std::pair<int, int>> directed;
      for (int v = 0; v < n; ++v) {
        for (int w : g.out[v]) directed.emplace_back(v, w);
      }
      const auto expect = oracles::pagerank_dense(n, directed);
      for (int v = 0; v < n; ++v) {
        if (std::abs(pr.score[v] - expect[v]) > 1e-7) out.fail("score differs from oracle");
      }
      double sum = 0;
      for (double s : pr.score) sum += s;
      if (std::abs(sum - 1.0) > 1e-9) out.fail("scores do not sum to 1");
      for (int v = 0; v < n; ++v) {
        if (pr.rank[v] == 1 && pr.importance(v) != 1.0) out.fail("importance at rank 1 is not 1");
      }
    }
  }
  if (out.pass) out.detail = std::to_string(graphs) + " graphs vs dense oracle";
  return out;
}

// ---------------------------------------------------------------------------
// 5. ranking metrics against the exact oracle, exhaustively

Outcome criterion_metrics() {
  Outcome out;
  int cases = 0;
  for (int len = 0; len <= 5; ++len) {
    for (int pattern = 0; pattern < (1 << len); ++pattern) {
      for (int extra = 0; extra <= 2; ++extra) {
        if (len == 0 && extra == 0) continue;
        std::vector<Rating> test;
        std::vector<bool> rel(len);
        RankedList list;
        list.user = 0;
        for (int x = 0; x < len; ++x) {
          rel[x] = (pattern >> x) & 1;
          test.push_back(Rating{0, x, rel[x] ? 5.0 : 2.0});
          list.items.push_back(RankedItem{x, 4.9 - 0.1 * x});
        }
        int n_relevant = 0;
        for (bool r : rel) n_relevant += r ? 1 : 0;
        for (int e = 0; e < extra; ++e) {
          test.push_back(Rating{0, len + e, 5.0});
          ++n_relevant;
        }
        const TestSet truth = make_test_set(test);
        const MetricsReport rep = metrics_at_k(std::vector<RankedList>{list}, truth, 5);
        ++cases;

        if (len == 0) {
          if (rep.p != 0.0 || rep.map != 0.0 || rep.ucov != 0.0) out.fail("empty list not excluded");
          continue;
        }
        const auto want = oracles::brute_user_metrics(rel, n_relevant);
        const double p = want.p.value(), r = want.r.value();
        const double f1 = (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
        if (std::abs(rep.p - p) > 1e-12) out.fail("precision differs");
        if (std::abs(rep.r - r) > 1e-12) out.fail("recall differs");
        if (std::abs(rep.f1 - f1) > 1e-12) out.fail("F1 differs");
        if (std::abs(rep.map - want.ap.value()) > 1e-12) out.fail("MAP differs");
        if (std::abs(rep.mrr - want.rr.value()) > 1e-12) out.fail("MRR differs");
      }
    }
  }
  if (out.pass) out.detail = std::to_string(cases) + " list/relevance cases";
  return out;
}

// ---------------------------------------------------------------------------
// 6. planted-signal study: grid-searched LOCABAL+ vs plain MF over 10 seeds

Outcome criterion_directional() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  int wins = 0;
  std::ostringstream maps;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig sc;
    sc.seed = seed;
    const Dataset d = synth_dataset(sc);
    const SplitPlan plan = split_holdout(d, 0.1, seed * 1000 + 7);

    ExperimentParams params;
    params.hp.k = 8;
    params.hp.epochs = 300;
    params.hp.learning_rate = 0.15;
    params.hp.lambda = 0.02;
    params.hp.seed = seed * 77 + 1;
    params.k = 10;
    params.folds = 5;
    params.threads = 0;

    const AblationSettings full = ablation_config(Ablation::Full);
    const TrustContext lp_ctx = build_trust_context(d, Algorithm::LocabalPlus, full);
    const GridSearchResult grid =
        grid_search(d, lp_ctx, plan, Algorithm::LocabalPlus, full, {0.1, 0.5}, {0.0, 0.3},
                    params, seed * 13 + 3);
    const auto& best = grid.cells[grid.best];
    const MetricsReport lp = evaluate_final(d, lp_ctx, plan, Algorithm::LocabalPlus, full,
                                            best.alpha, best.beta, params);

    const TrustContext mf_ctx = build_trust_context(d, Algorithm::MF, full);
    const MetricsReport mf =
        evaluate_final(d, mf_ctx, plan, Algorithm::MF, full, 0.0, 0.0, params);

    if (lp.map >= mf.map) ++wins;
    char buf[64];
    std::snprintf(buf, sizeof buf, " %.4f/%.4f", lp.map, mf.map);
    maps << buf;
  }

  const double elapsed = seconds_since(start);
  if (wins < 8) out.fail("LOCABAL+ won only " + std::to_string(wins) + "/10 seeds:" + maps.str());
  if (elapsed >= 300.0) out.fail("runtime " + std::to_string(elapsed) + "s exceeds 5 min");
  if (out.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d/10 seeds, %.1fs;", wins, elapsed);
    out.detail = buf + (" L+/MF MAP:" + maps.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// 7. ablation plumbing: switch settings and the CSV config echo

Outcome criterion_ablation() {
  Outcome out;

  const auto full = ablation_config(Ablation::Full);
  for (bool f : full.trust.flags) {
    if (!f) out.fail("full must keep every indicator");
  }
  if (!full.trust.use_fcontr || full.force_alpha_zero) out.fail("full switches mis-set");

  const auto no_f = ablation_config(Ablation::NoF);
  if (no_f.trust.flags[TrustConfig::kQ] || no_f.trust.use_fcontr) out.fail("noF must drop q and C");
  for (int l = 0; l < 5; ++l) {
    if (!no_f.trust.flags[l]) out.fail("noF must keep the other indicators");
  }

  const auto no_e = ablation_config(Ablation::NoE);
  if (no_e.trust.flags[TrustConfig::kElite] || no_e.trust.flags[TrustConfig::kLup] ||
      no_e.trust.flags[TrustConfig::kOpLeader] || no_e.trust.flags[TrustConfig::kVis]) {
    out.fail("noE must drop the profile-endorsement indicators");
  }
  if (!no_e.trust.flags[TrustConfig::kImp] || !no_e.trust.flags[TrustConfig::kQ] ||
      !no_e.trust.use_fcontr) {
    out.fail("noE must keep imp, q and C");
  }

  const auto no_s = ablation_config(Ablation::NoS);
  if (no_s.trust.flags[TrustConfig::kImp] || !no_s.force_alpha_zero) {
    out.fail("noS must drop imp and force alpha to 0");
  }

  // CSV echo through the CLI
  test_util::TempDir dir;
  if (run_cli("synth --users 30 --items 20 --seed 5 --out " + dir.file("data"),
              dir.file("synth.log")) != 0) {
    out.fail("synth subcommand failed");
    return out;
  }
  for (const std::string name : {"full", "noF", "noE", "noS"}) {
    const std::string run_dir = dir.file("run_" + name);
    std::ostringstream cmd;
    cmd << "eval --data " << dir.file("data") << " --out " << run_dir
        << " --variant locabalplus --ablation " << name
        << " --alpha 0.5 --beta 0.3 --seed 11 --k 5"
        << " --config " << dir.file("tiny.cfg");
    test_util::write_file(dir.file("tiny.cfg"),
                          "latent_factors=3\nepochs=10\nfolds=3\ntest_fraction=0.2\n");
    if (run_cli(cmd.str(), dir.file("eval_" + name + ".log")) != 0) {
      out.fail("eval failed for ablation " + name);
      continue;
    }
    const std::string report = test_util::read_file(run_dir + "/report.csv");
    std::istringstream lines(report);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    const std::string expected_alpha = name == "noS" ? "0" : "0.5";
    const std::string prefix = "locabalplus," + name + "," + expected_alpha + ",0.3,5,";
    if (row.rfind(prefix, 0) != 0) {
      out.fail("report row for " + name + " is '" + row + "', expected prefix '" + prefix + "'");
    }
  }
  if (out.pass) out.detail = "switch settings + report echo for all four configurations";
  return out;
}

// ---------------------------------------------------------------------------
// 8. end-to-end determinism of the pipeline artifacts

Outcome criterion_determinism() {
  Outcome out;
  test_util::TempDir dir;
  if (run_cli("synth --users 40 --items 30 --seed 3 --out " + dir.file("data"),
              dir.file("synth.log")) != 0) {
    out.fail("synth subcommand failed");
    return out;
  }
  test_util::write_file(dir.file("run.cfg"),
                        "latent_factors=4\nepochs=15\nfolds=3\ntest_fraction=0.15\n"
                        "alpha_grid=0.1,0.5\nbeta_grid=0,0.3\nthreads=2\n");
  for (const char* run : {"a", "b"}) {
    const std::string cmd = "eval --data " + dir.file("data") + " --out " + dir.file(run) +
                            " --variant locabalplus --ablation full --seed 99 --config " +
                            dir.file("run.cfg");
    if (run_cli(cmd, dir.file(std::string("eval_") + run + ".log")) != 0) {
      out.fail("eval run failed");
      return out;
    }
  }
  for (const char* artifact : {"report.csv", "grid.csv", "split.txt", "trust.tsv"}) {
    const std::string a = test_util::read_file(dir.file(std::string("a/") + artifact));
    const std::string b = test_util::read_file(dir.file(std::string("b/") + artifact));
    if (a != b) out.fail(std::string(artifact) + " differs between identical runs");
    if (a.empty()) out.fail(std::string(artifact) + " is empty");
  }
  if (out.pass) out.detail = "report.csv, grid.csv, split.txt, trust.tsv byte-identical";
  return out;
}

// ---------------------------------------------------------------------------
// 9. ingestion statistics on the bundled fixture

Outcome criterion_ingest() {
  Outcome out;
  const std::string fixture = TRUSTREC_FIXTURE_DIR;

  auto count_lines = [](const std::string& path) {
    std::ifstream is(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
      if (!line.empty()) ++n;
    }
    return n;
  };
  const std::size_t n_users = count_lines(fixture + "/users.jsonl");
  const std::size_t n_items = count_lines(fixture + "/items.jsonl");
  const std::size_t n_ratings = count_lines(fixture + "/reviews.jsonl");
  const std::size_t n_friends = count_lines(fixture + "/friends.jsonl");
  if (n_users != 50) out.fail("fixture must hold 50 users");

  test_util::TempDir dir;
  if (run_cli("ingest --data " + fixture, dir.file("ingest.log")) != 0) {
    out.fail("ingest subcommand failed");
    return out;
  }
  const std::string log = test_util::read_file(dir.file("ingest.log"));

  auto expect_line = [&](const std::string& line) {
    if (log.find(line + "\n") == std::string::npos) {
      out.fail("missing or wrong stat '" + line + "'");
    }
  };
  expect_line("users: " + std::to_string(n_users));
  expect_line("items: " + std::to_string(n_items));
  expect_line("ratings: " + std::to_string(n_ratings));
  expect_line("friend_edges: " + std::to_string(n_friends));

  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f",
                1.0 - static_cast<double>(n_ratings) /
                          (static_cast<double>(n_users) * static_cast<double>(n_items)));
  expect_line(std::string("rating_sparsity: ") + buf);
  std::snprintf(buf, sizeof buf, "%.10f",
                1.0 - static_cast<double>(n_friends) /
                          (static_cast<double>(n_users) * static_cast<double>(n_users)));
  expect_line(std::string("friend_sparsity: ") + buf);

  if (out.pass) {
    out.detail = "sparsity matches 1 - |ratings|/(|users|*|items|) on the 50-user fixture";
  }
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria{
      {"gradient correctness (finite differences)", criterion_gradients},
      {"reduction equivalence (LOCABAL+ -> MF)", criterion_reduction},
      {"trust-range suite (1000 randomized datasets)", criterion_trust_ranges},
      {"pagerank vs dense oracle (all graphs <= 5 nodes)", criterion_pagerank},
      {"metric oracle (exhaustive lists <= 5 items)", criterion_metrics},
      {"synthetic directional study (LOCABAL+ vs MF)", criterion_directional},
      {"ablation plumbing (Table-3 switch settings)", criterion_ablation},
      {"end-to-end determinism of cmd_run artifacts", criterion_determinism},
      {"ingestion statistics on the bundled fixture", criterion_ingest},
  };

  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome out;
    try {
      out = criteria[c].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %zu %s: %s%s%s\n", c + 1, out.pass ? "PASS" : "FAIL", criteria[c].name,
                out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
