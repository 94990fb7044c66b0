// End-to-end smoke checks for every CLI subcommand and its artifacts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trustrec/factorization.hpp"
#include "test_util.hpp"

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s: %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run_cli(const std::string& args, const std::string& log_path) {
  const std::string cmd = std::string(TRUSTREC_CLI_PATH) + " " + args + " > " + log_path + " 2>&1";
  return std::system(cmd.c_str());
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

int main() {
  test_util::TempDir dir;
  const std::string data = dir.file("data");

  check(run_cli("synth --users 20 --items 12 --seed 4 --out " + data, dir.file("synth.log")) == 0,
        "synth generates a dataset");

  // ingest on healthy data
  check(run_cli("ingest --data " + data, dir.file("ingest.log")) == 0, "ingest succeeds");
  const std::string stats = test_util::read_file(dir.file("ingest.log"));
  check(stats.find("users: 20") != std::string::npos, "ingest reports the user count");
  check(stats.find("rating_sparsity: ") != std::string::npos, "ingest reports sparsity");

  // ingest on an empty dataset
  const std::string empty = dir.file("empty");
  std::filesystem::create_directories(empty);
  for (const char* name : {"users.jsonl", "items.jsonl", "reviews.jsonl", "tips.jsonl", "friends.jsonl"}) {
    test_util::write_file(empty + "/" + name, "");
  }
  check(run_cli("ingest --data " + empty, dir.file("ingest_empty.log")) == 0,
        "ingest accepts an empty dataset");
  const std::string empty_stats = test_util::read_file(dir.file("ingest_empty.log"));
  check(empty_stats.find("users: 0") != std::string::npos &&
            empty_stats.find("ratings: 0") != std::string::npos,
        "empty dataset reports zero counts");

  // malformed line: nonzero exit and a file:line message
  const std::string broken = dir.file("broken");
  std::filesystem::copy(data, broken, std::filesystem::copy_options::recursive);
  {
    std::ofstream os(broken + "/reviews.jsonl", std::ios::app);
    os << "{this is not json}\n";
  }
  std::size_t broken_line = count_lines(test_util::read_file(broken + "/reviews.jsonl"));
  check(run_cli("ingest --data " + broken, dir.file("ingest_broken.log")) != 0,
        "malformed line exits nonzero");
  const std::string err = test_util::read_file(dir.file("ingest_broken.log"));
  check(err.find("reviews.jsonl:" + std::to_string(broken_line)) != std::string::npos,
        "malformed-line error carries the line number");

  // trust dumps
  const std::string trust_out = dir.file("trust_out");
  check(run_cli("trust --data " + data + " --out " + trust_out + " --beta 0.3",
                dir.file("trust.log")) == 0,
        "trust subcommand succeeds");
  check(std::filesystem::exists(trust_out + "/trust.tsv"), "trust.tsv written");
  check(std::filesystem::exists(trust_out + "/pagerank.tsv"), "pagerank.tsv written");
  {
    std::istringstream first(test_util::read_file(trust_out + "/pagerank.tsv"));
    std::string id, rest;
    first >> id;
    std::getline(first, rest);
    check(!id.empty() && id[0] == 'u' && !rest.empty(), "pagerank.tsv lines hold user ids");
  }

  // train dumps a loadable model
  const std::string train_out = dir.file("train_out");
  test_util::write_file(dir.file("train.cfg"), "latent_factors=3\nepochs=10\ntest_fraction=0.2\n");
  check(run_cli("train --data " + data + " --out " + train_out +
                    " --variant locabalplus --alpha 0.3 --beta 0.1 --seed 6 --config " +
                    dir.file("train.cfg"),
                dir.file("train.log")) == 0,
        "train subcommand succeeds");
  if (std::filesystem::exists(train_out + "/model.bin")) {
    const trustrec::ModelParams model = trustrec::load_model(train_out + "/model.bin");
    check(model.n == 20 && model.m == 12, "model dump round-trips dimensions");
    check(model.has_h, "social variant keeps the correlation matrix");
  } else {
    check(false, "model.bin written");
  }
  check(std::filesystem::exists(train_out + "/objective.csv"), "objective trace written");

  // grid subcommand emits one row per cell
  const std::string grid_out = dir.file("grid_out");
  test_util::write_file(dir.file("grid.cfg"),
                        "latent_factors=3\nepochs=8\nfolds=3\ntest_fraction=0.2\n"
                        "alpha_grid=0,0.5\nbeta_grid=0,0.5\n");
  check(run_cli("grid --data " + data + " --out " + grid_out +
                    " --variant locabalplus --seed 2 --config " + dir.file("grid.cfg"),
                dir.file("grid.log")) == 0,
        "grid subcommand succeeds");
  const std::string grid_csv = test_util::read_file(grid_out + "/grid.csv");
  check(count_lines(grid_csv) == 1 + 4, "grid.csv holds one row per cell");

  // eval with plain MF skips the trust artifacts
  const std::string mf_out = dir.file("mf_out");
  check(run_cli("eval --data " + data + " --out " + mf_out +
                    " --variant mf --seed 2 --config " + dir.file("grid.cfg"),
                dir.file("eval_mf.log")) == 0,
        "eval runs plain MF");
  check(std::filesystem::exists(mf_out + "/report.csv"), "MF report written");
  check(std::filesystem::exists(mf_out + "/model.bin"), "MF model written");
  check(!std::filesystem::exists(mf_out + "/trust.tsv") &&
            !std::filesystem::exists(mf_out + "/pagerank.tsv"),
        "MF skips trust computation");

  // knn baseline through the same pipeline
  const std::string knn_out = dir.file("knn_out");
  check(run_cli("eval --data " + data + " --out " + knn_out +
                    " --variant u2usocial --seed 2 --config " + dir.file("grid.cfg"),
                dir.file("eval_knn.log")) == 0,
        "eval runs the social knn baseline");
  const std::string knn_report = test_util::read_file(knn_out + "/report.csv");
  check(knn_report.find("\nu2usocial,-,0,0,") != std::string::npos,
        "knn report row echoes the algorithm");

  std::printf(failures == 0 ? "cli smoke: all checks passed\n"
                            : "cli smoke: %d checks failed\n",
              failures);
  return failures == 0 ? 0 : 1;
}
