#include "trustrec/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "trustrec/rng.hpp"

namespace trustrec {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::MF: return "mf";
    case Variant::Locabal: return "locabal";
    case Variant::LocabalPlus: return "locabalplus";
  }
  return "mf";
}

TrainingDiverged::TrainingDiverged(int at_epoch)
    : std::runtime_error("training diverged at epoch " + std::to_string(at_epoch)),
      epoch(at_epoch) {}

double pearson(std::span<const std::pair<int, double>> a,
               std::span<const std::pair<int, double>> b) {
  // merge over item-sorted rating vectors
  std::vector<std::pair<double, double>> co;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      co.emplace_back(a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
  if (co.size() < 2) return 0.0;

  double mean_a = 0, mean_b = 0;
  for (const auto& [ra, rb] : co) {
    mean_a += ra;
    mean_b += rb;
  }
  mean_a /= static_cast<double>(co.size());
  mean_b /= static_cast<double>(co.size());

  double num = 0, var_a = 0, var_b = 0;
  for (const auto& [ra, rb] : co) {
    const double da = ra - mean_a;
    const double db = rb - mean_b;
    num += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return 0.0;
  return num / std::sqrt(var_a * var_b);
}

SimilarityMatrix build_similarity(const TrainData& train, const SocialGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> by_user(train.n_users);
  for (const auto& r : train.ratings) by_user[r.user].emplace_back(r.item, r.value);

  SimilarityMatrix sim;
  for (int x = 0; x < g.n; ++x) {
    for (int z : g.out[x]) {
      const double pc = pearson(by_user[x], by_user[z]);
      sim.entries.push_back(SimilarityEntry{x, z, std::max(0.0, pc)});
    }
  }
  return sim;
}

ObjectiveSpec uniform_spec(Variant variant, std::size_t n_ratings, std::size_t n_entries) {
  ObjectiveSpec spec;
  spec.variant = variant;
  spec.rating_weight.assign(n_ratings, 1.0);
  spec.neighbor_weight.assign(n_entries, 1.0);
  return spec;
}

double ModelParams::dot(int user, int item) const {
  const double* a = u.data() + static_cast<std::size_t>(user) * k;
  const double* b = i.data() + static_cast<std::size_t>(item) * k;
  double s = 0;
  for (int f = 0; f < k; ++f) s += a[f] * b[f];
  return s;
}

ModelParams init_model(const TrainData& train, Variant variant, const HyperParams& hp) {
  if (hp.k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(hp.init_scale > 0)) throw std::invalid_argument("init_scale must be positive");

  ModelParams model;
  model.k = hp.k;
  model.n = train.n_users;
  model.m = train.n_items;
  model.has_h = variant != Variant::MF && hp.alpha > 0.0;
  model.global_mean = train.global_mean;

  Rng rng(hp.seed);
  auto fill = [&](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    for (auto& x : v) x = rng.uniform(-hp.init_scale, hp.init_scale);
  };
  fill(model.u, static_cast<std::size_t>(model.n) * model.k);
  fill(model.i, static_cast<std::size_t>(model.m) * model.k);
  if (model.has_h) fill(model.h, static_cast<std::size_t>(model.k) * model.k);

  model.user_seen.assign(model.n, 0);
  model.item_seen.assign(model.m, 0);
  for (const auto& r : train.ratings) {
    model.user_seen[r.user] = 1;
    model.item_seen[r.item] = 1;
  }
  return model;
}

namespace {

void check_dimensions(const ModelParams& model, const ObjectiveSpec& spec,
                      const TrainData& train, const SimilarityMatrix& sim) {
  if (model.n != train.n_users || model.m != train.n_items) {
    throw std::invalid_argument("model dimensions do not match the training data");
  }
  if (spec.rating_weight.size() != train.ratings.size()) {
    throw std::invalid_argument("rating weights do not cover the training ratings");
  }
  if (model.has_h && spec.neighbor_weight.size() != sim.entries.size()) {
    throw std::invalid_argument("neighbor weights do not cover the similarity entries");
  }
}

}  // namespace

double objective(const ModelParams& model, const ObjectiveSpec& spec,
                 const TrainData& train, const SimilarityMatrix& sim,
                 const HyperParams& hp) {
  check_dimensions(model, spec, train, sim);
  const int k = model.k;
  double loss = 0;

  for (std::size_t r = 0; r < train.ratings.size(); ++r) {
    const auto& rt = train.ratings[r];
    const double e = model.dot(rt.user, rt.item) - rt.value;
    loss += spec.rating_weight[r] * e * e;
  }

  if (model.has_h) {
    std::vector<double> hu(k);
    for (std::size_t n = 0; n < sim.entries.size(); ++n) {
      const auto& entry = sim.entries[n];
      const double* ux = model.u.data() + static_cast<std::size_t>(entry.x) * k;
      const double* uz = model.u.data() + static_cast<std::size_t>(entry.z) * k;
      for (int a = 0; a < k; ++a) {
        double s = 0;
        const double* row = model.h.data() + static_cast<std::size_t>(a) * k;
        for (int b = 0; b < k; ++b) s += row[b] * uz[b];
        hu[a] = s;
      }
      double form = 0;
      for (int a = 0; a < k; ++a) form += ux[a] * hu[a];
      const double e = form - entry.s;
      loss += hp.alpha * spec.neighbor_weight[n] * e * e;
    }
  }

  double frob = 0;
  for (double v : model.u) frob += v * v;
  for (double v : model.i) frob += v * v;
  if (model.has_h) {
    for (double v : model.h) frob += v * v;
  }
  return loss + hp.lambda * frob;
}

Gradients gradients(const ModelParams& model, const ObjectiveSpec& spec,
                    const TrainData& train, const SimilarityMatrix& sim,
                    const HyperParams& hp) {
  check_dimensions(model, spec, train, sim);
  const int k = model.k;

  Gradients g;
  g.u.resize(model.u.size());
  g.i.resize(model.i.size());
  g.h.resize(model.h.size());
  for (std::size_t p = 0; p < model.u.size(); ++p) g.u[p] = 2.0 * hp.lambda * model.u[p];
  for (std::size_t p = 0; p < model.i.size(); ++p) g.i[p] = 2.0 * hp.lambda * model.i[p];
  for (std::size_t p = 0; p < model.h.size(); ++p) g.h[p] = 2.0 * hp.lambda * model.h[p];

  for (std::size_t r = 0; r < train.ratings.size(); ++r) {
    const auto& rt = train.ratings[r];
    const double* ux = model.u.data() + static_cast<std::size_t>(rt.user) * k;
    const double* iy = model.i.data() + static_cast<std::size_t>(rt.item) * k;
    double e = 0;
    for (int f = 0; f < k; ++f) e += ux[f] * iy[f];
    const double c = 2.0 * spec.rating_weight[r] * (e - rt.value);
    double* gu = g.u.data() + static_cast<std::size_t>(rt.user) * k;
    double* gi = g.i.data() + static_cast<std::size_t>(rt.item) * k;
    for (int f = 0; f < k; ++f) {
      gu[f] += c * iy[f];
      gi[f] += c * ux[f];
    }
  }

  if (model.has_h) {
    std::vector<double> hu(k), htu(k);
    for (std::size_t n = 0; n < sim.entries.size(); ++n) {
      const auto& entry = sim.entries[n];
      const double* ux = model.u.data() + static_cast<std::size_t>(entry.x) * k;
      const double* uz = model.u.data() + static_cast<std::size_t>(entry.z) * k;
      for (int a = 0; a < k; ++a) {
        double s = 0;
        const double* row = model.h.data() + static_cast<std::size_t>(a) * k;
        for (int b = 0; b < k; ++b) s += row[b] * uz[b];
        hu[a] = s;
      }
      double form = 0;
      for (int a = 0; a < k; ++a) form += ux[a] * hu[a];
      const double c = 2.0 * hp.alpha * spec.neighbor_weight[n] * (form - entry.s);

      double* gx = g.u.data() + static_cast<std::size_t>(entry.x) * k;
      for (int a = 0; a < k; ++a) gx[a] += c * hu[a];

      // z side sees H transposed
      for (int b = 0; b < k; ++b) {
        double s = 0;
        for (int a = 0; a < k; ++a) s += model.h[static_cast<std::size_t>(a) * k + b] * ux[a];
        htu[b] = s;
      }
      double* gz = g.u.data() + static_cast<std::size_t>(entry.z) * k;
      for (int b = 0; b < k; ++b) gz[b] += c * htu[b];

      for (int a = 0; a < k; ++a) {
        double* gh = g.h.data() + static_cast<std::size_t>(a) * k;
        const double ca = c * ux[a];
        for (int b = 0; b < k; ++b) gh[b] += ca * uz[b];
      }
    }
  }

  return g;
}

TrainResult train(const TrainData& train_data, const ObjectiveSpec& spec,
                  const SimilarityMatrix& sim, const HyperParams& hp) {
  if (!(hp.learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
  if (hp.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (hp.alpha < 0 || hp.lambda < 0) throw std::invalid_argument("alpha and lambda must be >= 0");

  constexpr int kMaxHalvings = 60;

  TrainResult res;
  res.model = init_model(train_data, spec.variant, hp);

  double current = objective(res.model, spec, train_data, sim, hp);
  if (!std::isfinite(current)) throw TrainingDiverged(0);
  res.objective_trace.push_back(current);

  ModelParams candidate = res.model;
  double lr = hp.learning_rate;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    const Gradients g = gradients(res.model, spec, train_data, sim, hp);
    for (double v : g.u) {
      if (!std::isfinite(v)) throw TrainingDiverged(epoch);
    }

    for (int trial = 0; trial <= kMaxHalvings; ++trial) {
      for (std::size_t p = 0; p < res.model.u.size(); ++p) candidate.u[p] = res.model.u[p] - lr * g.u[p];
      for (std::size_t p = 0; p < res.model.i.size(); ++p) candidate.i[p] = res.model.i[p] - lr * g.i[p];
      for (std::size_t p = 0; p < res.model.h.size(); ++p) candidate.h[p] = res.model.h[p] - lr * g.h[p];

      const double next = objective(candidate, spec, train_data, sim, hp);
      if (std::isfinite(next) && next <= current) {
        res.model.u.swap(candidate.u);
        res.model.i.swap(candidate.i);
        res.model.h.swap(candidate.h);
        current = next;
        // a first-try acceptance earns a slightly larger step next epoch
        if (trial == 0) lr = std::min(lr * 1.1, 16.0 * hp.learning_rate);
        break;
      }
      lr *= 0.5;
    }
    // when no halved step improves, hold position and keep the trace flat
    res.objective_trace.push_back(current);
  }

  return res;
}

double predict(const ModelParams& model, int user, int item) {
  const bool cold = user < 0 || user >= model.n || item < 0 || item >= model.m ||
                    !model.user_seen[user] || !model.item_seen[item];
  const double raw = cold ? model.global_mean : model.dot(user, item);
  return std::clamp(raw, 1.0, 5.0);
}

namespace {

constexpr char kMagic[8] = {'T', 'R', 'M', 'F', '\0', '\0', '\0', '\1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  os.write(buf, 8);
}

std::uint64_t take_u64(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  std::uint64_t v;
  std::memcpy(&v, buf, 8);
  return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void take_doubles(std::istream& is, std::vector<double>& v, std::size_t count) {
  v.resize(count);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
}

void put_string(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string take_string(std::istream& is) {
  std::string s(take_u64(is), '\0');
  is.read(s.data(), static_cast<std::streamsize>(s.size()));
  return s;
}

// The dump stores K x n / K x m / K x K blocks row-major; in memory the
// factors are entity-major.
std::vector<double> transpose(const std::vector<double>& src, int rows, int cols) {
  std::vector<double> dst(src.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) dst[static_cast<std::size_t>(c) * rows + r] = src[static_cast<std::size_t>(r) * cols + c];
  }
  return dst;
}

}  // namespace

void save_model(const ModelParams& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write model file " + path);
  os.write(kMagic, sizeof kMagic);
  put_u64(os, static_cast<std::uint64_t>(model.k));
  put_u64(os, static_cast<std::uint64_t>(model.n));
  put_u64(os, static_cast<std::uint64_t>(model.m));
  os.put(model.has_h ? 1 : 0);

  // entity-major in memory -> K x n row-major on disk
  put_doubles(os, transpose(model.u, model.n, model.k));
  put_doubles(os, transpose(model.i, model.m, model.k));
  if (model.has_h) put_doubles(os, model.h);

  put_doubles(os, {model.global_mean});
  os.write(reinterpret_cast<const char*>(model.user_seen.data()),
           static_cast<std::streamsize>(model.user_seen.size()));
  os.write(reinterpret_cast<const char*>(model.item_seen.data()),
           static_cast<std::streamsize>(model.item_seen.size()));
  put_u64(os, model.user_ids.size());
  for (const auto& id : model.user_ids) put_string(os, id);
  put_u64(os, model.item_ids.size());
  for (const auto& id : model.item_ids) put_string(os, id);
  if (!os) throw std::runtime_error("failed writing model file " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a model file (bad header): " + path);
  }

  ModelParams model;
  model.k = static_cast<int>(take_u64(is));
  model.n = static_cast<int>(take_u64(is));
  model.m = static_cast<int>(take_u64(is));
  model.has_h = is.get() == 1;

  std::vector<double> tmp;
  take_doubles(is, tmp, static_cast<std::size_t>(model.k) * model.n);
  model.u = transpose(tmp, model.k, model.n);
  take_doubles(is, tmp, static_cast<std::size_t>(model.k) * model.m);
  model.i = transpose(tmp, model.k, model.m);
  if (model.has_h) take_doubles(is, model.h, static_cast<std::size_t>(model.k) * model.k);

  take_doubles(is, tmp, 1);
  model.global_mean = tmp[0];
  model.user_seen.resize(model.n);
  is.read(reinterpret_cast<char*>(model.user_seen.data()), model.n);
  model.item_seen.resize(model.m);
  is.read(reinterpret_cast<char*>(model.item_seen.data()), model.m);
  model.user_ids.resize(take_u64(is));
  for (auto& id : model.user_ids) id = take_string(is);
  model.item_ids.resize(take_u64(is));
  for (auto& id : model.item_ids) id = take_string(is);
  if (!is) throw std::runtime_error("truncated model file " + path);
  return model;
}

}  // namespace trustrec
