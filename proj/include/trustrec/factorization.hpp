#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustrec/dataset.hpp"
#include "trustrec/trustgraph.hpp"

namespace trustrec {

enum class Variant { MF, Locabal, LocabalPlus };

std::string variant_name(Variant v);

struct HyperParams {
  int k = 50;                   // latent factors
  double alpha = 0.0;           // social regularization weight
  double lambda = 0.05;         // Frobenius regularization
  double learning_rate = 0.01;  // initial step; halved whenever a step would increase the objective
  int epochs = 100;
  std::uint64_t seed = 42;
  double init_scale = 0.1;  // entries start uniform in (-init_scale, init_scale)
};

struct TrainingDiverged : std::runtime_error {
  int epoch;
  explicit TrainingDiverged(int at_epoch);
};

// Pearson correlation over the items both users rated, with means taken over
// that co-rated set. 0 when fewer than 2 co-rated items or either variance
// vanishes.
double pearson(std::span<const std::pair<int, double>> a,
               std::span<const std::pair<int, double>> b);

struct SimilarityEntry {
  int x = -1;  // owner
  int z = -1;  // neighbor
  double s = 0.0;
};

// One entry per directed friend pair, sorted by (x, z). Entries are
// max(0, pearson) so negatively correlated friends are not pulled together.
struct SimilarityMatrix {
  std::vector<SimilarityEntry> entries;
};

SimilarityMatrix build_similarity(const TrainData& train, const SocialGraph& g);

// Per-rating and per-neighbor weights that select between the plain, the
// importance-weighted and the trust-weighted objectives; the quadratic form
// itself never changes.
struct ObjectiveSpec {
  Variant variant = Variant::MF;
  std::vector<double> rating_weight;    // parallel to TrainData::ratings
  std::vector<double> neighbor_weight;  // parallel to SimilarityMatrix::entries
};

ObjectiveSpec uniform_spec(Variant variant, std::size_t n_ratings, std::size_t n_entries);

struct ModelParams {
  int k = 0;
  int n = 0;  // users
  int m = 0;  // items
  bool has_h = false;
  std::vector<double> u;  // n x k, user-major
  std::vector<double> i;  // m x k, item-major
  std::vector<double> h;  // k x k, row-major
  std::vector<std::uint8_t> user_seen;  // had >= 1 training rating
  std::vector<std::uint8_t> item_seen;
  double global_mean = 3.0;
  std::vector<std::string> user_ids;  // optional, for serialized models
  std::vector<std::string> item_ids;

  double dot(int user, int item) const;

  bool operator==(const ModelParams&) const = default;
};

// Seeded init drawing U, then I, then H (only when present) from one stream.
ModelParams init_model(const TrainData& train, Variant variant, const HyperParams& hp);

double objective(const ModelParams& model, const ObjectiveSpec& spec,
                 const TrainData& train, const SimilarityMatrix& sim,
                 const HyperParams& hp);

struct Gradients {
  std::vector<double> u, i, h;
};

Gradients gradients(const ModelParams& model, const ObjectiveSpec& spec,
                    const TrainData& train, const SimilarityMatrix& sim,
                    const HyperParams& hp);

struct TrainResult {
  ModelParams model;
  std::vector<double> objective_trace;  // initial value plus one entry per epoch, non-increasing
};

// Full-batch gradient descent. A step that would raise the objective halves
// the learning rate and retries; a step that cannot improve leaves the
// parameters in place for that epoch.
TrainResult train(const TrainData& train, const ObjectiveSpec& spec,
                  const SimilarityMatrix& sim, const HyperParams& hp);

// u_x . i_y clamped to [1,5]; users or items without training ratings fall
// back to the clamped global training mean.
double predict(const ModelParams& model, int user, int item);

void save_model(const ModelParams& model, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace trustrec
