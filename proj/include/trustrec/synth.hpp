#pragma once

#include <cstdint>
#include <string>

#include "trustrec/dataset.hpp"

namespace trustrec {

// Planted-signal generator: a reliable majority rates from smooth latent
// preferences and draws heavy feedback; a noisy minority rates at random and
// draws almost none. Friend edges connect like-minded reliable users.
struct SynthConfig {
  int n_users = 200;
  int n_items = 200;
  double noisy_fraction = 0.3;
  int ratings_per_user = 25;
  int noisy_ratings_per_user = 40;  // noisy raters pollute more cells
  std::uint64_t seed = 1;
};

Dataset synth_dataset(const SynthConfig& cfg);

// Writes users/items/reviews/tips/friends .jsonl files for a dataset.
void write_dataset_jsonl(const Dataset& d, const std::string& dir);

}  // namespace trustrec
