#pragma once
// Restricted Boltzmann machine observation-likelihood estimation: one
// small binary RBM per state, trained with contrastive divergence on flag
// vectors, sampled by block Gibbs, reduced to an observation index, and
// counted into a row of the observation model.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "herd/types.hpp"

namespace herd {

// Energy -v'Wh - a'v - b'h over binary v (visible) and h (hidden).
struct RbmParams {
  Matrix weights;       // visible x hidden
  Vector visible_bias;
  Vector hidden_bias;

  Index visible() const { return weights.rows(); }
  Index hidden() const { return weights.cols(); }
};

struct RbmTrainConfig {
  int n_visible = 6;
  int n_hidden = 4;
  int epochs = 100;
  double learning_rate = 0.1;
  int cd_steps = 1;  // CD-k
  std::uint64_t rng_seed = 0;
};

// Weights ~ N(0, 0.01), biases zero, reproducible from the seed.
RbmParams initial_rbm(int n_visible, int n_hidden, std::uint64_t seed);

// Full-batch CD-k: one parameter update per epoch from gradients averaged
// over the whole dataset. `data` holds one 0/1 row per observation vector.
RbmParams train_cd(const Matrix& data, const RbmTrainConfig& config);

// `n` independent chains, each run `iterations` block-Gibbs steps from a
// random visible configuration; returns one visible sample per chain.
Matrix gibbs_sample(const RbmParams& params, int n, int iterations,
                    std::mt19937_64& rng);

using FlagReducer = std::function<Index(const Eigen::RowVectorXd&)>;

// Reduces each state's sample rows to observation indices, counts, adds
// `alpha` to every bucket, and normalizes into a row-stochastic model.
// alpha < 0 selects the default 1/n_samples for that state.
ObservationModel estimate_likelihood(const std::vector<Matrix>& samples_per_state,
                                     const FlagReducer& reduce,
                                     Index n_observations, double alpha = -1.0);

void save_rbm_json(const std::string& path, const RbmParams& params);
RbmParams load_rbm_json(const std::string& path);

}  // namespace herd
