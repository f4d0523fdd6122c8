#include "herd/rbm.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "herd/rng.hpp"

namespace herd {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vector bernoulli(const Vector& probabilities, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector sample(probabilities.size());
  for (Index i = 0; i < probabilities.size(); ++i) {
    sample(i) = unit(rng) < probabilities(i) ? 1.0 : 0.0;
  }
  return sample;
}

Vector hidden_activation(const RbmParams& params, const Vector& visible) {
  return (params.weights.transpose() * visible + params.hidden_bias)
      .unaryExpr([](double x) { return sigmoid(x); });
}

Vector visible_activation(const RbmParams& params, const Vector& hidden) {
  return (params.weights * hidden + params.visible_bias)
      .unaryExpr([](double x) { return sigmoid(x); });
}

}  // namespace

RbmParams initial_rbm(int n_visible, int n_hidden, std::uint64_t seed) {
  if (n_visible < 1 || n_hidden < 1) {
    throw DimensionMismatch("rbm: unit counts must be positive");
  }
  std::mt19937_64 rng = rng::make_engine(seed);
  std::normal_distribution<double> weight(0.0, 0.1);  // variance 0.01
  RbmParams params;
  params.weights = Matrix(n_visible, n_hidden);
  for (Index i = 0; i < n_visible; ++i) {
    for (Index j = 0; j < n_hidden; ++j) {
      params.weights(i, j) = weight(rng);
    }
  }
  params.visible_bias = Vector::Zero(n_visible);
  params.hidden_bias = Vector::Zero(n_hidden);
  return params;
}

RbmParams train_cd(const Matrix& data, const RbmTrainConfig& config) {
  if (data.rows() < 1) {
    throw EmptyData("train_cd: dataset is empty");
  }
  if (data.cols() != config.n_visible) {
    throw DimensionMismatch("train_cd: data width must match visible units");
  }
  if (config.cd_steps < 1) {
    throw DimensionMismatch("train_cd: cd_steps must be >= 1");
  }
  if (((data.array() != 0.0) && (data.array() != 1.0)).any()) {
    throw DimensionMismatch("train_cd: data must be 0/1");
  }

  RbmParams params =
      initial_rbm(config.n_visible, config.n_hidden, config.rng_seed);
  std::mt19937_64 rng =
      rng::make_engine(rng::mix(config.rng_seed, 0x7261696eull));
  const double n = static_cast<double>(data.rows());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Matrix grad_w = Matrix::Zero(params.weights.rows(), params.weights.cols());
    Vector grad_v = Vector::Zero(params.visible_bias.size());
    Vector grad_h = Vector::Zero(params.hidden_bias.size());

    for (Index row = 0; row < data.rows(); ++row) {
      const Vector v0 = data.row(row).transpose();
      const Vector h0_prob = hidden_activation(params, v0);

      Vector h_sample = bernoulli(h0_prob, rng);
      Vector vk;
      Vector hk_prob;
      for (int step = 0; step < config.cd_steps; ++step) {
        vk = bernoulli(visible_activation(params, h_sample), rng);
        hk_prob = hidden_activation(params, vk);
        if (step + 1 < config.cd_steps) {
          h_sample = bernoulli(hk_prob, rng);
        }
      }

      grad_w += v0 * h0_prob.transpose() - vk * hk_prob.transpose();
      grad_v += v0 - vk;
      grad_h += h0_prob - hk_prob;
    }

    params.weights += (config.learning_rate / n) * grad_w;
    params.visible_bias += (config.learning_rate / n) * grad_v;
    params.hidden_bias += (config.learning_rate / n) * grad_h;
  }
  return params;
}

Matrix gibbs_sample(const RbmParams& params, int n, int iterations,
                    std::mt19937_64& rng) {
  if (n < 1 || iterations < 1) {
    throw DimensionMismatch("gibbs_sample: counts must be positive");
  }
  Matrix samples(n, params.visible());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int chain = 0; chain < n; ++chain) {
    Vector v(params.visible());
    for (Index i = 0; i < v.size(); ++i) {
      v(i) = unit(rng) < 0.5 ? 1.0 : 0.0;
    }
    for (int it = 0; it < iterations; ++it) {
      const Vector h = bernoulli(hidden_activation(params, v), rng);
      v = bernoulli(visible_activation(params, h), rng);
    }
    samples.row(chain) = v.transpose();
  }
  return samples;
}

ObservationModel estimate_likelihood(
    const std::vector<Matrix>& samples_per_state, const FlagReducer& reduce,
    Index n_observations, double alpha) {
  if (samples_per_state.empty()) {
    throw EmptyData("estimate_likelihood: no states");
  }
  if (!reduce) {
    throw DimensionMismatch("estimate_likelihood: reducer must be callable");
  }
  if (n_observations < 1) {
    throw DimensionMismatch("estimate_likelihood: need an observation space");
  }
  Matrix rows(static_cast<Index>(samples_per_state.size()), n_observations);
  for (std::size_t x = 0; x < samples_per_state.size(); ++x) {
    const Matrix& samples = samples_per_state[x];
    if (samples.rows() < 1) {
      throw EmptyData("estimate_likelihood: state " + std::to_string(x) +
                      " has no samples");
    }
    const double state_alpha =
        alpha < 0.0 ? 1.0 / static_cast<double>(samples.rows()) : alpha;
    Vector counts = Vector::Zero(n_observations);
    for (Index r = 0; r < samples.rows(); ++r) {
      const Index reduced = reduce(samples.row(r));
      if (reduced < 0 || reduced >= n_observations) {
        throw DimensionMismatch(
            "estimate_likelihood: reducer left the observation space");
      }
      counts(reduced) += 1.0;
    }
    const Vector smoothed = counts.array() + state_alpha;
    rows.row(static_cast<Index>(x)) = smoothed.transpose() / smoothed.sum();
  }
  return ObservationModel(std::move(rows));
}

void save_rbm_json(const std::string& path, const RbmParams& params) {
  nlohmann::json doc;
  doc["visible"] = params.visible();
  doc["hidden"] = params.hidden();
  auto& w = doc["weights"] = nlohmann::json::array();
  for (Index i = 0; i < params.weights.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < params.weights.cols(); ++j) {
      row.push_back(params.weights(i, j));
    }
    w.push_back(std::move(row));
  }
  doc["visible_bias"] = std::vector<double>(
      params.visible_bias.data(),
      params.visible_bias.data() + params.visible_bias.size());
  doc["hidden_bias"] = std::vector<double>(
      params.hidden_bias.data(),
      params.hidden_bias.data() + params.hidden_bias.size());
  std::ofstream out(path);
  if (!out) {
    throw EmptyData("save_rbm_json: cannot open " + path);
  }
  out << doc.dump(2) << "\n";
}

RbmParams load_rbm_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw EmptyData("load_rbm_json: cannot open " + path);
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  const Index visible = doc.at("visible").get<Index>();
  const Index hidden = doc.at("hidden").get<Index>();
  RbmParams params;
  params.weights = Matrix(visible, hidden);
  const auto& w = doc.at("weights");
  for (Index i = 0; i < visible; ++i) {
    for (Index j = 0; j < hidden; ++j) {
      params.weights(i, j) =
          w.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j))
              .get<double>();
    }
  }
  const auto vb = doc.at("visible_bias").get<std::vector<double>>();
  const auto hb = doc.at("hidden_bias").get<std::vector<double>>();
  if (static_cast<Index>(vb.size()) != visible ||
      static_cast<Index>(hb.size()) != hidden) {
    throw DimensionMismatch("load_rbm_json: bias sizes disagree with units");
  }
  params.visible_bias = Eigen::Map<const Vector>(vb.data(), visible);
  params.hidden_bias = Eigen::Map<const Vector>(hb.data(), hidden);
  return params;
}

}  // namespace herd
