#include "herd/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "herd/cascade.hpp"
#include "herd/rng.hpp"

namespace herd {

namespace {

void check_params(const StoppingCostParams& params, Index n_states) {
  if (!(params.rho >= 0.0) || !(params.rho < 1.0)) {
    throw DimensionMismatch("stopping params: rho must lie in [0, 1)");
  }
  if (params.target_state < 0 || params.target_state >= n_states) {
    throw DimensionMismatch("stopping params: target state out of range");
  }
}

double min_expected_cost(const Belief& belief, const CostModel& cost) {
  double best = cost.matrix().col(0).dot(belief.probs());
  for (Index u = 1; u < cost.actions(); ++u) {
    best = std::min(best, cost.matrix().col(u).dot(belief.probs()));
  }
  return best;
}

// sum_y c_y' B_y pi: expected one-step cost of playing the revealed
// observation as the action.
double reveal_cost(const Belief& belief, const ObservationModel& model,
                   const CostModel& cost) {
  double total = 0.0;
  for (Index y = 0; y < model.observations(); ++y) {
    const Vector weights = model.matrix().col(y).cwiseProduct(belief.probs());
    total += cost.matrix().col(y).dot(weights);
  }
  return total;
}

}  // namespace

double stop_cost(const Belief& belief, const CostModel& cost,
                 const StoppingCostParams& params) {
  require_same_states(belief, cost);
  check_params(params, belief.size());
  return min_expected_cost(belief, cost) / (1.0 - params.rho);
}

double continue_cost(const Belief& belief, const ObservationModel& model,
                     const CostModel& cost, const StoppingCostParams& params) {
  require_same_states(belief, model);
  require_same_states(belief, cost);
  check_params(params, belief.size());
  if (model.observations() > cost.actions()) {
    throw DimensionMismatch(
        "continue_cost: revealing needs an action per observation");
  }
  const double target_mass = belief(params.target_state);
  return reveal_cost(belief, model, cost) +
         (params.d + (1.0 - params.rho) * params.delta) * target_mass -
         (1.0 - params.rho) * params.delta;
}

Index constrained_decision(const Belief& belief, Index y, Decision a,
                           const CostModel& cost) {
  if (a == Decision::reveal) {
    if (y < 0 || y >= cost.actions()) {
      throw DimensionMismatch(
          "constrained_decision: revealed observation has no matching action");
    }
    return y;
  }
  return myopic_action(belief, cost);
}

Decision threshold_decide(const Belief& belief, const ThresholdPolicy& policy) {
  return belief(0) <= policy.gamma ? Decision::reveal : Decision::stop;
}

EpisodeResult simulate_stopping_run(const Belief& initial, Index true_state,
                                    const ThresholdPolicy& policy,
                                    const ObservationModel& model,
                                    const CostModel& cost,
                                    const StoppingCostParams& params,
                                    int horizon_cap, std::mt19937_64& rng) {
  require_same_states(initial, model);
  require_same_states(initial, cost);
  check_params(params, initial.size());
  if (horizon_cap < 1) {
    throw DimensionMismatch("simulate_stopping_run: horizon cap must be >= 1");
  }

  EpisodeResult result;
  result.action_log.reserve(static_cast<std::size_t>(horizon_cap));
  Belief belief = initial;
  double discount = 1.0;  // rho^(k-1)

  for (int k = 1; k <= horizon_cap; ++k) {
    const Decision a = threshold_decide(belief, policy);
    if (a == Decision::stop) {
      result.tau = k;
      result.discounted_cost +=
          discount * params.delta * (1.0 - belief(params.target_state)) +
          discount * stop_cost(belief, cost, params);
      const Index frozen = constrained_decision(belief, 0, Decision::stop,
                                                cost);
      for (int rest = k; rest <= horizon_cap; ++rest) {
        result.action_log.emplace_back(Decision::stop, frozen);
      }
      break;
    }
    result.discounted_cost +=
        discount * (reveal_cost(belief, model, cost) +
                    params.d * belief(params.target_state));
    const Index y = sample_observation(true_state, model, rng);
    const Index u = constrained_decision(belief, y, Decision::reveal, cost);
    result.action_log.emplace_back(Decision::reveal, u);
    belief = bayes_update(belief, model, y);
    discount *= params.rho;
  }
  return result;
}

double evaluate_welfare_cost(const Belief& initial,
                             const ThresholdPolicy& policy,
                             const ObservationModel& model,
                             const CostModel& cost,
                             const StoppingCostParams& params, int n_episodes,
                             int horizon_cap, std::mt19937_64& rng) {
  if (n_episodes < 1) {
    throw DimensionMismatch("evaluate_welfare_cost: n_episodes must be >= 1");
  }
  const std::uint64_t master = rng();
  double total = 0.0;
  for (int episode = 0; episode < n_episodes; ++episode) {
    std::mt19937_64 episode_rng = rng::make_engine(
        rng::derive_seed(master, static_cast<std::uint64_t>(episode)));
    // State drawn from the initial belief; the cost terms are conditional
    // expectations, so the draw only shapes the observation path.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double draw = unit(episode_rng);
    Index state = initial.size() - 1;
    double cumulative = 0.0;
    for (Index x = 0; x < initial.size(); ++x) {
      cumulative += initial(x);
      if (draw < cumulative) {
        state = x;
        break;
      }
    }
    total += simulate_stopping_run(initial, state, policy, model, cost,
                                   params, horizon_cap, episode_rng)
                 .discounted_cost;
  }
  return total / static_cast<double>(n_episodes);
}

ThresholdPolicy spsa_optimize_threshold(
    double initial_gamma,
    const std::function<double(double, std::mt19937_64&)>& evaluate,
    int iterations, const SpsaConfig& config, std::mt19937_64& rng) {
  if (!evaluate) {
    throw DimensionMismatch("spsa: evaluator must be callable");
  }
  auto clamp01 = [](double g) { return std::clamp(g, 0.0, 1.0); };
  double gamma = clamp01(initial_gamma);
  for (int n = 1; n <= iterations; ++n) {
    const double a_n =
        config.a / std::pow(static_cast<double>(n) + config.big_a,
                            config.alpha);
    const double c_n =
        config.c / std::pow(static_cast<double>(n), config.gamma_exp);
    const double delta = (rng() & 1ull) ? 1.0 : -1.0;
    const double plus = evaluate(clamp01(gamma + c_n * delta), rng);
    const double minus = evaluate(clamp01(gamma - c_n * delta), rng);
    const double gradient = (plus - minus) / (2.0 * c_n * delta);
    gamma = clamp01(gamma - a_n * gradient);
  }
  return ThresholdPolicy{gamma};
}

BeliefGridSolution value_iteration_oracle(int grid_resolution,
                                          const ObservationModel& model,
                                          const CostModel& cost,
                                          const StoppingCostParams& params,
                                          double tol, int max_sweeps) {
  if (model.states() != 2 || cost.states() != 2) {
    throw DimensionMismatch("value_iteration_oracle: two-state beliefs only");
  }
  if (grid_resolution < 16) {
    throw DimensionMismatch("value_iteration_oracle: grid resolution >= 16");
  }
  check_params(params, 2);

  const int n = grid_resolution;
  Vector grid(n);
  for (int i = 0; i < n; ++i) {
    grid(i) = static_cast<double>(i) / static_cast<double>(n - 1);
  }

  struct Transition {
    double probability;  // P(y | pi)
    double position;     // next pi(0) in grid units
  };
  // Per gridpoint: immediate costs and the belief transition per
  // observation (skipping zero-probability ones).
  std::vector<double> stop_values(static_cast<std::size_t>(n));
  std::vector<double> continue_values(static_cast<std::size_t>(n));
  std::vector<std::vector<Transition>> transitions(
      static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector p(2);
    p << grid(i), 1.0 - grid(i);
    const Belief belief{p};
    stop_values[static_cast<std::size_t>(i)] = stop_cost(belief, cost, params);
    continue_values[static_cast<std::size_t>(i)] =
        continue_cost(belief, model, cost, params);
    for (Index y = 0; y < model.observations(); ++y) {
      const double p_y = model.matrix().col(y).dot(belief.probs());
      if (p_y <= 0.0) {
        continue;
      }
      const Belief next = bayes_update(belief, model, y);
      transitions[static_cast<std::size_t>(i)].push_back(
          {p_y, next(0) * static_cast<double>(n - 1)});
    }
  }

  auto interpolate = [&](const Vector& values, double position) {
    const double clamped =
        std::clamp(position, 0.0, static_cast<double>(n - 1));
    const int low = static_cast<int>(std::floor(clamped));
    const int high = std::min(low + 1, n - 1);
    const double w = clamped - static_cast<double>(low);
    return (1.0 - w) * values(low) + w * values(high);
  };

  Vector value = Vector::Zero(n);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    Vector updated(n);
    for (int i = 0; i < n; ++i) {
      double expected_next = 0.0;
      for (const Transition& t : transitions[static_cast<std::size_t>(i)]) {
        expected_next += t.probability * interpolate(value, t.position);
      }
      const double continue_total =
          continue_values[static_cast<std::size_t>(i)] +
          params.rho * expected_next;
      updated(i) =
          std::min(stop_values[static_cast<std::size_t>(i)], continue_total);
    }
    const double change = (updated - value).cwiseAbs().maxCoeff();
    value = std::move(updated);
    if (change < tol) {
      break;
    }
  }
  if (sweep >= max_sweeps) {
    throw NonConvergence("value_iteration_oracle: no fixed point within " +
                         std::to_string(max_sweeps) + " sweeps");
  }

  BeliefGridSolution solution;
  solution.grid = grid;
  solution.value = value;
  solution.sweeps = sweep + 1;
  solution.decision.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double expected_next = 0.0;
    for (const Transition& t : transitions[static_cast<std::size_t>(i)]) {
      expected_next += t.probability * interpolate(value, t.position);
    }
    const double continue_total = continue_values[static_cast<std::size_t>(i)] +
                                  params.rho * expected_next;
    solution.decision[static_cast<std::size_t>(i)] =
        stop_values[static_cast<std::size_t>(i)] <= continue_total
            ? Decision::stop
            : Decision::reveal;
  }
  return solution;
}

}  // namespace herd
