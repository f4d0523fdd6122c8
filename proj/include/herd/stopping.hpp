#pragma once
// Quickest-time herding as an optimal stopping problem. A policymaker
// either lets the next agent reveal its observation (continue, decision 2)
// or stops and lets everyone herd on the myopic action (decision 1).
// Threshold policies on pi(0), their Monte Carlo welfare cost, SPSA tuning
// of the threshold, and a value-iteration oracle on the two-state belief
// grid.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "herd/belief.hpp"
#include "herd/types.hpp"

namespace herd {

struct StoppingCostParams {
  double rho = 0.5;    // discount, in (0, 1)
  double d = 0.1;      // per-step delay cost while the state is the target
  double delta = 1.0;  // terminal error cost for announcing the target wrongly
  Index target_state = 0;
};

struct ThresholdPolicy {
  double gamma = 0.5;  // continue iff pi(0) <= gamma
};

enum class Decision : int {
  stop = 1,     // herd: everyone plays the myopic action
  reveal = 2,   // continue: the next agent's observation becomes the action
};

// C(pi, 1) = min_u c_u' pi / (1 - rho).
double stop_cost(const Belief& belief, const CostModel& cost,
                 const StoppingCostParams& params);

// C(pi, 2) = sum_y c_y' B_y pi + (d + (1-rho) delta) e_target' pi
//            - (1-rho) delta.
double continue_cost(const Belief& belief, const ObservationModel& model,
                     const CostModel& cost, const StoppingCostParams& params);

// Action under the constrained decision rule: reveal copies y, stop plays
// the myopic action.
Index constrained_decision(const Belief& belief, Index y, Decision a,
                           const CostModel& cost);

Decision threshold_decide(const Belief& belief, const ThresholdPolicy& policy);

struct EpisodeResult {
  std::optional<int> tau;  // stopping step, >= 1; empty if the cap hit first
  double discounted_cost = 0.0;
  std::vector<std::pair<Decision, Index>> action_log;  // one entry per step
};

// Runs one episode against a fixed true state. Cost terms are the
// analytic conditional expectations of the welfare objective evaluated at
// the current public belief; after stopping the frozen myopic action
// fills the log to the cap.
EpisodeResult simulate_stopping_run(const Belief& initial, Index true_state,
                                    const ThresholdPolicy& policy,
                                    const ObservationModel& model,
                                    const CostModel& cost,
                                    const StoppingCostParams& params,
                                    int horizon_cap, std::mt19937_64& rng);

// Mean discounted cost over episodes with the state drawn from `initial`
// each episode. Per-episode generators derive from `rng`, so episodes are
// independent and order-insensitive.
double evaluate_welfare_cost(const Belief& initial,
                             const ThresholdPolicy& policy,
                             const ObservationModel& model,
                             const CostModel& cost,
                             const StoppingCostParams& params, int n_episodes,
                             int horizon_cap, std::mt19937_64& rng);

struct SpsaConfig {
  double a = 0.1;
  double big_a = 10.0;
  double alpha = 0.602;
  double c = 0.05;
  double gamma_exp = 0.101;
};

// Simultaneous-perturbation descent on gamma in [0, 1]. `evaluate` is a
// (possibly noisy) measurement of the welfare cost at a threshold.
ThresholdPolicy spsa_optimize_threshold(
    double initial_gamma,
    const std::function<double(double, std::mt19937_64&)>& evaluate,
    int iterations, const SpsaConfig& config, std::mt19937_64& rng);

struct BeliefGridSolution {
  Vector grid;                     // pi(0) gridpoints, ascending
  Vector value;                    // V at each gridpoint
  std::vector<Decision> decision;  // optimal decision at each gridpoint
  int sweeps = 0;
};

// Two-state value iteration on a uniform pi(0) grid with linear
// interpolation; fixed point to sup-norm `tol` or NonConvergence.
BeliefGridSolution value_iteration_oracle(int grid_resolution,
                                          const ObservationModel& model,
                                          const CostModel& cost,
                                          const StoppingCostParams& params,
                                          double tol = 1e-8,
                                          int max_sweeps = 100000);

}  // namespace herd
