#pragma once
// Sequential protocol: agents act in turn on the public belief, each
// revealing only its action, plus the diagnostics that witness herding
// (log-ratio increments Gamma) and the Monte Carlo sweep over priors.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "herd/belief.hpp"
#include "herd/types.hpp"

namespace herd {

struct AgentTrace {
  int k = 0;        // 1-based step index
  Index y = 0;      // private observation
  Index u = 0;      // action taken
  Belief public_belief_before;
  Belief public_belief_after;
  Matrix gamma;     // log P(u|x=i,pi) - log P(u|x=j,pi), clamped at 1e-12
  double gamma_max_abs = 0.0;
  bool log_clamped = false;
};

struct CascadeDiagnostics {
  Matrix lambda;    // log belief ratios of the final public belief
  Matrix gamma;     // increment matrix of the final step
  bool cascade_detected = false;
  std::optional<int> cascade_time;  // first step whose prior is cascaded
  double kappa_floor = 0.0;  // smallest positive |Gamma| seen before cascade
  bool log_clamped = false;
};

struct ProtocolConfig {
  Index true_state = 0;
  int horizon = 100;
  Belief initial_public_belief;
  std::uint64_t rng_seed = 0;
};

struct ProtocolResult {
  std::vector<AgentTrace> traces;
  CascadeDiagnostics diagnostics;
};

// Entries below `clamp` are floored before the log; *clamped reports
// whether the floor fired.
Matrix log_ratio_matrix(const Vector& values, double clamp = 1e-12,
                        bool* clamped = nullptr);

Index sample_observation(Index true_state, const ObservationModel& model,
                         std::mt19937_64& rng);

// One agent's turn with the observation already fixed (deterministic part
// of agent_step; exposed for worked-example tests).
AgentTrace agent_step_with_observation(const Belief& public_belief, Index y,
                                       const ObservationModel& model,
                                       const CostModel& cost, int k = 1);

AgentTrace agent_step(const Belief& public_belief, Index true_state,
                      const ObservationModel& model, const CostModel& cost,
                      std::mt19937_64& rng, int k = 1);

// True iff one action is myopic for every observation with positive
// probability under `belief`: the information-cascade region.
bool detect_cascade(const Belief& belief, const ObservationModel& model,
                    const CostModel& cost);

ProtocolResult run_protocol(const ProtocolConfig& config,
                            const ObservationModel& model,
                            const CostModel& cost);

enum class ResidualAllocation {
  true_state,  // prior mass 1 - p0 sits on the run's true state
  uniform,     // spread evenly over states != 0
};

struct HerdingSweepConfig {
  std::vector<double> prior_grid;      // p0 values
  std::vector<Index> true_states;
  int n_runs = 100;
  int horizon = 100;
  std::uint64_t master_seed = 0;
  ResidualAllocation residual = ResidualAllocation::true_state;
};

struct HerdingCell {
  Index true_state = 0;
  double prior_p0 = 0.0;
  double mean_action = 0.0;
  double cascade_freq = 0.0;
  double mean_cascade_time = 0.0;  // NaN when no run cascaded
};

Belief make_sweep_prior(double p0, Index true_state, Index n_states,
                        ResidualAllocation residual);

// Cells run in parallel; every run draws its generator from
// (master_seed, cell, run) so results are scheduling-independent.
std::vector<HerdingCell> monte_carlo_herding(const HerdingSweepConfig& config,
                                             const ObservationModel& model,
                                             const CostModel& cost);

}  // namespace herd
