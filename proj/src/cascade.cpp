#include "herd/cascade.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "herd/rng.hpp"

namespace herd {

Matrix log_ratio_matrix(const Vector& values, double clamp, bool* clamped) {
  const Index n = values.size();
  bool fired = false;
  Vector logs(n);
  for (Index i = 0; i < n; ++i) {
    double v = values(i);
    if (v < clamp) {
      v = clamp;
      fired = true;
    }
    logs(i) = std::log(v);
  }
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = logs(i) - logs(j);
    }
  }
  if (clamped != nullptr) {
    *clamped = fired;
  }
  return out;
}

Index sample_observation(Index true_state, const ObservationModel& model,
                         std::mt19937_64& rng) {
  if (true_state < 0 || true_state >= model.states()) {
    throw DimensionMismatch("sample_observation: state index out of range");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double draw = unit(rng);
  double cumulative = 0.0;
  for (Index y = 0; y < model.observations(); ++y) {
    cumulative += model(true_state, y);
    if (draw < cumulative) {
      return y;
    }
  }
  // Row sums to 1 within tolerance; a draw past the accumulated mass
  // belongs to the last observation.
  return model.observations() - 1;
}

AgentTrace agent_step_with_observation(const Belief& public_belief, Index y,
                                       const ObservationModel& model,
                                       const CostModel& cost, int k) {
  AgentTrace trace;
  trace.k = k;
  trace.y = y;
  trace.public_belief_before = public_belief;

  bayes_update(public_belief, model, y);  // rejects impossible observations
  // The action comes from the same unnormalized-weight argmin that backs
  // action_likelihood; normalizing first can flip a near-tie by rounding
  // and hand the observer an action with an empty partition cell.
  trace.u = action_partition(public_belief, model, cost)[
      static_cast<std::size_t>(y)];
  trace.public_belief_after =
      social_filter_update(public_belief, model, cost, trace.u);

  const Vector likelihood = action_likelihood(public_belief, model, cost,
                                              trace.u);
  trace.gamma = log_ratio_matrix(likelihood, 1e-12, &trace.log_clamped);
  trace.gamma_max_abs = trace.gamma.cwiseAbs().maxCoeff();
  return trace;
}

AgentTrace agent_step(const Belief& public_belief, Index true_state,
                      const ObservationModel& model, const CostModel& cost,
                      std::mt19937_64& rng, int k) {
  const Index y = sample_observation(true_state, model, rng);
  return agent_step_with_observation(public_belief, y, model, cost, k);
}

bool detect_cascade(const Belief& belief, const ObservationModel& model,
                    const CostModel& cost) {
  const std::vector<Index> partition = action_partition(belief, model, cost);
  Index common = -1;
  for (Index y = 0; y < model.observations(); ++y) {
    const double p_y = model.matrix().col(y).dot(belief.probs());
    if (p_y <= 0.0) {
      continue;  // cannot occur; its tie-broken cell is irrelevant
    }
    const Index mapped = partition[static_cast<std::size_t>(y)];
    if (common == -1) {
      common = mapped;
    } else if (mapped != common) {
      return false;
    }
  }
  return true;
}

ProtocolResult run_protocol(const ProtocolConfig& config,
                            const ObservationModel& model,
                            const CostModel& cost) {
  if (config.horizon < 1) {
    throw DimensionMismatch("run_protocol: horizon must be at least 1");
  }
  require_same_states(config.initial_public_belief, model);
  require_same_states(config.initial_public_belief, cost);

  std::mt19937_64 rng = rng::make_engine(config.rng_seed);
  ProtocolResult result;
  result.traces.reserve(static_cast<std::size_t>(config.horizon));

  Belief belief = config.initial_public_belief;
  std::optional<int> cascade_time;
  double kappa_floor = std::numeric_limits<double>::infinity();
  bool any_clamped = false;

  for (int k = 1; k <= config.horizon; ++k) {
    if (!cascade_time && detect_cascade(belief, model, cost)) {
      cascade_time = k;
    }
    AgentTrace trace =
        agent_step(belief, config.true_state, model, cost, rng, k);
    any_clamped = any_clamped || trace.log_clamped;
    if (!cascade_time) {
      for (Index i = 0; i < trace.gamma.rows(); ++i) {
        for (Index j = 0; j < trace.gamma.cols(); ++j) {
          const double magnitude = std::abs(trace.gamma(i, j));
          if (magnitude > 0.0 && magnitude < kappa_floor) {
            kappa_floor = magnitude;
          }
        }
      }
    }
    belief = trace.public_belief_after;
    result.traces.push_back(std::move(trace));
  }

  CascadeDiagnostics& diag = result.diagnostics;
  bool lambda_clamped = false;
  diag.lambda = log_ratio_matrix(belief.probs(), 1e-12, &lambda_clamped);
  diag.gamma = result.traces.back().gamma;
  diag.cascade_detected = detect_cascade(belief, model, cost);
  diag.cascade_time = cascade_time;
  diag.kappa_floor = kappa_floor;
  diag.log_clamped = any_clamped || lambda_clamped;
  return result;
}

Belief make_sweep_prior(double p0, Index true_state, Index n_states,
                        ResidualAllocation residual) {
  if (p0 < 0.0 || p0 > 1.0) {
    throw DimensionMismatch("sweep prior: p0 must lie in [0, 1]");
  }
  Vector v = Vector::Zero(n_states);
  v(0) = p0;
  const double rest = 1.0 - p0;
  switch (residual) {
    case ResidualAllocation::true_state:
      v(true_state) += rest;
      break;
    case ResidualAllocation::uniform:
      if (n_states > 1) {
        for (Index i = 1; i < n_states; ++i) {
          v(i) += rest / static_cast<double>(n_states - 1);
        }
      } else {
        v(0) += rest;
      }
      break;
  }
  return Belief(std::move(v));
}

namespace {

HerdingCell run_cell(const HerdingSweepConfig& config,
                     const ObservationModel& model, const CostModel& cost,
                     std::size_t state_idx, std::size_t prior_idx) {
  const Index true_state = config.true_states[state_idx];
  const double p0 = config.prior_grid[prior_idx];
  const Belief prior = make_sweep_prior(p0, true_state, model.states(),
                                        config.residual);

  double action_sum = 0.0;
  long cascade_runs = 0;
  double cascade_time_sum = 0.0;

  for (int run = 0; run < config.n_runs; ++run) {
    ProtocolConfig protocol;
    protocol.true_state = true_state;
    protocol.horizon = config.horizon;
    protocol.initial_public_belief = prior;
    protocol.rng_seed = rng::derive_seed(config.master_seed, state_idx,
                                         prior_idx,
                                         static_cast<std::uint64_t>(run));
    const ProtocolResult result = run_protocol(protocol, model, cost);
    for (const AgentTrace& trace : result.traces) {
      action_sum += static_cast<double>(trace.u);
    }
    if (result.diagnostics.cascade_time) {
      ++cascade_runs;
      cascade_time_sum +=
          static_cast<double>(*result.diagnostics.cascade_time);
    }
  }

  HerdingCell cell;
  cell.true_state = true_state;
  cell.prior_p0 = p0;
  cell.mean_action = action_sum / (static_cast<double>(config.n_runs) *
                                   static_cast<double>(config.horizon));
  cell.cascade_freq =
      static_cast<double>(cascade_runs) / static_cast<double>(config.n_runs);
  cell.mean_cascade_time =
      cascade_runs > 0 ? cascade_time_sum / static_cast<double>(cascade_runs)
                       : std::numeric_limits<double>::quiet_NaN();
  return cell;
}

}  // namespace

std::vector<HerdingCell> monte_carlo_herding(const HerdingSweepConfig& config,
                                             const ObservationModel& model,
                                             const CostModel& cost) {
  if (config.n_runs < 1) {
    throw DimensionMismatch("monte_carlo_herding: n_runs must be positive");
  }
  if (config.prior_grid.empty() || config.true_states.empty()) {
    throw DimensionMismatch("monte_carlo_herding: empty sweep grid");
  }
  const std::size_t n_cells =
      config.true_states.size() * config.prior_grid.size();
  std::vector<HerdingCell> cells(n_cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t cell = next.fetch_add(1); cell < n_cells;
           cell = next.fetch_add(1)) {
        const std::size_t s = cell / config.prior_grid.size();
        const std::size_t p = cell % config.prior_grid.size();
        cells[cell] = run_cell(config, model, cost, s, p);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
      next.store(n_cells);  // drain remaining work
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                            n_cells);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return cells;
}

}  // namespace herd
