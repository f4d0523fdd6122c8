#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "herd/cascade.hpp"
#include "herd/errors.hpp"
#include "herd/presets.hpp"
#include "herd/rng.hpp"

using namespace herd;

namespace {

ObservationModel two_state_model() {
  Matrix b(2, 2);
  b << 0.8, 0.2, 0.3, 0.7;
  return ObservationModel(b);
}

CostModel misclassification_2() {
  Matrix c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  return CostModel(c);
}

bool same_bits(const Belief& a, const Belief& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.probs().data(), b.probs().data(),
                     sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

ObservationModel random_model(Index states, Index obs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  Matrix b(states, obs);
  for (Index i = 0; i < states; ++i) {
    for (Index j = 0; j < obs; ++j) b(i, j) = unit(rng);
    b.row(i) /= b.row(i).sum();
  }
  return ObservationModel(b);
}

CostModel random_cost(Index states, Index actions, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix c(states, actions);
  for (Index i = 0; i < states; ++i) {
    for (Index j = 0; j < actions; ++j) c(i, j) = unit(rng);
  }
  return CostModel(c);
}

// Expected sum of actions over `depth` further agents, by expanding the
// observation tree (observations drawn from the true state's row).
double expected_action_sum(const Belief& pi, Index true_state,
                           const ObservationModel& model,
                           const CostModel& cost, int depth) {
  if (depth == 0) return 0.0;
  double total = 0.0;
  for (Index y = 0; y < model.observations(); ++y) {
    const double p = model(true_state, y);
    if (p <= 0.0) continue;
    const AgentTrace trace =
        agent_step_with_observation(pi, y, model, cost, 1);
    total += p * (static_cast<double>(trace.u) +
                  expected_action_sum(trace.public_belief_after, true_state,
                                      model, cost, depth - 1));
  }
  return total;
}

}  // namespace

TEST_CASE("log ratio matrix is antisymmetric and reports clamping") {
  Vector v(3);
  v << 0.5, 0.25, 0.0;
  bool clamped = false;
  const Matrix g = log_ratio_matrix(v, 1e-12, &clamped);
  CHECK(clamped);
  CHECK(g(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      CHECK(g(i, j) == doctest::Approx(-g(j, i)).epsilon(1e-12));
    }
  }
  CHECK(g(0, 2) == doctest::Approx(std::log(0.5 / 1e-12)).epsilon(1e-9));

  clamped = true;
  Vector w(2);
  w << 0.5, 0.5;
  log_ratio_matrix(w, 1e-12, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("sample observation follows the true state's row") {
  Matrix b(2, 2);
  b << 1.0, 0.0, 0.3, 0.7;
  const ObservationModel model(b);
  std::mt19937_64 rng = rng::make_engine(21);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_observation(0, model, rng) == 0);
  }
  int toxic = 0;
  for (int i = 0; i < 100000; ++i) {
    toxic += sample_observation(1, model, rng) == 1 ? 1 : 0;
  }
  CHECK(static_cast<double>(toxic) / 100000.0 ==
        doctest::Approx(0.7).epsilon(0.02));
  CHECK_THROWS_AS(sample_observation(2, model, rng), DimensionMismatch);
}

TEST_CASE("agent step with a forced observation composes update and filter") {
  const AgentTrace trace = agent_step_with_observation(
      Belief::uniform(2), 0, two_state_model(), misclassification_2(), 3);
  CHECK(trace.k == 3);
  CHECK(trace.y == 0);
  CHECK(trace.u == 0);
  CHECK(trace.public_belief_after(0) ==
        doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(trace.public_belief_after(1) ==
        doctest::Approx(3.0 / 11.0).epsilon(1e-12));
  // Gamma = log P(u=0|x=i) - log P(u=0|x=j) with likelihood (0.8, 0.3)
  CHECK(trace.gamma(0, 1) ==
        doctest::Approx(std::log(0.8 / 0.3)).epsilon(1e-12));
  CHECK(trace.gamma_max_abs ==
        doctest::Approx(std::log(0.8 / 0.3)).epsilon(1e-12));
  CHECK_FALSE(trace.log_clamped);

  CHECK_THROWS_AS(
      agent_step_with_observation(Belief::point_mass(2, 0),
                                  1, ObservationModel([] {
                                    Matrix m(2, 2);
                                    m << 1.0, 0.0, 0.3, 0.7;
                                    return m;
                                  }()),
                                  misclassification_2(), 1),
      ZeroLikelihood);
}

TEST_CASE("inside a cascade the public belief freezes and y is ignored") {
  Vector peaked(2);
  peaked << 0.99, 0.01;
  const Belief prior{peaked};
  const ObservationModel model = two_state_model();
  const CostModel cost = misclassification_2();
  REQUIRE(detect_cascade(prior, model, cost));

  const AgentTrace t0 = agent_step_with_observation(prior, 0, model, cost);
  const AgentTrace t1 = agent_step_with_observation(prior, 1, model, cost);
  CHECK(t0.u == t1.u);
  CHECK(same_bits(t0.public_belief_after, prior));
  CHECK(same_bits(t1.public_belief_after, prior));
  // Gamma is exactly zero: the action likelihood is exact ones
  CHECK(t0.gamma_max_abs == 0.0);
}

TEST_CASE("cascade detection worked cases") {
  const ObservationModel model = two_state_model();
  const CostModel cost = misclassification_2();
  CHECK_FALSE(detect_cascade(Belief::uniform(2), model, cost));
  CHECK(detect_cascade(Belief::point_mass(2, 1), model, cost));

  // uninformative observations always cascade
  Matrix flat(2, 3);
  flat << 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  Matrix c23(2, 3);
  c23 << 0.0, 1.0, 2.0, 2.0, 1.0, 0.0;
  CHECK(detect_cascade(Belief(Vector::Constant(2, 0.5)),
                       ObservationModel(flat), CostModel(c23)));
}

TEST_CASE("cascade detection agrees with the all-zero-Gamma condition") {
  std::mt19937_64 rng = rng::make_engine(22);
  for (int trial = 0; trial < 200; ++trial) {
    const Index states = 2 + static_cast<Index>(rng() % 4);
    const Index obs = 2 + static_cast<Index>(rng() % 4);
    const Index actions = 2 + static_cast<Index>(rng() % 4);
    const ObservationModel m = random_model(states, obs, rng);
    const CostModel c = random_cost(states, actions, rng);
    Vector p(states);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (Index i = 0; i < states; ++i) p(i) = unit(rng);
    // half the trials peak the prior to hit the cascade region often
    if (trial % 2 == 0) p(static_cast<Index>(rng() % static_cast<std::uint64_t>(states))) += 30.0;
    const Belief prior(p);

    // cascaded iff every realizable step has an all-zero increment matrix
    bool all_zero = true;
    for (Index y = 0; y < obs; ++y) {
      const double p_y = m.matrix().col(y).dot(prior.probs());
      if (p_y <= 0.0) continue;
      const AgentTrace t = agent_step_with_observation(prior, y, m, c);
      if (t.gamma_max_abs != 0.0) all_zero = false;
    }
    CHECK(detect_cascade(prior, m, c) == all_zero);
  }
}

TEST_CASE("protocol runs are reproducible and respect the horizon") {
  ProtocolConfig config;
  config.true_state = 1;
  config.horizon = 40;
  config.initial_public_belief = Belief::uniform(2);
  config.rng_seed = 99;
  const ObservationModel model = two_state_model();
  const CostModel cost = misclassification_2();

  const ProtocolResult a = run_protocol(config, model, cost);
  const ProtocolResult b = run_protocol(config, model, cost);
  REQUIRE(a.traces.size() == 40);
  for (std::size_t k = 0; k < a.traces.size(); ++k) {
    CHECK(a.traces[k].y == b.traces[k].y);
    CHECK(a.traces[k].u == b.traces[k].u);
    CHECK(same_bits(a.traces[k].public_belief_after,
                    b.traces[k].public_belief_after));
  }

  config.horizon = 0;
  CHECK_THROWS_AS(run_protocol(config, model, cost), DimensionMismatch);
}

TEST_CASE("a strong benign prior herds everyone immediately") {
  ProtocolConfig config;
  config.true_state = 3;
  config.horizon = 25;
  config.initial_public_belief =
      make_sweep_prior(0.99, 3, 6, ResidualAllocation::true_state);
  config.rng_seed = 7;

  const ObservationModel model = severity_observation_model(6, 1.3);
  const CostModel cost = intensity_misclassification_cost(6);
  const ProtocolResult result = run_protocol(config, model, cost);

  CHECK(result.diagnostics.cascade_detected);
  REQUIRE(result.diagnostics.cascade_time.has_value());
  CHECK(*result.diagnostics.cascade_time == 1);
  CHECK(std::isinf(result.diagnostics.kappa_floor));  // no pre-cascade steps
  for (const AgentTrace& trace : result.traces) {
    CHECK(trace.u == 0);
    CHECK(same_bits(trace.public_belief_after, config.initial_public_belief));
  }
  // frozen belief => log belief ratios match the prior's; the residual
  // mass sits on the true state, every other state is clamp-floored
  CHECK(result.diagnostics.lambda(0, 3) ==
        doctest::Approx(std::log(0.99 / 0.01)).epsilon(1e-9));
}

TEST_CASE("herding in finite time on random strictly positive instances") {
  std::mt19937_64 rng = rng::make_engine(23);
  for (int trial = 0; trial < 40; ++trial) {
    const Index states = 2 + static_cast<Index>(rng() % 3);
    const Index obs = 2 + static_cast<Index>(rng() % 3);
    const ObservationModel m = random_model(states, obs, rng);
    const CostModel c = random_cost(states, states, rng);

    ProtocolConfig config;
    config.true_state = static_cast<Index>(rng() % static_cast<std::uint64_t>(states));
    config.horizon = 500;
    config.initial_public_belief = Belief::uniform(states);
    config.rng_seed = rng();

    const ProtocolResult result = run_protocol(config, m, c);
    REQUIRE(result.diagnostics.cascade_time.has_value());
    const int t = *result.diagnostics.cascade_time;

    // after the cascade starts, the public belief and action never move
    const std::size_t first = static_cast<std::size_t>(t) - 1;
    const Belief& frozen = result.traces[first].public_belief_before;
    for (std::size_t k = first; k < result.traces.size(); ++k) {
      CHECK(same_bits(result.traces[k].public_belief_before, frozen));
      CHECK(same_bits(result.traces[k].public_belief_after, frozen));
      CHECK(result.traces[k].u == result.traces[first].u);
    }
    CHECK(result.diagnostics.cascade_detected);
  }
}

TEST_CASE("sweep priors place the residual mass as asked") {
  const Belief on_true =
      make_sweep_prior(0.8, 2, 4, ResidualAllocation::true_state);
  CHECK(on_true(0) == doctest::Approx(0.8));
  CHECK(on_true(2) == doctest::Approx(0.2));
  CHECK(on_true(1) == 0.0);

  const Belief spread = make_sweep_prior(0.7, 2, 4, ResidualAllocation::uniform);
  CHECK(spread(0) == doctest::Approx(0.7));
  for (Index i = 1; i < 4; ++i) {
    CHECK(spread(i) == doctest::Approx(0.1).epsilon(1e-12));
  }

  // degenerate edge: all mass on the benign state
  const Belief all_benign =
      make_sweep_prior(1.0, 1, 2, ResidualAllocation::true_state);
  CHECK(all_benign(0) == 1.0);
  CHECK_THROWS_AS(make_sweep_prior(1.2, 0, 2, ResidualAllocation::uniform),
                  DimensionMismatch);
}

TEST_CASE("Monte Carlo sweep matches the exact expectation tree") {
  const ObservationModel model = two_state_model();
  const CostModel cost = misclassification_2();
  const int horizon = 6;

  const double exact = expected_action_sum(Belief::uniform(2), 1, model, cost,
                                           horizon) /
                       static_cast<double>(horizon);

  HerdingSweepConfig config;
  config.prior_grid = {0.5};
  config.true_states = {1};
  config.n_runs = 4000;
  config.horizon = horizon;
  config.master_seed = 31;
  const std::vector<HerdingCell> cells =
      monte_carlo_herding(config, model, cost);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].true_state == 1);
  CHECK(cells[0].prior_p0 == doctest::Approx(0.5));
  // se of the cell mean is below 0.01 at 4000 runs
  CHECK(std::abs(cells[0].mean_action - exact) < 0.04);
}

TEST_CASE("Monte Carlo sweep is deterministic given the master seed") {
  HerdingSweepConfig config;
  config.prior_grid = {0.2, 0.5, 0.95};
  config.true_states = {0, 2, 4};
  config.n_runs = 30;
  config.horizon = 20;
  config.master_seed = 5;

  const ObservationModel model = severity_observation_model(6, 1.3);
  const CostModel cost = intensity_misclassification_cost(6);
  const std::vector<HerdingCell> a = monte_carlo_herding(config, model, cost);
  const std::vector<HerdingCell> b = monte_carlo_herding(config, model, cost);
  REQUIRE(a.size() == 9);
  REQUIRE(b.size() == 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].true_state == b[i].true_state);
    CHECK(a[i].prior_p0 == b[i].prior_p0);
    CHECK(a[i].mean_action == b[i].mean_action);
    CHECK(a[i].cascade_freq == b[i].cascade_freq);
    const bool both_nan = std::isnan(a[i].mean_cascade_time) &&
                          std::isnan(b[i].mean_cascade_time);
    CHECK((both_nan || a[i].mean_cascade_time == b[i].mean_cascade_time));
  }

  config.n_runs = 0;
  CHECK_THROWS_AS(monte_carlo_herding(config, model, cost),
                  DimensionMismatch);
}

TEST_CASE("worker exceptions surface from the sweep") {
  // prior e_0 with a noiseless benign row: a toxic draw from the true
  // hateful state has zero probability under the public belief
  HerdingSweepConfig config;
  config.prior_grid = {1.0};
  config.true_states = {1};
  config.n_runs = 20;
  config.horizon = 50;
  config.master_seed = 3;
  CHECK_THROWS_AS(
      monte_carlo_herding(config, hsp_observation_model(), type1_error_cost()),
      ZeroLikelihood);
}
