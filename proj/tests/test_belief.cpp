#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "herd/belief.hpp"
#include "herd/errors.hpp"
#include "herd/presets.hpp"
#include "herd/rng.hpp"
#include "herd/types.hpp"

using namespace herd;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

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

// random row-stochastic matrix with entries bounded away from zero
ObservationModel random_model(Index states, Index obs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  Matrix b(states, obs);
  for (Index i = 0; i < states; ++i) {
    for (Index j = 0; j < obs; ++j) b(i, j) = unit(rng);
    b.row(i) /= b.row(i).sum();
  }
  return ObservationModel(b);
}

Belief random_belief(Index states, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  Vector p(states);
  for (Index i = 0; i < states; ++i) p(i) = unit(rng);
  return Belief(p);
}

CostModel random_cost(Index states, Index actions, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix c(states, actions);
  for (Index i = 0; i < states; ++i) {
    for (Index j = 0; j < actions; ++j) c(i, j) = unit(rng);
  }
  return CostModel(c);
}

}  // namespace

TEST_CASE("belief construction validates and renormalizes") {
  Belief b(vec2(2.0, 6.0));
  CHECK(b(0) == doctest::Approx(0.25));
  CHECK(b(1) == doctest::Approx(0.75));
  CHECK(b.probs().sum() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(Belief(vec2(-0.1, 1.1)), DimensionMismatch);
  CHECK_THROWS_AS(Belief(vec2(0.0, 0.0)), DimensionMismatch);
  CHECK_THROWS_AS(Belief(vec2(std::nan(""), 1.0)), DimensionMismatch);

  CHECK(Belief::uniform(4)(2) == doctest::Approx(0.25));
  CHECK(Belief::point_mass(3, 1)(1) == 1.0);
  CHECK(Belief::point_mass(3, 1)(0) == 0.0);
}

TEST_CASE("observation and cost model validation") {
  Matrix bad_row(2, 2);
  bad_row << 0.9, 0.2, 0.3, 0.7;
  CHECK_THROWS_AS(ObservationModel{bad_row}, DimensionMismatch);

  Matrix negative(2, 2);
  negative << 1.1, -0.1, 0.3, 0.7;
  CHECK_THROWS_AS(ObservationModel{negative}, DimensionMismatch);

  Matrix inf_cost(2, 2);
  inf_cost << 0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0;
  CHECK_THROWS_AS(CostModel{inf_cost}, DimensionMismatch);

  CHECK_THROWS_AS(
      bayes_update(Belief::uniform(3), two_state_model(), 0),
      DimensionMismatch);
}

TEST_CASE("bayes update worked cases") {
  const ObservationModel model = two_state_model();

  // (0.5*0.8, 0.5*0.3) normalized
  Belief fifty = bayes_update(Belief::uniform(2), model, 0);
  CHECK(fifty(0) == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(fifty(1) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));

  // degenerate prior is a fixed point
  Belief point = bayes_update(Belief::point_mass(2, 1), model, 1);
  CHECK(point(0) == 0.0);
  CHECK(point(1) == 1.0);

  // uninformative rows leave the prior unchanged
  Matrix flat(2, 2);
  flat << 0.5, 0.5, 0.5, 0.5;
  Belief same = bayes_update(Belief(vec2(0.3, 0.7)), ObservationModel(flat), 1);
  CHECK(same(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(same(1) == doctest::Approx(0.7).epsilon(1e-12));

  // observation with zero probability under the prior
  Matrix hsp(2, 2);
  hsp << 1.0, 0.0, 0.3, 0.7;
  CHECK_THROWS_AS(
      bayes_update(Belief::point_mass(2, 0), ObservationModel(hsp), 1),
      ZeroLikelihood);
  CHECK_THROWS_AS(bayes_update(Belief::uniform(2), model, 5),
                  DimensionMismatch);
}

TEST_CASE("bayes update matches direct summation on random instances") {
  std::mt19937_64 rng = rng::make_engine(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index states = 2 + static_cast<Index>(rng() % 5);
    const Index obs = 2 + static_cast<Index>(rng() % 5);
    const ObservationModel model = random_model(states, obs, rng);
    const Belief prior = random_belief(states, rng);
    const Index y = static_cast<Index>(rng() % static_cast<std::uint64_t>(obs));

    const Belief updated = bayes_update(prior, model, y);
    double normalizer = 0.0;
    for (Index x = 0; x < states; ++x) normalizer += model(x, y) * prior(x);
    for (Index x = 0; x < states; ++x) {
      CHECK(updated(x) ==
            doctest::Approx(model(x, y) * prior(x) / normalizer).epsilon(1e-12));
    }
    CHECK(updated.probs().sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("expected cost worked cases") {
  const CostModel cost = misclassification_2();
  CHECK(expected_cost(Belief::point_mass(2, 1), cost, 0) == 1.0);
  Matrix ramp(2, 1);
  ramp << 0.0, 1.0;
  CHECK(expected_cost(Belief::uniform(2), CostModel(ramp), 0) ==
        doctest::Approx(0.5));
  CHECK(expected_cost(Belief(vec2(0.9, 0.1)), cost, 0) ==
        doctest::Approx(0.1));
  CHECK_THROWS_AS(expected_cost(Belief::uniform(2), cost, 2),
                  DimensionMismatch);
}

TEST_CASE("myopic action worked cases and tie rule") {
  const CostModel cost = misclassification_2();
  CHECK(myopic_action(Belief(vec2(0.9, 0.1)), cost) == 0);
  CHECK(myopic_action(Belief::uniform(2), cost) == 0);  // tie -> lowest

  // six-state intensity cost at a point mass on the benign state
  CHECK(myopic_action(Belief::point_mass(6, 0),
                      intensity_misclassification_cost(6)) == 0);
}

TEST_CASE("action likelihood worked example and stochasticity") {
  const ObservationModel model = two_state_model();
  const CostModel cost = misclassification_2();
  const Belief prior = Belief::uniform(2);

  const Vector l0 = action_likelihood(prior, model, cost, 0);
  CHECK(l0(0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(l0(1) == doctest::Approx(0.3).epsilon(1e-15));
  const Vector l1 = action_likelihood(prior, model, cost, 1);
  CHECK(l1(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(l1(1) == doctest::Approx(0.7).epsilon(1e-15));

  // cascade case: point-mass prior pins the action, likelihood is exact ones
  const Vector ones =
      action_likelihood(Belief::point_mass(2, 0), model, cost, 0);
  CHECK(ones(0) == 1.0);
  CHECK(ones(1) == 1.0);

  // partition of the observation space: rows sum to one over actions
  std::mt19937_64 rng = rng::make_engine(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Index states = 2 + static_cast<Index>(rng() % 5);
    const Index obs = 2 + static_cast<Index>(rng() % 5);
    const Index actions = 2 + static_cast<Index>(rng() % 5);
    const ObservationModel m = random_model(states, obs, rng);
    const Belief p = random_belief(states, rng);
    const CostModel c = random_cost(states, actions, rng);
    for (Index i = 0; i < states; ++i) {
      double total = 0.0;
      for (Index u = 0; u < actions; ++u) {
        total += action_likelihood(p, m, c, u)(i);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("social filter worked example, fixed point, and errors") {
  const ObservationModel model = two_state_model();
  const CostModel cost = misclassification_2();

  const Belief updated =
      social_filter_update(Belief::uniform(2), model, cost, 0);
  CHECK(updated(0) == doctest::Approx(8.0 / 11.0).epsilon(1e-12));
  CHECK(updated(1) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));

  // cascade region: returns the prior bitwise
  const Belief peaked(vec2(0.99, 0.01));
  const Belief frozen = social_filter_update(peaked, model, cost, 0);
  CHECK(frozen.probs()(0) == peaked.probs()(0));
  CHECK(frozen.probs()(1) == peaked.probs()(1));

  // degenerate beliefs are absorbing
  const Belief corner = Belief::point_mass(2, 1);
  const Belief still = social_filter_update(corner, model, cost, 1);
  CHECK(still(0) == 0.0);
  CHECK(still(1) == 1.0);

  // action that cannot occur: at a peaked prior every observation maps to
  // action 0, so conditioning on action 1 is impossible
  CHECK_THROWS_AS(social_filter_update(peaked, model, cost, 1),
                  ImpossibleAction);
}

TEST_CASE("martingale property of the social filter") {
  std::mt19937_64 rng = rng::make_engine(13);
  for (int trial = 0; trial < 300; ++trial) {
    const Index states = 2 + static_cast<Index>(rng() % 5);
    const Index obs = 2 + static_cast<Index>(rng() % 5);
    const Index actions = 2 + static_cast<Index>(rng() % 5);
    const ObservationModel m = random_model(states, obs, rng);
    const Belief p = random_belief(states, rng);
    const CostModel c = random_cost(states, actions, rng);

    Vector mixture = Vector::Zero(states);
    double sigma_total = 0.0;
    for (Index u = 0; u < actions; ++u) {
      const double sigma = action_marginal(p, m, c, u);
      if (sigma <= 0.0) continue;
      mixture += sigma * social_filter_update(p, m, c, u).probs();
      sigma_total += sigma;
    }
    CHECK(sigma_total == doctest::Approx(1.0).epsilon(1e-9));
    for (Index i = 0; i < states; ++i) {
      CHECK(mixture(i) == doctest::Approx(p(i)).epsilon(1e-9));
    }
  }
}
