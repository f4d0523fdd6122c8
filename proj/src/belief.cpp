#include "herd/belief.hpp"

#include <string>

namespace herd {

namespace {

// argmin_u of c_u' w over actions with lowest-index tie-breaking; w may be
// unnormalized posterior weights.
Index argmin_cost(const Vector& weights, const CostModel& cost) {
  Index best = 0;
  double best_value = cost.matrix().col(0).dot(weights);
  for (Index u = 1; u < cost.actions(); ++u) {
    const double value = cost.matrix().col(u).dot(weights);
    if (value < best_value) {
      best_value = value;
      best = u;
    }
  }
  return best;
}

}  // namespace

Belief bayes_update(const Belief& prior, const ObservationModel& model,
                    Index y) {
  require_same_states(prior, model);
  if (y < 0 || y >= model.observations()) {
    throw DimensionMismatch("bayes_update: observation index out of range");
  }
  Vector unnormalized = model.matrix().col(y).cwiseProduct(prior.probs());
  const double normalizer = unnormalized.sum();
  if (!(normalizer > 0.0)) {
    throw ZeroLikelihood("bayes_update: observation " + std::to_string(y) +
                         " has zero probability under the prior");
  }
  return Belief(std::move(unnormalized));
}

double expected_cost(const Belief& belief, const CostModel& cost, Index u) {
  require_same_states(belief, cost);
  if (u < 0 || u >= cost.actions()) {
    throw DimensionMismatch("expected_cost: action index out of range");
  }
  return cost.matrix().col(u).dot(belief.probs());
}

Index myopic_action(const Belief& belief, const CostModel& cost) {
  require_same_states(belief, cost);
  return argmin_cost(belief.probs(), cost);
}

std::vector<Index> action_partition(const Belief& prior,
                                    const ObservationModel& model,
                                    const CostModel& cost) {
  require_same_states(prior, model);
  require_same_states(prior, cost);
  std::vector<Index> partition(static_cast<std::size_t>(model.observations()));
  for (Index y = 0; y < model.observations(); ++y) {
    const Vector weights = model.matrix().col(y).cwiseProduct(prior.probs());
    partition[static_cast<std::size_t>(y)] = argmin_cost(weights, cost);
  }
  return partition;
}

Vector action_likelihood(const Belief& prior, const ObservationModel& model,
                         const CostModel& cost, Index u) {
  if (u < 0 || u >= cost.actions()) {
    throw DimensionMismatch("action_likelihood: action index out of range");
  }
  const std::vector<Index> partition = action_partition(prior, model, cost);
  bool covers_all = true;
  for (Index mapped : partition) {
    if (mapped != u) {
      covers_all = false;
      break;
    }
  }
  if (covers_all) {
    // Row sums of B are 1, so the likelihood is the ones vector exactly.
    return Vector::Ones(model.states());
  }
  Vector likelihood = Vector::Zero(model.states());
  for (Index y = 0; y < model.observations(); ++y) {
    if (partition[static_cast<std::size_t>(y)] == u) {
      likelihood += model.matrix().col(y);
    }
  }
  return likelihood;
}

double action_marginal(const Belief& prior, const ObservationModel& model,
                       const CostModel& cost, Index u) {
  return action_likelihood(prior, model, cost, u).dot(prior.probs());
}

Belief social_filter_update(const Belief& prior, const ObservationModel& model,
                            const CostModel& cost, Index u) {
  if (u < 0 || u >= cost.actions()) {
    throw DimensionMismatch("social_filter_update: action index out of range");
  }
  const std::vector<Index> partition = action_partition(prior, model, cost);

  // If every observation that can occur under the prior maps to u, the
  // filter multiplies each supported state by its full row sum: identity.
  // Returning the prior unchanged keeps cascade beliefs frozen bitwise.
  bool supported_all_u = true;
  for (Index y = 0; y < model.observations(); ++y) {
    const double p_y = model.matrix().col(y).dot(prior.probs());
    if (p_y > 0.0 && partition[static_cast<std::size_t>(y)] != u) {
      supported_all_u = false;
      break;
    }
  }
  if (supported_all_u) {
    return prior;
  }

  Vector likelihood = Vector::Zero(model.states());
  for (Index y = 0; y < model.observations(); ++y) {
    if (partition[static_cast<std::size_t>(y)] == u) {
      likelihood += model.matrix().col(y);
    }
  }
  Vector unnormalized = likelihood.cwiseProduct(prior.probs());
  const double normalizer = unnormalized.sum();
  if (!(normalizer > 0.0)) {
    throw ImpossibleAction("social_filter_update: action " +
                           std::to_string(u) +
                           " has zero probability under the prior");
  }
  return Belief(std::move(unnormalized));
}

}  // namespace herd
