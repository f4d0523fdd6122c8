#pragma once
// Single-agent Bayes machinery and the social-learning filter.
//
// An agent with public prior pi observes y, forms the private posterior,
// and takes the expected-cost-minimizing action. Observers see only the
// action; conditioning the prior on it is the social filter T(pi, u).

#include <vector>

#include "herd/types.hpp"

namespace herd {

// pi'(x) = P(y|x) pi(x) / sum_x' P(y|x') pi(x').
// Throws ZeroLikelihood when the normalizer is zero.
Belief bayes_update(const Belief& prior, const ObservationModel& model,
                    Index y);

double expected_cost(const Belief& belief, const CostModel& cost, Index u);

// argmin_u of expected cost; ties resolve to the lowest action index.
Index myopic_action(const Belief& belief, const CostModel& cost);

// Maps each observation y to the action a myopic agent takes after seeing
// it under `prior`. Comparisons use the unnormalized posterior weights
// B_y pi, so zero-probability observations land on action 0 via the tie
// rule. This is the indicator set partition behind the action likelihood.
std::vector<Index> action_partition(const Belief& prior,
                                    const ObservationModel& model,
                                    const CostModel& cost);

// P(u | x = i, pi) for every state i: sum over the observations mapped to
// u of B(i, y). Returns exact ones when u's cell is all of Y.
Vector action_likelihood(const Belief& prior, const ObservationModel& model,
                         const CostModel& cost, Index u);

// sigma(pi, u) = sum_i P(u | x = i, pi) pi(i), the action's probability
// under the prior.
double action_marginal(const Belief& prior, const ObservationModel& model,
                       const CostModel& cost, Index u);

// T(pi, u): prior conditioned on the observed action. Returns the prior
// bitwise when every supported observation maps to u (cascade fixed
// point). Throws ImpossibleAction when sigma(pi, u) = 0.
Belief social_filter_update(const Belief& prior, const ObservationModel& model,
                            const CostModel& cost, Index u);

}  // namespace herd
