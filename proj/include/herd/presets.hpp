#pragma once
// Named instances used by the experiments: the six-state content-severity
// channel and cost, and the two-state hate-speech-peddler detection
// instance.

#include "herd/stopping.hpp"
#include "herd/types.hpp"

namespace herd {

// Six states/observations on one severity axis; row x decays
// geometrically away from the diagonal, B(x, y) proportional to
// decay^-|x - y|. Strictly positive, TP2, per-step likelihood ratio
// bounded by decay.
ObservationModel severity_observation_model(Index n_states = 6,
                                            double decay = 1.3);

// c(x, u) = 1(x != 0) 1(u = 0) + |x - u|: missing a hateful user costs an
// extra unit on top of the intensity gap.
CostModel intensity_misclassification_cost(Index n_states = 6);

// Two-state channel: benign users never produce a toxic observation,
// hateful ones do 70% of the time.
ObservationModel hsp_observation_model();

// c(x, u) = 1(x = 0) 1(u = 1): the type-1 error, flagging a benign user.
CostModel type1_error_cost();

// rho = 0.5, d = 0.1, delta = 1, target = state 0 (the herd verdict).
StoppingCostParams hsp_stopping_params();

}  // namespace herd
