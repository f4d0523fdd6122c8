#include "herd/presets.hpp"

#include <cmath>

#include "herd/errors.hpp"

namespace herd {

ObservationModel severity_observation_model(Index n_states, double decay) {
  if (n_states < 2) {
    throw DimensionMismatch("severity model: need at least two states");
  }
  if (decay <= 1.0) {
    throw DimensionMismatch("severity model: decay must exceed 1");
  }
  Matrix rows(n_states, n_states);
  for (Index x = 0; x < n_states; ++x) {
    for (Index y = 0; y < n_states; ++y) {
      rows(x, y) = std::pow(decay, -std::abs(static_cast<double>(x - y)));
    }
    rows.row(x) /= rows.row(x).sum();
  }
  return ObservationModel(std::move(rows));
}

CostModel intensity_misclassification_cost(Index n_states) {
  if (n_states < 2) {
    throw DimensionMismatch("intensity cost: need at least two states");
  }
  Matrix costs(n_states, n_states);
  for (Index x = 0; x < n_states; ++x) {
    for (Index u = 0; u < n_states; ++u) {
      const double miss = (x != 0 && u == 0) ? 1.0 : 0.0;
      costs(x, u) = miss + std::abs(static_cast<double>(x - u));
    }
  }
  return CostModel(std::move(costs));
}

ObservationModel hsp_observation_model() {
  Matrix rows(2, 2);
  rows << 1.0, 0.0,  //
      0.3, 0.7;
  return ObservationModel(std::move(rows));
}

CostModel type1_error_cost() {
  Matrix costs(2, 2);
  costs << 0.0, 1.0,  //
      0.0, 0.0;
  return CostModel(std::move(costs));
}

StoppingCostParams hsp_stopping_params() {
  StoppingCostParams params;
  params.rho = 0.5;
  params.d = 0.1;
  params.delta = 1.0;
  params.target_state = 0;
  return params;
}

}  // namespace herd
