#include "herd/types.hpp"

#include <cmath>
#include <string>

namespace herd {

namespace {

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw DimensionMismatch(std::string(what) + ": entries must be finite");
  }
}

}  // namespace

Belief::Belief(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) {
    throw DimensionMismatch("belief: needs at least one state");
  }
  check_finite(probs_, "belief");
  if ((probs_.array() < 0.0).any()) {
    throw DimensionMismatch("belief: entries must be nonnegative");
  }
  const double total = probs_.sum();
  if (!(total > 0.0)) {
    throw DimensionMismatch("belief: entries must not all be zero");
  }
  probs_ /= total;
}

Belief Belief::uniform(Index n) {
  return Belief(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Belief Belief::point_mass(Index n, Index i) {
  Vector v = Vector::Zero(n);
  v(i) = 1.0;
  return Belief(std::move(v));
}

ObservationModel::ObservationModel(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) {
    throw DimensionMismatch("observation model: empty matrix");
  }
  check_finite(probs_, "observation model");
  if ((probs_.array() < 0.0).any() || (probs_.array() > 1.0).any()) {
    throw DimensionMismatch("observation model: entries must lie in [0, 1]");
  }
  for (Index x = 0; x < probs_.rows(); ++x) {
    const double row_sum = probs_.row(x).sum();
    if (std::abs(row_sum - 1.0) > 1e-9) {
      throw DimensionMismatch("observation model: row " + std::to_string(x) +
                              " sums to " + std::to_string(row_sum) +
                              ", expected 1");
    }
  }
}

CostModel::CostModel(Matrix costs) : costs_(std::move(costs)) {
  if (costs_.rows() < 1 || costs_.cols() < 1) {
    throw DimensionMismatch("cost model: empty matrix");
  }
  check_finite(costs_, "cost model");
}

void require_same_states(const Belief& belief, const ObservationModel& model) {
  if (belief.size() != model.states()) {
    throw DimensionMismatch("belief has " + std::to_string(belief.size()) +
                            " states, observation model has " +
                            std::to_string(model.states()));
  }
}

void require_same_states(const Belief& belief, const CostModel& cost) {
  if (belief.size() != cost.states()) {
    throw DimensionMismatch("belief has " + std::to_string(belief.size()) +
                            " states, cost model has " +
                            std::to_string(cost.states()));
  }
}

void require_same_states(const ObservationModel& model, const CostModel& cost) {
  if (model.states() != cost.states()) {
    throw DimensionMismatch("observation model has " +
                            std::to_string(model.states()) +
                            " states, cost model has " +
                            std::to_string(cost.states()));
  }
}

}  // namespace herd
