#pragma once
// Core value types: beliefs over a finite state space, row-stochastic
// observation models, and state x action cost matrices.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "herd/errors.hpp"

namespace herd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Probability vector over states. Entries must be finite and nonnegative;
// the constructor renormalizes so the stored sum is 1 to rounding.
class Belief {
 public:
  // Degenerate single-state belief; placeholder for default-constructed
  // aggregates, overwritten before use.
  Belief() : probs_(Vector::Ones(1)) {}
  explicit Belief(Vector probs);

  static Belief uniform(Index n);
  static Belief point_mass(Index n, Index i);

  const Vector& probs() const { return probs_; }
  double operator()(Index i) const { return probs_(i); }
  Index size() const { return probs_.size(); }

 private:
  Vector probs_;
};

// P(y | x) with one row per state, one column per observation.
class ObservationModel {
 public:
  explicit ObservationModel(Matrix probs);

  Index states() const { return probs_.rows(); }
  Index observations() const { return probs_.cols(); }
  const Matrix& matrix() const { return probs_; }
  double operator()(Index x, Index y) const { return probs_(x, y); }

 private:
  Matrix probs_;
};

// c(x, u) with one row per state, one column per action. Entries are
// arbitrary finite reals.
class CostModel {
 public:
  explicit CostModel(Matrix costs);

  Index states() const { return costs_.rows(); }
  Index actions() const { return costs_.cols(); }
  const Matrix& matrix() const { return costs_; }
  double operator()(Index x, Index u) const { return costs_(x, u); }
  Vector action_column(Index u) const { return costs_.col(u); }

 private:
  Matrix costs_;
};

struct StateSpace {
  Index cardinality = 2;
  std::vector<std::string> labels;  // optional, sized 0 or cardinality
};

struct ActionSpace {
  Index cardinality = 2;
  std::vector<std::string> labels;
};

struct ObservationSpace {
  Index cardinality = 2;
  std::vector<std::string> labels;
};

void require_same_states(const Belief& belief, const ObservationModel& model);
void require_same_states(const Belief& belief, const CostModel& cost);
void require_same_states(const ObservationModel& model, const CostModel& cost);

}  // namespace herd
