#pragma once
// Structural conditions under which the optimal stopping policy is a
// threshold: cost monotonicity (S1), the two submodularity-style cost
// inequalities (S2, S3) evaluated literally, and total positivity of the
// observation model (S4). Plus the stochastic orders they rely on.

#include <string>
#include <vector>

#include "herd/stopping.hpp"
#include "herd/types.hpp"

namespace herd {

// Every 2x2 minor nonnegative (within tol).
bool is_tp2(const Matrix& m, double tol = 1e-12);

// p1 dominates p2 in likelihood ratio: p1(i) p2(j) <= p1(j) p2(i) for all
// i < j (higher states relatively more likely under p1).
bool mlr_dominates(const Belief& p1, const Belief& p2, double tol = 1e-12);

// First-order dominance via tail sums: sum_{i>=j} p1(i) >= sum_{i>=j} p2(i).
bool fosd_dominates(const Belief& p1, const Belief& p2, double tol = 1e-12);

struct AssumptionViolation {
  std::string assumption;  // "S1" | "S2" | "S3" | "S4"
  Index state = 0;         // i in the violated inequality (-1 for S4)
  Index action = 0;        // u in the violated inequality (-1 for S4)
  double lhs = 0.0;
  double rhs = 0.0;
};

struct StructureReport {
  bool s1 = false;
  bool s2 = false;
  bool s3 = false;
  bool s4 = false;
  std::vector<AssumptionViolation> violations;
};

// S1: c(e_i, u) - c(e_{i+1}, u) >= 0 for all u and consecutive states.
// S2: c(e_last, u) - c(e_i, u) >=
//       (1 - rho) sum_y (c(e_last, u) B(last, y) - c(e_i, u) B(i, y)).
// S3: (1 - rho) sum_y (c(e_0, u) B(0, y) - c(e_i, u) B(i, y)) >=
//       c(e_0, u) - c(e_i, u).
// S4: B is TP2.
StructureReport check_structural_assumptions(const CostModel& cost,
                                             const ObservationModel& model,
                                             const StoppingCostParams& params);

}  // namespace herd
