#include "herd/structure.hpp"

namespace herd {

bool is_tp2(const Matrix& m, double tol) {
  for (Index i = 0; i + 1 < m.rows(); ++i) {
    for (Index j = i + 1; j < m.rows(); ++j) {
      for (Index k = 0; k + 1 < m.cols(); ++k) {
        for (Index l = k + 1; l < m.cols(); ++l) {
          const double minor = m(i, k) * m(j, l) - m(i, l) * m(j, k);
          if (minor < -tol) {
            return false;
          }
        }
      }
    }
  }
  return true;
}

bool mlr_dominates(const Belief& p1, const Belief& p2, double tol) {
  if (p1.size() != p2.size()) {
    throw DimensionMismatch("mlr_dominates: beliefs differ in size");
  }
  for (Index i = 0; i + 1 < p1.size(); ++i) {
    for (Index j = i + 1; j < p1.size(); ++j) {
      if (p1(i) * p2(j) > p1(j) * p2(i) + tol) {
        return false;
      }
    }
  }
  return true;
}

bool fosd_dominates(const Belief& p1, const Belief& p2, double tol) {
  if (p1.size() != p2.size()) {
    throw DimensionMismatch("fosd_dominates: beliefs differ in size");
  }
  double tail1 = 0.0;
  double tail2 = 0.0;
  for (Index j = p1.size() - 1; j >= 0; --j) {
    tail1 += p1(j);
    tail2 += p2(j);
    if (tail1 < tail2 - tol) {
      return false;
    }
  }
  return true;
}

StructureReport check_structural_assumptions(const CostModel& cost,
                                             const ObservationModel& model,
                                             const StoppingCostParams& params) {
  require_same_states(model, cost);
  const Index n_states = cost.states();
  const Index n_actions = cost.actions();
  const Index last = n_states - 1;
  const double rho = params.rho;

  StructureReport report;
  report.s1 = true;
  report.s2 = true;
  report.s3 = true;

  for (Index u = 0; u < n_actions; ++u) {
    for (Index i = 0; i + 1 < n_states; ++i) {
      const double lhs = cost(i, u) - cost(i + 1, u);
      if (lhs < 0.0) {
        report.s1 = false;
        report.violations.push_back({"S1", i, u, lhs, 0.0});
      }
    }
    for (Index i = 0; i < n_states; ++i) {
      double sum = 0.0;
      for (Index y = 0; y < model.observations(); ++y) {
        sum += cost(last, u) * model(last, y) - cost(i, u) * model(i, y);
      }
      const double lhs = cost(last, u) - cost(i, u);
      const double rhs = (1.0 - rho) * sum;
      if (lhs < rhs) {
        report.s2 = false;
        report.violations.push_back({"S2", i, u, lhs, rhs});
      }
    }
    for (Index i = 0; i < n_states; ++i) {
      double sum = 0.0;
      for (Index y = 0; y < model.observations(); ++y) {
        sum += cost(0, u) * model(0, y) - cost(i, u) * model(i, y);
      }
      const double lhs = (1.0 - rho) * sum;
      const double rhs = cost(0, u) - cost(i, u);
      if (lhs < rhs) {
        report.s3 = false;
        report.violations.push_back({"S3", i, u, lhs, rhs});
      }
    }
  }

  report.s4 = is_tp2(model.matrix());
  if (!report.s4) {
    report.violations.push_back({"S4", -1, -1, 0.0, 0.0});
  }
  return report;
}

}  // namespace herd
