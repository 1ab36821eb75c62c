#pragma once

#include <functional>
#include <variant>

#include "locsdp/geometry.hpp"

namespace locsdp {

struct Feasible {};

// Cut{c, slack}: every x in the body satisfies <c, x> <= <c, y> + slack,
// where y is the queried point. ||c||_inf == 1.
struct Cut {
  DenseVector c;
  double slack = 0.0;
};

using SeparationResponse = std::variant<Feasible, Cut>;

inline bool is_feasible(const SeparationResponse& r) {
  return std::holds_alternative<Feasible>(r);
}

// Weak separation oracle. `query(y, delta)` reports Feasible when y lies
// within delta of the body. Implementations must be stateless or internally
// synchronized.
struct OracleHandle {
  std::function<SeparationResponse(const DenseVector&, double)> query;
  int dim = 0;
  double half_width = 1.0;

  SeparationResponse operator()(const DenseVector& y, double delta) const {
    return query(y, delta);
  }
};

// Scales c to unit infinity norm. Throws on a zero vector.
DenseVector normalize_inf(const DenseVector& c);

OracleHandle polytope_oracle(const Polytope& p, double half_width = 1.0);
OracleHandle ball_oracle(const DenseVector& center, double radius,
                         double half_width = 1.0);

}  // namespace locsdp
