#pragma once

#include <variant>

#include "locsdp/ellipsoid.hpp"

namespace locsdp {

// A hyperplane supported on span(proj): every x of the body satisfies
// <c, x> <= <c, anchor> + bound.
struct Certificate {
  DenseVector c;
  double bound = 0.0;
};

struct CertifyOutcome {
  std::variant<PointOutcome, Certificate> value;
  long ccut_iterations = 0;
  long oracle_calls = 0;
  long qp_iterations = 0;
  // The certificate is the projected orthogonal cut; no QP was solved.
  bool orthogonal_shortcut = false;

  bool is_point() const { return std::holds_alternative<PointOutcome>(value); }
  const DenseVector& point() const { return std::get<PointOutcome>(value).a; }
  const Certificate& certificate() const { return std::get<Certificate>(value); }
};

struct CertifyOptions {
  CcutOptions ccut;
  QpOptions qp;
};

// Either a point of the body on { y : proj y = anchor }, or a certificate
// supported on span(proj). Requires rank(proj) >= 1.
CertifyOutcome certify_e(const OracleHandle& oracle, const OrthoProjection& proj,
                         const DenseVector& anchor, double eps0,
                         const CertifyOptions& options = {});

}  // namespace locsdp
