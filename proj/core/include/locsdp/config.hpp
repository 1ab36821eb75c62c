#pragma once

namespace locsdp {

// Every numerical threshold used by the library lives here so that callers
// can override them in one place.
struct Tolerances {
  double orthonormality = 1e-10;
  double idempotence = 1e-10;
  double slice_membership = 1e-9;
  double cut_normalization = 1e-9;
  // Below this value of g^T A g a cut no longer moves the ellipsoid.
  double zero_gradient = 1e-14;
  // Certificate directions with smaller infinity norm are rejected.
  double zero_direction = 1e-12;
  // Minimum eigenvalue slack accepted as positive semidefinite.
  double psd = 1e-8;
  // Conditioning events with smaller vector norm are treated as impossible.
  double zero_event = 1e-9;
  double gram_reproduction = 1e-6;
  double restriction = 1e-8;
  double support = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances kDefaults{};
  return kDefaults;
}

}  // namespace locsdp
