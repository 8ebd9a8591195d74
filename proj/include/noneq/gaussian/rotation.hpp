#pragma once

#include "noneq/numerics/ode.hpp"

namespace noneq::gaussian {

/// Two-dimensional model whose eigenbasis is rotated by phi against the data's.
struct RotationState {
  double phi = 0.0;
  double J1 = 1.0;
  double J2 = 2.0;
  double c1 = 1.0;
  double c2 = 0.5;
};

struct RotationRates {
  double dphi = 0.0;
  double dJ1 = 0.0;
  double dJ2 = 0.0;
};

struct ProjectedCovariance {
  double c11 = 0.0;
  double c22 = 0.0;
  double c12 = 0.0;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double phi);

/// Data covariance expressed in the model eigenbasis.
ProjectedCovariance projected_covariance(double c1, double c2, double phi);

/// Throws StructureError when |J1 - J2| < 1e-9.
RotationRates rotation_flow_rhs(const RotationState& state, double m0_1, double m0_2,
                                double cross0, double k);

/// Pointwise rotation generator u_a . du_b/dt = (model_corr - data_corr) / (J_b - J_a).
double rotation_rate(double j_a, double j_b, double model_corr_ab, double data_corr_ab);

struct RotationInit {
  RotationState state;
  double m0_1 = 0.0;
  double m0_2 = 0.0;
  double cross0 = 0.0;
};

/// Integrates (phi, J1, J2); halts on a non-positive eigenvalue. Recorded phi
/// values are wrapped.
numerics::OdeTrajectory integrate_rotation_flow(const RotationInit& init, double k, double t_end,
                                                double dt, std::size_t record_every = 1);

}  // namespace noneq::gaussian
