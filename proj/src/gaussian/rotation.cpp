#include "noneq/gaussian/rotation.hpp"

#include "noneq/errors.hpp"

#include <cmath>
#include <numbers>

namespace noneq::gaussian {

double wrap_angle(double phi) {
  const double r = std::remainder(phi, 2.0 * std::numbers::pi);
  return r <= -std::numbers::pi ? r + 2.0 * std::numbers::pi : r;
}

ProjectedCovariance projected_covariance(double c1, double c2, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c1 * c * c + c2 * s * s, c1 * s * s + c2 * c * c, c * s * (c2 - c1)};
}

RotationRates rotation_flow_rhs(const RotationState& st, double m0_1, double m0_2, double cross0,
                                double k) {
  if (std::abs(st.J1 - st.J2) < 1e-9)
    throw StructureError("rotation_flow_rhs: degenerate eigenvalues J1 = J2");
  if (k < 0.0) throw ParameterError("rotation_flow_rhs: negative sampling time");
  const auto pc = projected_covariance(st.c1, st.c2, st.phi);
  RotationRates r;
  r.dphi = (0.5 * std::sin(2.0 * st.phi) * (st.c1 - st.c2) +
            cross0 * std::exp(-(st.J1 + st.J2) * k)) /
           (st.J1 - st.J2);
  r.dJ1 = 1.0 / st.J1 - pc.c11 - (1.0 / st.J1 - m0_1) * std::exp(-2.0 * st.J1 * k);
  r.dJ2 = 1.0 / st.J2 - pc.c22 - (1.0 / st.J2 - m0_2) * std::exp(-2.0 * st.J2 * k);
  return r;
}

double rotation_rate(double j_a, double j_b, double model_corr_ab, double data_corr_ab) {
  if (std::abs(j_a - j_b) < 1e-9) throw StructureError("rotation_rate: degenerate eigenvalues");
  return (model_corr_ab - data_corr_ab) / (j_b - j_a);
}

numerics::OdeTrajectory integrate_rotation_flow(const RotationInit& init, double k, double t_end,
                                                double dt, std::size_t record_every) {
  if (!(init.state.J1 > 0.0) || !(init.state.J2 > 0.0))
    throw ParameterError("integrate_rotation_flow: eigenvalues must be positive");
  RotationState s = init.state;
  auto rhs = [&](double, const Eigen::VectorXd& y) {
    s.phi = y[0];
    s.J1 = y[1];
    s.J2 = y[2];
    const auto r = rotation_flow_rhs(s, init.m0_1, init.m0_2, init.cross0, k);
    return Eigen::Vector3d(r.dphi, r.dJ1, r.dJ2).eval();
  };
  numerics::OdeOptions opts;
  opts.record_every = record_every;
  opts.in_domain = [](const Eigen::VectorXd& y) { return y[1] > 0.0 && y[2] > 0.0; };
  auto traj = numerics::integrate_ode(
      rhs, Eigen::Vector3d(init.state.phi, init.state.J1, init.state.J2), t_end, dt, opts);
  for (auto& v : traj.values) v[0] = wrap_angle(v[0]);
  return traj;
}

}  // namespace noneq::gaussian
