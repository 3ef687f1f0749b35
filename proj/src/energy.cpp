#include "supneu/energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace supneu {

Problem make_problem(GridPtr grid, GridFunction a, Nonlinearity nl, double eps,
                     bool allow_supercritical, double cone_tol) {
  if (a.grid.get() != grid.get())
    throw std::invalid_argument("problem: weight lives on a different grid");
  const ConeReport arep = in_cone(a, cone_tol);
  if (!arep.member)
    throw std::invalid_argument("problem: weight a must lie in the cone");
  double amin = a[0];
  for (std::int64_t i = 0; i < a.size(); ++i) amin = std::min(amin, a[i]);
  if (!(amin > 0.0))
    throw std::invalid_argument("problem: weight a must be strictly positive");
  const double pc = grid->spec.critical_exponent();
  if (!(nl.p < pc) && !allow_supercritical) {
    std::ostringstream msg;
    msg << "problem: growth exponent " << nl.p
        << " is not below the critical threshold " << pc
        << " for this axis count; pass the explicit override to proceed";
    throw std::invalid_argument(msg.str());
  }
  Problem pb;
  pb.op = make_operator(grid, eps);
  pb.grid = std::move(grid);
  pb.a = std::move(a);
  pb.nl = std::move(nl);
  pb.eps = eps;
  pb.cone_tol = cone_tol;
  return pb;
}

double eval_phi(const Problem& pb, const GridFunction& u) {
  GridFunction integrand = make_constant(pb.grid, 0.0);
  for (std::int64_t i = 0; i < u.size(); ++i)
    integrand[i] = pb.a[i] * eval_F(pb.nl, u[i]);
  return integrate(integrand, pb.eps);
}

std::optional<double> eval_psi(const Problem& pb, const GridFunction& u) {
  // Membership tolerance scales with the function magnitude so projections
  // of large iterates are not spuriously ruled infinite.
  if (!in_cone(u, pb.cone_tol * (1.0 + max_abs(u))).member) return std::nullopt;
  GridFunction Au = apply_A(pb.op, u);
  GridFunction integrand = make_constant(pb.grid, 0.0);
  for (std::int64_t i = 0; i < u.size(); ++i)
    integrand[i] = pb.a[i] * eval_Fstar(pb.nl, Au[i] / pb.a[i]);
  return integrate(integrand, pb.eps);
}

GridFunction dphi(const Problem& pb, const GridFunction& u) {
  GridFunction out = make_constant(pb.grid, 0.0);
  for (std::int64_t i = 0; i < u.size(); ++i)
    out[i] = pb.a[i] * eval_f(pb.nl, u[i]);
  return out;
}

double consistency_gap(const Problem& pb, const GridFunction& u) {
  GridFunction Au = apply_A(pb.op, u);
  GridFunction diff = make_constant(pb.grid, 0.0);
  for (std::int64_t i = 0; i < u.size(); ++i)
    diff[i] = eval_Fstar_prime(pb.nl, Au[i] / pb.a[i]) - u[i];
  const double nu = norm_L2w(u, pb.eps);
  return norm_L2w(diff, pb.eps) / std::max(nu, 1.0);
}

EnergyReport eval_I(const Problem& pb, const GridFunction& u) {
  EnergyReport rep;
  rep.cone = in_cone(u, pb.cone_tol * (1.0 + max_abs(u)));
  rep.phi = eval_phi(pb, u);
  rep.psi = eval_psi(pb, u);
  if (rep.psi) {
    rep.I = *rep.psi - rep.phi;
    rep.consistency_gap = consistency_gap(pb, u);
  } else {
    rep.consistency_gap = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

}  // namespace supneu
