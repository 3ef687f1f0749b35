#include "supneu/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace supneu {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double cone_violation(const GridFunction& g) {
  const ConeReport r = in_cone(g, 0.0);
  return std::max({0.0, -r.min_value, -r.worst_slope});
}

bool nearly_constant(const GridFunction& g) {
  double lo = g[0], hi = g[0];
  for (std::int64_t i = 0; i < g.size(); ++i) {
    lo = std::min(lo, g[i]);
    hi = std::max(hi, g[i]);
  }
  return hi - lo <= 1e-8 * std::max(1.0, std::abs(hi));
}

// Shared final validation: positivity, cone membership, consistency.
void finalize_report(const Problem& pb, SolveReport& rep, double tol_residual) {
  rep.is_constant = nearly_constant(rep.u);
  double umin = rep.u[0];
  for (std::int64_t i = 0; i < rep.u.size(); ++i) umin = std::min(umin, rep.u[i]);
  const double floor = 1e-10 * (1.0 + max_abs(pb.a));
  if (max_abs(rep.u) <= floor) {
    rep.converged = false;
    rep.message += " solution collapsed toward zero;";
  }
  if (rep.converged && !(umin > 0.0)) {
    rep.converged = false;
    rep.message += " solution minimum is not strictly positive;";
  }
  if (rep.converged &&
      !in_cone(rep.u, pb.cone_tol * (1.0 + max_abs(rep.u))).member) {
    rep.converged = false;
    rep.message += " solution left the cone;";
  }
  rep.consistency = consistency_gap(pb, rep.u);
  if (rep.converged && !(rep.consistency <= 10.0 * tol_residual)) {
    rep.converged = false;
    rep.message += " consistency gap exceeds ten times the residual target;";
  }
}

// I(c u) for constants is cheap; used for bracketing and the path scan.
double energy_at(const Problem& pb, const GridFunction& u) {
  const EnergyReport er = eval_I(pb, u);
  return er.I ? *er.I : std::numeric_limits<double>::infinity();
}

}  // namespace

double strong_residual(const Problem& pb, const GridFunction& u) {
  GridFunction res = apply_A(pb.op, u);
  GridFunction rhs = dphi(pb, u);
  for (std::int64_t i = 0; i < res.size(); ++i) res[i] -= rhs[i];
  const double nr = norm_L2w(res, pb.eps);
  return nr / std::max(norm_L2w(rhs, pb.eps), 1.0);
}

SolveReport fixed_point_solve(const Problem& pb, const SolverConfig& cfg) {
  if (pb.nl.kind != NonlinKind::Power)
    throw std::invalid_argument(
        "fixed_point_solve: requires the power kind (homogeneity is what "
        "lets the normalization be undone)");
  const auto t0 = Clock::now();
  const double p = pb.nl.p;

  SolveReport rep;
  // Constant start plus a tiny increasing ramp so non-constant profiles are
  // reachable; the ramp keeps the guess inside the cone.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.5, 1.0);
  std::vector<double> ramp(pb.grid->m());
  for (double& c : ramp) c = 1e-3 * unif(rng);
  GridFunction u_hat = make_constant(pb.grid, 1.0);
  for_each_cell(*pb.grid, [&](std::int64_t lin, std::span<const int> idx) {
    for (int k = 0; k < pb.grid->m(); ++k)
      u_hat[lin] += ramp[k] * pb.grid->center(k, idx[k]);
  });
  scale(u_hat, 1.0 / max_abs(u_hat));

  GridFunction warm = u_hat;
  double lambda = 1.0;
  double theta = 1.0;  // mixing factor, reduced if the residual oscillates
  int worse_streak = 0;
  double best_resid = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= cfg.max_outer; ++it) {
    rep.outer_iterations = it;
    GridFunction rhs = dphi(pb, u_hat);
    GridFunction v = solve_A(pb.op, rhs, cfg.linear_tol, cfg.linear_max_iter,
                             nullptr, &warm);
    warm = v;
    rep.cone_violation_history.push_back(cone_violation(v));
    GridFunction vp = project_cone(v);
    const double vmax = max_abs(vp);
    if (vmax < 1e-300)
      throw std::runtime_error(
          "fixed_point_solve: iteration collapsed to zero during normalization");
    lambda = 1.0 / vmax;

    GridFunction u_next = vp;
    scale(u_next, lambda);
    if (theta < 1.0) {
      // Convex mixing stays in the cone; renormalize afterwards.
      for (std::int64_t i = 0; i < u_next.size(); ++i)
        u_next[i] = (1.0 - theta) * u_hat[i] + theta * u_next[i];
      scale(u_next, 1.0 / max_abs(u_next));
    }

    double step = 0.0;
    for (std::int64_t i = 0; i < u_next.size(); ++i)
      step = std::max(step, std::abs(u_next[i] - u_hat[i]));
    u_hat = u_next;

    // Undo the normalization through homogeneity: u = lambda^(1/(p-2)) u_hat.
    GridFunction u_cand = u_hat;
    scale(u_cand, std::pow(lambda, 1.0 / (p - 2.0)));
    const double resid = strong_residual(pb, u_cand);
    rep.residual_history.push_back(resid);
    rep.energy_history.push_back(energy_at(pb, u_cand));
    rep.u = std::move(u_cand);
    rep.lambda = lambda;
    rep.final_residual = resid;

    if (resid <= cfg.tol_residual) {
      rep.converged = true;
      break;
    }
    if (resid < best_resid) {
      best_resid = resid;
      worse_streak = 0;
    } else if (++worse_streak >= 3) {
      theta = std::max(0.125, 0.5 * theta);
      worse_streak = 0;
    }
    if (step <= cfg.tol_step) {
      rep.message += " iterate stagnated before meeting the residual target;";
      break;
    }
  }
  finalize_report(pb, rep, cfg.tol_residual);
  rep.wall_time = seconds_since(t0);
  return rep;
}

namespace {

// Largest energy along the ray c -> I(c u), c in a bracketed window.
// Power kind has the closed-form maximizer; otherwise golden section.
double ray_peak_factor(const Problem& pb, const GridFunction& u) {
  const GridFunction Au = apply_A(pb.op, u);
  if (pb.nl.kind == NonlinKind::Power) {
    const double p = pb.nl.p;
    const double q = p / (p - 1.0);
    GridFunction ps = make_constant(pb.grid, 0.0);
    GridFunction ph = make_constant(pb.grid, 0.0);
    for (std::int64_t i = 0; i < u.size(); ++i) {
      ps[i] = pb.a[i] * eval_Fstar(pb.nl, Au[i] / pb.a[i]);
      ph[i] = pb.a[i] * eval_F(pb.nl, u[i]);
    }
    const double psi = integrate(ps, pb.eps);
    const double phi = integrate(ph, pb.eps);
    if (!(phi > 0.0) || !(psi > 0.0)) return 1.0;
    return std::pow(q * psi / (p * phi), 1.0 / (p - q));
  }
  // General kind: evaluate xi(c) = int a F*(c Au / a) - int a F(c u) by
  // golden section on [2^-8, c_hi]; out-of-range conjugates end the bracket.
  auto xi = [&](double c) -> double {
    double sum = 0.0;
    GridFunction g = make_constant(pb.grid, 0.0);
    try {
      for (std::int64_t i = 0; i < u.size(); ++i)
        g[i] = pb.a[i] * (eval_Fstar(pb.nl, c * Au[i] / pb.a[i]) -
                          eval_F(pb.nl, c * u[i]));
      sum = integrate(g, pb.eps);
    } catch (const std::domain_error&) {
      return -std::numeric_limits<double>::infinity();
    }
    return sum;
  };
  double lo = 1.0 / 256.0, hi = 1.0;
  double fhi = xi(hi);
  while (hi < 256.0) {
    const double fnext = xi(2.0 * hi);
    if (!(fnext > fhi)) break;
    hi *= 2.0;
    fhi = fnext;
  }
  hi = std::min(hi * 2.0, 256.0);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = xi(c1), f2 = xi(c2);
  for (int i = 0; i < 80; ++i) {
    if (f1 < f2) {
      lo = c1; c1 = c2; f1 = f2;
      c2 = lo + gr * (hi - lo); f2 = xi(c2);
    } else {
      hi = c2; c2 = c1; f2 = f1;
      c1 = hi - gr * (hi - lo); f1 = xi(c1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SolveReport mountain_pass_solve(const Problem& pb, const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.lambda = std::numeric_limits<double>::quiet_NaN();

  // Endpoint e = sup a + 1 scaled until the energy goes nonpositive.
  const double e_val = max_abs(pb.a) + 1.0;
  double T = 1.0;
  {
    int doublings = 0;
    while (energy_at(pb, make_constant(pb.grid, T * e_val)) > 0.0) {
      if (++doublings > 40)
        throw std::runtime_error(
            "mountain_pass_solve: energy stayed positive along the segment "
            "after 40 doublings; problem data violate the superquadratic "
            "growth this geometry needs");
      T *= 2.0;
    }
  }

  // Coarse scan of I(tau T e) over the segment, then golden refinement.
  const int ns = std::max(cfg.path_samples, 5);
  double best_tau = 0.0, best_I = 0.0;  // tau = 0 gives I(0) = 0
  for (int j = 1; j < ns; ++j) {
    const double tau = static_cast<double>(j) / (ns - 1);
    const double Ij = energy_at(pb, make_constant(pb.grid, tau * T * e_val));
    if (Ij > best_I) { best_I = Ij; best_tau = tau; }
  }
  {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::max(0.0, best_tau - 1.0 / (ns - 1));
    double hi = std::min(1.0, best_tau + 1.0 / (ns - 1));
    double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
    auto path_I = [&](double tau) {
      return energy_at(pb, make_constant(pb.grid, tau * T * e_val));
    };
    double f1 = path_I(c1), f2 = path_I(c2);
    for (int i = 0; i < 90; ++i) {
      if (f1 < f2) {
        lo = c1; c1 = c2; f1 = f2; c2 = lo + gr * (hi - lo); f2 = path_I(c2);
      } else {
        hi = c2; c2 = c1; f2 = f1; c1 = hi - gr * (hi - lo); f1 = path_I(c1);
      }
    }
    best_tau = 0.5 * (lo + hi);
  }

  GridFunction u = make_constant(pb.grid, best_tau * T * e_val);
  rep.energy_history.push_back(energy_at(pb, u));
  double sigma = cfg.descent_step;

  for (int it = 1; it <= cfg.max_outer; ++it) {
    rep.outer_iterations = it;
    // Keep the iterate at the top of its own ray: the pure residual flow is
    // unstable along scaling (the target is a saddle), and re-maximizing
    // I(c u) removes exactly that direction.
    const double cstar = ray_peak_factor(pb, u);
    GridFunction w = u;
    scale(w, cstar);

    const double resid = strong_residual(pb, w);
    rep.residual_history.push_back(resid);
    rep.u = w;
    rep.final_residual = resid;
    if (resid <= cfg.tol_residual) {
      rep.converged = true;
      break;
    }

    // Damped consistency-residual step with Armijo backtracking on I.
    GridFunction rhs = dphi(pb, w);
    GridFunction v = solve_A(pb.op, rhs, cfg.linear_tol, cfg.linear_max_iter,
                             nullptr, &w);
    GridFunction r = w;  // r = w - v
    axpy(r, -1.0, v);
    const double r2 = inner_weighted(r, r, pb.eps);
    const double I_w = energy_at(pb, w);

    bool accepted = false;
    while (sigma >= 1e-14) {
      GridFunction cand = w;
      axpy(cand, -sigma, r);
      GridFunction u_try = project_cone(cand);
      const double I_try = energy_at(pb, u_try);
      if (I_try <= I_w - 1e-4 * sigma * r2) {
        rep.cone_violation_history.push_back(cone_violation(cand));
        u = std::move(u_try);
        rep.energy_history.push_back(I_try);
        accepted = true;
        break;
      }
      sigma *= 0.5;
    }
    if (!accepted) {
      rep.message += " backtracking stalled before meeting the residual target;";
      break;
    }
    sigma = std::min(cfg.descent_step, 2.0 * sigma);
  }
  finalize_report(pb, rep, cfg.tol_residual);
  rep.wall_time = seconds_since(t0);
  return rep;
}

}  // namespace supneu
