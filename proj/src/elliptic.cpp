#include "supneu/elliptic.hpp"

#include <cmath>
#include <sstream>

namespace supneu {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

double weighted_dot(const WeightedOperator& op, const GridFunction& u,
                    const GridFunction& v) {
  double sum = 0.0;
  const std::int64_t n = u.size();
  for (std::int64_t i = 0; i < n; ++i) sum += u[i] * v[i] * op.cell_w[i];
  double vol = 1.0;
  for (double hk : op.grid->h) vol *= hk;
  return sum * vol;
}

}  // namespace

int WeightedOperator::default_max_iter() const {
  const double cap = 50.0 * std::pow(static_cast<double>(grid->total()),
                                     1.0 / grid->m());
  return static_cast<int>(std::ceil(cap));
}

WeightedOperator make_operator(GridPtr grid, double eps) {
  if (eps < 0) throw std::invalid_argument("operator: eps must be >= 0");
  WeightedOperator op;
  op.eps = eps;
  const Grid& g = *grid;
  op.center_factor.resize(g.m());
  op.face_factor.resize(g.m());
  for (int k = 0; k < g.m(); ++k) {
    const int e = g.spec.n[k] - 1;
    op.center_factor[k].resize(g.cells[k]);
    for (int i = 0; i < g.cells[k]; ++i)
      op.center_factor[k][i] = ipow(g.center(k, i) + eps, e);
    op.face_factor[k].resize(g.cells[k] > 0 ? g.cells[k] - 1 : 0);
    for (int i = 0; i + 1 < g.cells[k]; ++i)
      op.face_factor[k][i] = ipow((i + 1) * g.h[k] + eps, e);
  }
  op.cell_w.resize(static_cast<std::size_t>(g.total()));
  for_each_cell(g, [&](std::int64_t lin, std::span<const int> idx) {
    double w = 1.0;
    for (int k = 0; k < g.m(); ++k) w *= op.center_factor[k][idx[k]];
    op.cell_w[static_cast<std::size_t>(lin)] = w;
  });
  op.grid = std::move(grid);
  return op;
}

void apply_A(const WeightedOperator& op, const GridFunction& g, GridFunction& out) {
  const Grid& gr = *op.grid;
  if (g.grid.get() != &gr || out.grid.get() != &gr)
    throw std::invalid_argument("apply_A: grid mismatch");
  const int m = gr.m();
  // Separable weight: the cross-axis factors cancel between the flux and the
  // cell weight, leaving a sum of one-dimensional divided differences scaled
  // by the axis factors alone. Boundary faces carry zero flux.
  for_each_cell(gr, [&](std::int64_t lin, std::span<const int> idx) {
    double v = g[lin];
    for (int k = 0; k < m; ++k) {
      const int i = idx[k];
      const std::int64_t s = gr.stride[k];
      double flux = 0.0;
      if (i + 1 < gr.cells[k])
        flux += op.face_factor[k][i] * (g[lin + s] - g[lin]);
      if (i > 0)
        flux -= op.face_factor[k][i - 1] * (g[lin] - g[lin - s]);
      v -= flux / (op.center_factor[k][i] * gr.h[k] * gr.h[k]);
    }
    out[lin] = v;
  });
}

GridFunction apply_A(const WeightedOperator& op, const GridFunction& g) {
  GridFunction out = make_constant(g.grid, 0.0);
  apply_A(op, g, out);
  return out;
}

GridFunction solve_A(const WeightedOperator& op, const GridFunction& h,
                     double tol, int max_iter, CGStats* stats,
                     const GridFunction* x0) {
  if (!(tol > 0)) throw std::invalid_argument("solve_A: tol must be > 0");
  const int cap = max_iter > 0 ? max_iter : op.default_max_iter();
  const std::int64_t n = h.size();

  const double norm_h = std::sqrt(weighted_dot(op, h, h));
  if (norm_h == 0.0) return make_constant(h.grid, 0.0);

  GridFunction x = x0 ? *x0 : h;
  GridFunction r = make_constant(h.grid, 0.0);
  GridFunction q = make_constant(h.grid, 0.0);
  apply_A(op, x, r);
  for (std::int64_t i = 0; i < n; ++i) r[i] = h[i] - r[i];

  double rho = weighted_dot(op, r, r);
  double relres = std::sqrt(rho) / norm_h;
  if (stats) { stats->iterations = 0; stats->relative_residual = relres; }
  if (relres <= tol) return x;

  // The recurrence residual drifts from the true one in finite precision, so
  // acceptance is always on a freshly computed residual; on mismatch the
  // iteration restarts from it. When a restart no longer improves the true
  // residual the attainable accuracy of the machine has been reached.
  GridFunction p = r;
  double best_true = relres;
  int iters_done = 0;
  for (int it = 1; it <= cap; ++it) {
    iters_done = it;
    apply_A(op, p, q);
    const double pq = weighted_dot(op, p, q);
    if (!(pq > 0.0)) break;  // direction numerically degenerate
    const double alpha = rho / pq;
    for (std::int64_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    double rho_new = weighted_dot(op, r, r);
    relres = std::sqrt(rho_new) / norm_h;
    if (relres <= tol) {
      apply_A(op, x, r);
      for (std::int64_t i = 0; i < n; ++i) r[i] = h[i] - r[i];
      rho_new = weighted_dot(op, r, r);
      relres = std::sqrt(rho_new) / norm_h;
      if (stats) { stats->iterations = it; stats->relative_residual = relres; }
      if (relres <= tol) return x;
      if (relres > 0.95 * best_true) break;  // restarts have stopped paying
      best_true = relres;
      rho = rho_new;
      p = r;
      continue;
    }
    const double beta = rho_new / rho;
    rho = rho_new;
    for (std::int64_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  apply_A(op, x, r);
  for (std::int64_t i = 0; i < n; ++i) r[i] = h[i] - r[i];
  relres = std::sqrt(weighted_dot(op, r, r)) / norm_h;
  if (stats) { stats->iterations = iters_done; stats->relative_residual = relres; }
  if (relres <= tol) return x;
  std::ostringstream msg;
  msg << "conjugate gradients stopped after " << iters_done
      << " iterations at relative residual " << relres
      << " (requested " << tol << ")";
  throw SolveError(msg.str(), relres);
}

LinearResidual residual_linear(const WeightedOperator& op, const GridFunction& v,
                               const GridFunction& h) {
  GridFunction r = apply_A(op, v);
  for (std::int64_t i = 0; i < r.size(); ++i) r[i] -= h[i];
  LinearResidual res;
  res.absolute = std::sqrt(weighted_dot(op, r, r));
  const double nh = std::sqrt(weighted_dot(op, h, h));
  res.relative = res.absolute / std::max(nh, 1e-300);
  return res;
}

}  // namespace supneu
