// Reduced geometry of block-rotation-symmetric domains: m radial coordinates
// t_k on the unit cube, carrying the separable measure prod_k (t_k)^(n_k - 1).
// Cell-centered tensor grids, midpoint quadrature, weighted norms, CSV I/O.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace supneu {

struct RevolutionSpec {
  std::vector<int> n;  // block dimensions n_k, each >= 1

  int m() const { return static_cast<int>(n.size()); }
  int ambient_dim() const;           // N = sum of n_k
  double critical_exponent() const;  // 2m/(m-2) for m >= 3, +infinity otherwise
};

// Validates n (non-empty, all n_k >= 1). Throws std::invalid_argument.
RevolutionSpec make_spec(std::vector<int> n);

struct Grid {
  RevolutionSpec spec;
  std::vector<int> cells;            // s_k cells per axis
  std::vector<double> h;             // spacings 1/s_k
  std::vector<std::int64_t> stride;  // row-major, last axis fastest

  int m() const { return spec.m(); }
  std::int64_t total() const { return total_; }
  // Cell centers (i + 1/2) h_k never touch the t_k = 0 axis.
  double center(int axis, int i) const { return (i + 0.5) * h[axis]; }
  std::int64_t index_of(std::span<const int> idx) const;
  void unravel(std::int64_t lin, std::span<int> idx) const;

  std::int64_t total_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

// Validates cells (length m, each >= 1). Throws std::invalid_argument.
GridPtr make_grid(const RevolutionSpec& spec, std::vector<int> cells);

struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  double& operator[](std::int64_t i) { return values[i]; }
  double operator[](std::int64_t i) const { return values[i]; }
};

GridFunction make_constant(GridPtr grid, double c);
// Samples fn at cell centers; fn receives the coordinate vector t.
GridFunction sample(GridPtr grid,
                    const std::function<double(std::span<const double>)>& fn);

// Visits cells in storage order; fn(lin, idx).
template <class F>
void for_each_cell(const Grid& g, F&& fn) {
  const int m = g.m();
  std::vector<int> idx(m, 0);
  const std::int64_t n = g.total();
  for (std::int64_t lin = 0; lin < n; ++lin) {
    fn(lin, std::span<const int>(idx.data(), idx.size()));
    for (int k = m - 1; k >= 0; --k) {
      if (++idx[k] < g.cells[k]) break;
      idx[k] = 0;
    }
  }
}

// Separable weight prod_k (t_k + eps)^(n_k - 1) at a cell center.
double cell_weight(const Grid& g, std::span<const int> idx, double eps);
// Same weight at the face between cells idx and idx + e_axis: the axis
// coordinate sits at the shared face, the others stay at cell centers.
double face_weight(const Grid& g, int axis, std::span<const int> idx, double eps);

// Midpoint quadrature of g against the (eps-shifted) weight.
double integrate(const GridFunction& g, double eps);
// Weighted L2 pairing / norm used by the linear solver and the residuals.
double inner_weighted(const GridFunction& u, const GridFunction& v, double eps);
double norm_L2w(const GridFunction& g, double eps);
// Energy norm: weighted mass plus face-difference gradient terms. Squares to
// the quadratic form of the reduced operator (same face weights).
double norm_Ym(const GridFunction& g, double eps);
// Lq norm, weighted or plain Lebesgue on the cube. Requires q >= 1.
double norm_Lq(const GridFunction& g, double q, double eps, bool weighted);

// Small vector helpers used across the solvers (out-of-place free functions).
void axpy(GridFunction& y, double alpha, const GridFunction& x);  // y += alpha x
void scale(GridFunction& y, double alpha);
double max_abs(const GridFunction& g);

// CSV layout: header t_1,...,t_m,value; one row per cell in storage order.
void write_csv(const GridFunction& g, const std::string& path);
// Validates the header and that coordinates match the grid centers.
GridFunction read_csv(GridPtr grid, const std::string& path);

}  // namespace supneu
