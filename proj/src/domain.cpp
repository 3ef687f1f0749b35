#include "supneu/domain.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace supneu {

namespace {

// Integer power; weight exponents n_k - 1 are small nonnegative integers.
double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

double cell_volume(const Grid& g) {
  double v = 1.0;
  for (double hk : g.h) v *= hk;
  return v;
}

// Per-axis weight factor tables at cell centers / interior faces.
std::vector<std::vector<double>> center_factors(const Grid& g, double eps) {
  std::vector<std::vector<double>> fac(g.m());
  for (int k = 0; k < g.m(); ++k) {
    const int e = g.spec.n[k] - 1;
    fac[k].resize(g.cells[k]);
    for (int i = 0; i < g.cells[k]; ++i)
      fac[k][i] = ipow(g.center(k, i) + eps, e);
  }
  return fac;
}

std::vector<std::vector<double>> face_factors(const Grid& g, double eps) {
  std::vector<std::vector<double>> fac(g.m());
  for (int k = 0; k < g.m(); ++k) {
    const int e = g.spec.n[k] - 1;
    const int nf = g.cells[k] > 0 ? g.cells[k] - 1 : 0;
    fac[k].resize(nf);
    for (int i = 0; i < nf; ++i)
      fac[k][i] = ipow((i + 1) * g.h[k] + eps, e);
  }
  return fac;
}

void require_same_grid(const GridFunction& u, const GridFunction& v) {
  if (u.grid.get() != v.grid.get())
    throw std::invalid_argument("grid functions live on different grids");
}

}  // namespace

int RevolutionSpec::ambient_dim() const {
  int N = 0;
  for (int nk : n) N += nk;
  return N;
}

double RevolutionSpec::critical_exponent() const {
  const int mm = m();
  if (mm <= 2) return std::numeric_limits<double>::infinity();
  return 2.0 * mm / (mm - 2.0);
}

RevolutionSpec make_spec(std::vector<int> n) {
  if (n.empty()) throw std::invalid_argument("spec: n must be non-empty");
  for (int nk : n)
    if (nk < 1) throw std::invalid_argument("spec: every n_k must be >= 1");
  return RevolutionSpec{std::move(n)};
}

std::int64_t Grid::index_of(std::span<const int> idx) const {
  std::int64_t lin = 0;
  for (int k = 0; k < m(); ++k) lin += stride[k] * idx[k];
  return lin;
}

void Grid::unravel(std::int64_t lin, std::span<int> idx) const {
  for (int k = 0; k < m(); ++k) {
    idx[k] = static_cast<int>(lin / stride[k]);
    lin -= stride[k] * idx[k];
  }
}

GridPtr make_grid(const RevolutionSpec& spec, std::vector<int> cells) {
  if (static_cast<int>(cells.size()) != spec.m())
    throw std::invalid_argument("grid: cells length must match the number of axes");
  for (int s : cells)
    if (s < 1) throw std::invalid_argument("grid: every cell count must be >= 1");
  auto g = std::make_shared<Grid>();
  g->spec = spec;
  g->cells = std::move(cells);
  const int m = g->m();
  g->h.resize(m);
  for (int k = 0; k < m; ++k) g->h[k] = 1.0 / g->cells[k];
  g->stride.assign(m, 1);
  for (int k = m - 2; k >= 0; --k) g->stride[k] = g->stride[k + 1] * g->cells[k + 1];
  g->total_ = 1;
  for (int k = 0; k < m; ++k) g->total_ *= g->cells[k];
  return g;
}

GridFunction make_constant(GridPtr grid, double c) {
  GridFunction f;
  f.values.assign(static_cast<std::size_t>(grid->total()), c);
  f.grid = std::move(grid);
  return f;
}

GridFunction sample(GridPtr grid,
                    const std::function<double(std::span<const double>)>& fn) {
  GridFunction f = make_constant(grid, 0.0);
  std::vector<double> t(grid->m());
  for_each_cell(*grid, [&](std::int64_t lin, std::span<const int> idx) {
    for (int k = 0; k < grid->m(); ++k) t[k] = grid->center(k, idx[k]);
    f[lin] = fn(std::span<const double>(t.data(), t.size()));
  });
  return f;
}

double cell_weight(const Grid& g, std::span<const int> idx, double eps) {
  double w = 1.0;
  for (int k = 0; k < g.m(); ++k)
    w *= ipow(g.center(k, idx[k]) + eps, g.spec.n[k] - 1);
  return w;
}

double face_weight(const Grid& g, int axis, std::span<const int> idx, double eps) {
  double w = 1.0;
  for (int k = 0; k < g.m(); ++k) {
    const double t = (k == axis) ? (idx[k] + 1) * g.h[k] : g.center(k, idx[k]);
    w *= ipow(t + eps, g.spec.n[k] - 1);
  }
  return w;
}

double integrate(const GridFunction& g, double eps) {
  const Grid& gr = *g.grid;
  const auto fac = center_factors(gr, eps);
  const double vol = cell_volume(gr);
  double sum = 0.0;
  for_each_cell(gr, [&](std::int64_t lin, std::span<const int> idx) {
    double w = 1.0;
    for (int k = 0; k < gr.m(); ++k) w *= fac[k][idx[k]];
    sum += g[lin] * w;
  });
  return sum * vol;
}

double inner_weighted(const GridFunction& u, const GridFunction& v, double eps) {
  require_same_grid(u, v);
  const Grid& gr = *u.grid;
  const auto fac = center_factors(gr, eps);
  const double vol = cell_volume(gr);
  double sum = 0.0;
  for_each_cell(gr, [&](std::int64_t lin, std::span<const int> idx) {
    double w = 1.0;
    for (int k = 0; k < gr.m(); ++k) w *= fac[k][idx[k]];
    sum += u[lin] * v[lin] * w;
  });
  return sum * vol;
}

double norm_L2w(const GridFunction& g, double eps) {
  return std::sqrt(inner_weighted(g, g, eps));
}

double norm_Ym(const GridFunction& g, double eps) {
  const Grid& gr = *g.grid;
  const auto fc = center_factors(gr, eps);
  const auto ff = face_factors(gr, eps);
  const double vol = cell_volume(gr);
  double sum = 0.0;
  for_each_cell(gr, [&](std::int64_t lin, std::span<const int> idx) {
    double w = 1.0;
    for (int k = 0; k < gr.m(); ++k) w *= fc[k][idx[k]];
    sum += g[lin] * g[lin] * w;
    for (int k = 0; k < gr.m(); ++k) {
      const int i = idx[k];
      if (i + 1 >= gr.cells[k]) continue;
      // Full face weight: axis-k factor at the face, the cell's factors
      // elsewhere (identical for both cells sharing the face).
      const double wf = (w / fc[k][i]) * ff[k][i];
      const double dq = (g[lin + gr.stride[k]] - g[lin]) / gr.h[k];
      sum += wf * dq * dq;
    }
  });
  return std::sqrt(sum * vol);
}

double norm_Lq(const GridFunction& g, double q, double eps, bool weighted) {
  if (!(q >= 1.0)) throw std::invalid_argument("norm_Lq: q must be >= 1");
  const Grid& gr = *g.grid;
  const auto fac = center_factors(gr, eps);
  const double vol = cell_volume(gr);
  double sum = 0.0;
  for_each_cell(gr, [&](std::int64_t lin, std::span<const int> idx) {
    double w = 1.0;
    if (weighted)
      for (int k = 0; k < gr.m(); ++k) w *= fac[k][idx[k]];
    sum += std::pow(std::abs(g[lin]), q) * w;
  });
  return std::pow(sum * vol, 1.0 / q);
}

void axpy(GridFunction& y, double alpha, const GridFunction& x) {
  require_same_grid(y, x);
  for (std::int64_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(GridFunction& y, double alpha) {
  for (double& v : y.values) v *= alpha;
}

double max_abs(const GridFunction& g) {
  double m = 0.0;
  for (double v : g.values) m = std::max(m, std::abs(v));
  return m;
}

void write_csv(const GridFunction& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const Grid& gr = *g.grid;
  for (int k = 0; k < gr.m(); ++k) out << "t_" << (k + 1) << ",";
  out << "value\n";
  char buf[32];
  for_each_cell(gr, [&](std::int64_t lin, std::span<const int> idx) {
    for (int k = 0; k < gr.m(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", gr.center(k, idx[k]));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", g[lin]);
    out << buf << "\n";
  });
  if (!out) throw std::runtime_error("write failed: " + path);
}

GridFunction read_csv(GridPtr grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  // Header must carry exactly m coordinate columns plus the value column.
  int commas = 0;
  for (char c : line) commas += (c == ',');
  if (commas != grid->m())
    throw std::runtime_error("csv header does not match grid dimension: " + path);
  GridFunction g = make_constant(grid, 0.0);
  std::int64_t row = 0;
  std::vector<int> idx(grid->m());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= grid->total()) throw std::runtime_error("csv has extra rows: " + path);
    std::istringstream ss(line);
    std::string cellstr;
    grid->unravel(row, std::span<int>(idx.data(), idx.size()));
    for (int k = 0; k < grid->m(); ++k) {
      if (!std::getline(ss, cellstr, ','))
        throw std::runtime_error("csv row too short: " + path);
      const double t = std::stod(cellstr);
      if (std::abs(t - grid->center(k, idx[k])) > 1e-12)
        throw std::runtime_error("csv coordinates do not match the grid: " + path);
    }
    if (!std::getline(ss, cellstr, ','))
      throw std::runtime_error("csv row missing value: " + path);
    const double v = std::stod(cellstr);
    if (!std::isfinite(v)) throw std::runtime_error("csv value not finite: " + path);
    g[row++] = v;
  }
  if (row != grid->total()) throw std::runtime_error("csv row count mismatch: " + path);
  return g;
}

}  // namespace supneu
