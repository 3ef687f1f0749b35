#include "supneu/cone.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace supneu {

namespace {

// Applies fn to every grid line along `axis`: fn receives the base linear
// index of the line and the stride between consecutive cells on it.
template <class F>
void for_each_line(const Grid& g, int axis, F&& fn) {
  const std::int64_t stride = g.stride[axis];
  const int len = g.cells[axis];
  const std::int64_t nlines = g.total() / len;
  // Lines are enumerated by the multi-index with the axis coordinate removed.
  std::vector<int> idx(g.m(), 0);
  for (std::int64_t l = 0; l < nlines; ++l) {
    std::int64_t base = 0;
    for (int k = 0; k < g.m(); ++k)
      if (k != axis) base += g.stride[k] * idx[k];
    fn(base, stride);
    for (int k = g.m() - 1; k >= 0; --k) {
      if (k == axis) continue;
      if (++idx[k] < g.cells[k]) break;
      idx[k] = 0;
    }
  }
}

// Worst violation of the raw cone constraints (value units for negativity,
// quotient units for slopes) — the gap carried by projection errors.
double cone_gap(const GridFunction& g) {
  const ConeReport r = in_cone(g, 0.0);
  return std::max({0.0, -r.min_value, -r.worst_slope});
}

}  // namespace

ConeReport in_cone(const GridFunction& g, double tol) {
  if (tol < 0) throw std::invalid_argument("in_cone: tol must be >= 0");
  const Grid& gr = *g.grid;
  ConeReport rep;
  rep.min_value = g.size() ? g[0] : 0.0;
  for (std::int64_t i = 0; i < g.size(); ++i)
    rep.min_value = std::min(rep.min_value, g[i]);
  rep.worst_slope = 0.0;
  for (int k = 0; k < gr.m(); ++k) {
    double worst_k = 0.0;
    const double inv_h = 1.0 / gr.h[k];
    for_each_line(gr, k, [&](std::int64_t base, std::int64_t stride) {
      for (int i = 0; i + 1 < gr.cells[k]; ++i) {
        const double d = (g[base + (i + 1) * stride] - g[base + i * stride]) * inv_h;
        worst_k = std::min(worst_k, d);
      }
    });
    if (worst_k < -tol) rep.violating_axes.push_back(k);
    rep.worst_slope = std::min(rep.worst_slope, worst_k);
  }
  rep.member = rep.min_value >= -tol && rep.worst_slope >= -tol;
  return rep;
}

void pava_nondecreasing(std::span<double> y) {
  const std::size_t n = y.size();
  if (n <= 1) return;
  // Stack of blocks (start index, mean, count); merge while means decrease.
  std::vector<std::size_t> start(n);
  std::vector<double> mean(n);
  std::vector<double> count(n);
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    start[top] = i;
    mean[top] = y[i];
    count[top] = 1.0;
    ++top;
    while (top >= 2 && mean[top - 2] >= mean[top - 1]) {
      const double c = count[top - 2] + count[top - 1];
      mean[top - 2] = (count[top - 2] * mean[top - 2] +
                       count[top - 1] * mean[top - 1]) / c;
      count[top - 2] = c;
      --top;
    }
  }
  for (std::size_t b = 0; b < top; ++b) {
    const std::size_t end = (b + 1 < top) ? start[b + 1] : n;
    for (std::size_t i = start[b]; i < end; ++i) y[i] = mean[b];
  }
}

GridFunction project_cone(const GridFunction& g, int max_cycles) {
  const Grid& gr = *g.grid;
  const int m = gr.m();
  const std::int64_t n = g.size();

  GridFunction x = g;
  // Dykstra increments: one per constraint set (m axis sweeps + clamping).
  std::vector<std::vector<double>> inc(m + 1, std::vector<double>(n, 0.0));
  std::vector<double> line;  // scratch for axis sweeps
  std::vector<double> prev(n);

  const double tol = 1e-10;
  const double scale = 1.0 + max_abs(g);

  for (int cycle = 1; cycle <= max_cycles; ++cycle) {
    std::copy(x.values.begin(), x.values.end(), prev.begin());
    for (int c = 0; c <= m; ++c) {
      auto& pc = inc[c];
      for (std::int64_t i = 0; i < n; ++i) x[i] += pc[i];
      if (c < m) {
        // Exact projection onto "nondecreasing along axis c": PAVA per line.
        for (std::int64_t i = 0; i < n; ++i) pc[i] = x[i];
        for_each_line(gr, c, [&](std::int64_t base, std::int64_t stride) {
          const int len = gr.cells[c];
          line.resize(len);
          for (int i = 0; i < len; ++i) line[i] = x[base + i * stride];
          pava_nondecreasing(std::span<double>(line.data(), line.size()));
          for (int i = 0; i < len; ++i) x[base + i * stride] = line[i];
        });
        for (std::int64_t i = 0; i < n; ++i) pc[i] -= x[i];
      } else {
        for (std::int64_t i = 0; i < n; ++i) {
          const double y = x[i];
          x[i] = y < 0.0 ? 0.0 : y;
          pc[i] = y - x[i];
        }
      }
    }
    double change = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      change = std::max(change, std::abs(x[i] - prev[i]));
    if (change <= tol * scale && cone_gap(x) <= tol * scale) return x;
  }
  std::ostringstream msg;
  const double gap = cone_gap(x);
  msg << "cone projection did not settle within " << max_cycles
      << " cycles; remaining constraint gap " << gap;
  throw ProjectionError(msg.str(), gap);
}

GridFunction mollify(const GridFunction& g, int window) {
  if (window < 0) throw std::invalid_argument("mollify: window must be >= 0");
  if (!in_cone(g, 0.0).member)
    throw std::invalid_argument("mollify: input must lie in the cone");
  if (window == 0) return g;
  const Grid& gr = *g.grid;
  GridFunction out = g;
  std::vector<double> line;
  // Separable backward box filter; indices below 0 contribute the zero
  // extension, so the denominator stays window + 1 everywhere.
  const double inv_w = 1.0 / (window + 1);
  for (int k = 0; k < gr.m(); ++k) {
    for_each_line(gr, k, [&](std::int64_t base, std::int64_t stride) {
      const int len = gr.cells[k];
      line.resize(len);
      double running = 0.0;
      for (int i = 0; i < len; ++i) {
        running += out[base + i * stride];
        if (i - window - 1 >= 0) running -= out[base + (i - window - 1) * stride];
        line[i] = running * inv_w;
      }
      for (int i = 0; i < len; ++i) out[base + i * stride] = line[i];
    });
  }
  return out;
}

}  // namespace supneu
