#include "fibergen/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fibergen/element.hpp"
#include "fibergen/error.hpp"

namespace fibergen {

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) sum += values[k] * x[cols[k]];
    y[i] = sum;
  }
}

namespace {

SparseMatrix sparsity_pattern(const Mesh& mesh) {
  const auto vc = vertex_cells(mesh);
  SparseMatrix a;
  a.n = mesh.num_vertices();
  a.row_ptr.assign(a.n + 1, 0);
  std::vector<std::uint32_t> row;
  for (std::size_t v = 0; v < a.n; ++v) {
    row.clear();
    for (auto c : vc.of(v))
      for (VertexId u : mesh.cell(c)) row.push_back(u);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    a.cols.insert(a.cols.end(), row.begin(), row.end());
    a.row_ptr[v + 1] = a.cols.size();
  }
  a.values.assign(a.cols.size(), 0.0);
  return a;
}

void scatter(SparseMatrix& a, std::span<const VertexId> ids, const double* local, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = a.cols.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[ids[i]]);
    const auto last = a.cols.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[ids[i] + 1]);
    for (std::size_t j = 0; j < n; ++j) {
      const auto it = std::lower_bound(first, last, ids[j]);
      a.values[static_cast<std::size_t>(it - a.cols.begin())] += local[i * n + j];
    }
  }
}

struct HexQuadrature {
  std::array<std::array<Vec3, 8>, 8> grads;  // [point][node]
  HexQuadrature() {
    for (int q = 0; q < 8; ++q) {
      const Vec3& r = element::kHexNodes[q];
      grads[q] = element::hex_shape_gradients({r.x * element::kGauss2, r.y * element::kGauss2, r.z * element::kGauss2});
    }
  }
};

void hex_stiffness(const Mesh& mesh, std::size_t c, double (&k)[64]) {
  static const HexQuadrature quad;
  std::array<Vec3, 8> nodes;
  const auto ids = mesh.cell(c);
  for (int i = 0; i < 8; ++i) nodes[i] = mesh.vertex(ids[i]);
  std::fill(std::begin(k), std::end(k), 0.0);
  for (int q = 0; q < 8; ++q) {
    Mat3 j{};
    for (int i = 0; i < 8; ++i)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) j[a][b] += nodes[i][a] * quad.grads[q][i][b];
    const double d = det(j);
    if (!(d > 0.0))
      throw Error(Errc::DegenerateCell, "hexahedron " + std::to_string(c) + " has a non-positive Jacobian at a quadrature point");
    const Mat3 jinv = inverse(j, d);
    std::array<Vec3, 8> g;
    for (int i = 0; i < 8; ++i) g[i] = mul_transpose(jinv, quad.grads[q][i]);
    for (int i = 0; i < 8; ++i)
      for (int m = 0; m < 8; ++m) k[i * 8 + m] += dot(g[i], g[m]) * d;
  }
}

void tet_stiffness(const Mesh& mesh, std::size_t c, double (&k)[16]) {
  const auto ids = mesh.cell(c);
  const std::array<Vec3, 4> nodes{mesh.vertex(ids[0]), mesh.vertex(ids[1]), mesh.vertex(ids[2]), mesh.vertex(ids[3])};
  std::array<Vec3, 4> g;
  const double vol = element::tet_volume(nodes);
  if (!(vol > 0.0) || !element::tet_gradients(nodes, g))
    throw Error(Errc::DegenerateCell, "tetrahedron " + std::to_string(c) + " has non-positive volume");
  for (int i = 0; i < 4; ++i)
    for (int m = 0; m < 4; ++m) k[i * 4 + m] = dot(g[i], g[m]) * vol;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh) {
  SparseMatrix a = sparsity_pattern(mesh);
  if (mesh.kind() == ElementKind::Tet4) {
    double k[16];
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      tet_stiffness(mesh, c, k);
      scatter(a, mesh.cell(c), k, 4);
    }
  } else {
    double k[64];
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      hex_stiffness(mesh, c, k);
      scatter(a, mesh.cell(c), k, 8);
    }
  }
  return a;
}

LaplaceSolver::LaplaceSolver(const Mesh& mesh) : matrix_(assemble_stiffness(mesh)) {}

ScalarField LaplaceSolver::solve(const LaplaceProblemSpec& spec, const SolverOptions& options, SolveReport* report) const {
  const std::size_t n = matrix_.n;
  if (!(options.relative_tolerance > 0.0) || !(options.absolute_tolerance > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (options.max_iterations && *options.max_iterations < 1)
    throw std::invalid_argument("solver iteration limit must be at least 1");

  // Dirichlet data: value per constrained vertex, conflicts rejected.
  std::vector<char> fixed(n, 0);
  ScalarField x(n, 0.0);
  std::size_t n_fixed = 0;
  for (const auto& c : spec.constraints) {
    for (VertexId v : c.vertices) {
      if (v >= n) throw Error(Errc::DanglingIndex, "Dirichlet vertex " + std::to_string(v) + " is out of range");
      if (fixed[v] && x[v] != c.value)
        throw Error(Errc::ConflictingDirichlet, "vertex " + std::to_string(v) + " is constrained to both " +
                                                    std::to_string(x[v]) + " and " + std::to_string(c.value));
      if (!fixed[v]) ++n_fixed;
      fixed[v] = 1;
      x[v] = c.value;
    }
  }
  if (n_fixed == 0) throw Error(Errc::NoDirichlet, "Laplace problem has no Dirichlet vertices; the system is singular");

  const auto& a = matrix_;
  // Free rows are divided by their mean diagonal so that residuals, and with
  // them the absolute tolerance, do not depend on the mesh length unit.
  double diag_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!fixed[i]) diag_sum += a.at(i, i);
  const std::size_t n_free = n - n_fixed;
  const double unit = n_free > 0 && diag_sum > 0.0 ? static_cast<double>(n_free) / diag_sum : 1.0;

  // Operator of the eliminated system: identity on fixed rows, free-free block elsewhere.
  const auto apply = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i]) {
        out[i] = in[i];
        continue;
      }
      double sum = 0.0;
      for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        if (!fixed[a.cols[k]]) sum += a.values[k] * in[a.cols[k]];
      out[i] = unit * sum;
    }
  };

  ScalarField b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (fixed[i]) {
      b[i] = x[i];
      continue;
    }
    double sum = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (fixed[a.cols[k]]) sum += a.values[k] * x[a.cols[k]];
    b[i] = -unit * sum;
  }

  ScalarField inv_diag(n, 1.0);
  if (options.preconditioner == Preconditioner::Jacobi)
    for (std::size_t i = 0; i < n; ++i)
      if (!fixed[i]) inv_diag[i] = 1.0 / (unit * a.at(i, i));

  ScalarField r(n), z(n), p(n), q(n);
  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];

  const double b_norm = norm2(b);
  const double target = std::max(options.relative_tolerance * b_norm, options.absolute_tolerance);
  const std::size_t max_it = options.max_iterations.value_or(10 * n);

  double r_norm = norm2(r);
  std::size_t it = 0;
  if (r_norm > target) {
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (r_norm > target) {
      if (it == max_it)
        throw Error(Errc::NoConvergence, "conjugate gradients stopped after " + std::to_string(it) +
                                             " iterations with residual " + std::to_string(r_norm) + " (target " +
                                             std::to_string(target) + ")");
      apply(p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      r_norm = norm2(r);
      ++it;
    }
  }
  if (report) *report = {it, r_norm, b_norm};
  return x;
}

ScalarField solve_laplace(const Mesh& mesh, const LaplaceProblemSpec& spec, const SolverOptions& options,
                          SolveReport* report) {
  return LaplaceSolver(mesh).solve(spec, options, report);
}

VectorField cell_gradients(const Mesh& mesh, std::span<const double> field) {
  VectorField grads(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto ids = mesh.cell(c);
    Vec3 g;
    if (mesh.kind() == ElementKind::Tet4) {
      const std::array<Vec3, 4> nodes{mesh.vertex(ids[0]), mesh.vertex(ids[1]), mesh.vertex(ids[2]), mesh.vertex(ids[3])};
      std::array<Vec3, 4> dn;
      if (!element::tet_gradients(nodes, dn))
        throw Error(Errc::DegenerateCell, "tetrahedron " + std::to_string(c) + " is degenerate");
      for (int i = 0; i < 4; ++i) g += field[ids[i]] * dn[i];
    } else {
      std::array<Vec3, 8> nodes;
      for (int i = 0; i < 8; ++i) nodes[i] = mesh.vertex(ids[i]);
      const Mat3 j = element::hex_jacobian(nodes, {0, 0, 0});
      const double d = det(j);
      if (!(d > 0.0)) throw Error(Errc::DegenerateCell, "hexahedron " + std::to_string(c) + " is degenerate at its center");
      const Mat3 jinv = inverse(j, d);
      const auto dn = element::hex_shape_gradients({0, 0, 0});
      Vec3 gref;
      for (int i = 0; i < 8; ++i) gref += field[ids[i]] * dn[i];
      g = mul_transpose(jinv, gref);
    }
    grads[c] = g;
  }
  return grads;
}

VectorField nodal_gradient(const Mesh& mesh, std::span<const double> field) {
  const auto grads = cell_gradients(mesh, field);
  VectorField out(mesh.num_vertices());
  std::vector<double> weight(mesh.num_vertices(), 0.0);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double vol = cell_volume(mesh, c);
    for (VertexId v : mesh.cell(c)) {
      out[v] += vol * grads[c];
      weight[v] += vol;
    }
  }
  for (std::size_t v = 0; v < out.size(); ++v)
    if (weight[v] > 0.0) out[v] *= 1.0 / weight[v];
  return out;
}

}  // namespace fibergen
