#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fibergen/mesh.hpp"

namespace fibergen {

/// Nodal values, one per mesh vertex.
using ScalarField = std::vector<double>;
using VectorField = std::vector<Vec3>;

/// Square sparse matrix in compressed row storage with sorted columns.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::uint32_t> cols;
  std::vector<double> values;

  /// Entry (i, j), zero when outside the pattern.
  double at(std::size_t i, std::size_t j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Degree-1 stiffness matrix of -Laplace on the mesh (natural Neumann data).
/// Tetrahedra use exact constant-gradient integration, hexahedra 2x2x2 Gauss
/// quadrature of the trilinear map.
SparseMatrix assemble_stiffness(const Mesh& mesh);

struct DirichletConstraint {
  std::vector<VertexId> vertices;
  double value = 0.0;
};

/// Dirichlet data of one harmonic problem; all other boundary is Neumann.
struct LaplaceProblemSpec {
  std::vector<DirichletConstraint> constraints;
};

enum class Preconditioner { Jacobi, None };

struct SolverOptions {
  double relative_tolerance = 1e-12;
  double absolute_tolerance = 1e-14;
  /// Defaults to ten times the number of unknowns.
  std::optional<std::size_t> max_iterations;
  Preconditioner preconditioner = Preconditioner::Jacobi;
};

/// Norms refer to the free equations divided by their mean diagonal entry.
struct SolveReport {
  std::size_t iterations = 0;
  double residual_norm = 0.0;
  double rhs_norm = 0.0;
};

/// Stiffness matrix of a mesh, assembled once and reused for several solves.
class LaplaceSolver {
 public:
  explicit LaplaceSolver(const Mesh& mesh);

  /// Dirichlet rows and columns are eliminated symmetrically and the free
  /// unknowns solved by conjugate gradients.
  ScalarField solve(const LaplaceProblemSpec& spec, const SolverOptions& options = {},
                    SolveReport* report = nullptr) const;

  const SparseMatrix& matrix() const noexcept { return matrix_; }

 private:
  SparseMatrix matrix_;
};

ScalarField solve_laplace(const Mesh& mesh, const LaplaceProblemSpec& spec, const SolverOptions& options = {},
                          SolveReport* report = nullptr);

/// Gradient of the field in every cell: constant on tets, evaluated at the
/// reference center on hexes.
VectorField cell_gradients(const Mesh& mesh, std::span<const double> field);

/// Cell gradients averaged to the vertices with cell-volume weights.
VectorField nodal_gradient(const Mesh& mesh, std::span<const double> field);

}  // namespace fibergen
