#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fibergen/fem.hpp"
#include "fibergen/mesh.hpp"

namespace fibergen {

/// Finds the cell containing a point through a uniform bucket grid.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  struct Location {
    std::size_t cell = 0;
    /// Shape function values of the cell's vertices at the point.
    std::array<double, 8> weights{};
    /// No cell within 1e-8 h_avg; weights then select the nearest vertex.
    bool outside = false;
    VertexId nearest = 0;
  };

  Location locate(const Vec3& p) const;

  template <class T>
  T interpolate(const Location& loc, std::span<const T> field) const {
    if (loc.outside) return field[loc.nearest];
    T value{};
    const auto cell = mesh_.cell(loc.cell);
    for (std::size_t i = 0; i < cell.size(); ++i) value = value + loc.weights[i] * field[cell[i]];
    return value;
  }

 private:
  std::size_t bucket_index(int i, int j, int k) const;
  std::array<int, 3> bucket_of(const Vec3& p) const;

  const Mesh& mesh_;
  Vec3 lo_, hi_;
  std::array<int, 3> dims_{};
  Vec3 step_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> cells_;
  double tolerance_ = 0.0;
};

struct Interpolated {
  VectorField values;
  std::vector<char> outside;
  std::size_t n_outside = 0;
};

/// Nodal field of source interpolated at arbitrary points.
Interpolated locate_and_interpolate(const Mesh& source, const VectorField& field, std::span<const Vec3> points);
ScalarField locate_and_interpolate(const Mesh& source, const ScalarField& field, std::span<const Vec3> points,
                                   std::size_t* n_outside = nullptr);

struct SensitivityReport {
  std::vector<double> dtheta;  // degrees, per reference vertex
  double avg_error = 0.0;
  double max_error = 0.0;
  std::size_t n_points_outside = 0;
};

/// Unoriented angle between two line fields, per vertex.
SensitivityReport angle_error(const VectorField& f_coarse_at_ref, const VectorField& f_ref);

/// Interpolates the coarse field to the reference vertices and compares.
SensitivityReport compare_fibers(const Mesh& coarse, const VectorField& f_coarse, const Mesh& reference,
                                 const VectorField& f_ref);

}  // namespace fibergen
