#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace tfsrc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Nodal coefficient vector of one P1 function.
using FeField = Eigen::VectorXd;

using Point = std::array<double, 2>;

/// Structured mesh of (0,1)^dim with n cells per axis.
///
/// Nodes are ordered lexicographically (x fastest). In 2D every square
/// [i,i+1]x[j,j+1] is split along the diagonal (i,j)-(i+1,j+1) into the
/// triangles (v00, v10, v11) and (v00, v11, v01).
struct Mesh {
  int dim = 1;
  int n = 0;
  std::vector<Point> nodes;       // unused second coordinate is 0 in 1D
  std::vector<int> connectivity;  // dim + 1 vertices per cell

  int vertices_per_cell() const { return dim + 1; }
  std::size_t node_count() const { return nodes.size(); }
  std::size_t cell_count() const { return connectivity.size() / static_cast<std::size_t>(dim + 1); }
  std::span<const int> cell(std::size_t c) const {
    return {connectivity.data() + c * static_cast<std::size_t>(dim + 1),
            static_cast<std::size_t>(dim + 1)};
  }
  double cell_measure(std::size_t c) const;
  Point cell_centroid(std::size_t c) const;
};

Mesh build_mesh(int dim, int n);

/// Factor-once / solve-many wrapper around a sparse Cholesky factorization.
/// Every solve is followed by a relative residual check.
class SpdSolver {
 public:
  explicit SpdSolver(const SparseMatrix& matrix, double residual_tol = 1e-10);

  Vector solve(const Vector& rhs) const;

 private:
  SparseMatrix matrix_;
  Eigen::SimplicialLLT<SparseMatrix> factor_;
  double residual_tol_;
};

/// P1 finite element space on a Mesh together with its assembled matrices.
/// Immutable after construction; share it through std::shared_ptr<const FemSpace>.
class FemSpace {
 public:
  explicit FemSpace(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  int dim() const { return mesh_.dim; }
  std::size_t dof_count() const { return mesh_.node_count(); }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SpdSolver& mass_solver() const { return *mass_solver_; }

  /// Point evaluation of the P1 function with nodal values `coeffs`.
  double evaluate(const FeField& coeffs, const Point& x) const;

  /// Nodal interpolant of g.
  FeField interpolate(const std::function<double(const Point&)>& g) const;

 private:
  Mesh mesh_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  std::unique_ptr<SpdSolver> mass_solver_;
};

std::shared_ptr<const FemSpace> assemble(const Mesh& mesh);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Observation region omega = Omega \ B for a closed axis-aligned box B.
/// An empty `box` means B is empty, i.e. the whole domain is observed.
struct BoxComplement {
  std::vector<Interval> box;

  bool full_domain() const { return box.empty(); }
};

struct SubdomainMask {
  BoxComplement spec;
  SparseMatrix omega_mass;
  std::vector<char> cell_in_omega;
  std::vector<char> node_in_omega;
  double measure = 0.0;
};

/// Assembles the mass matrix restricted to omega. The box faces must sit on
/// cell boundaries so omega is a union of whole cells.
std::shared_ptr<const SubdomainMask> omega_mass(const FemSpace& space, const BoxComplement& spec);

/// L2 projection P_h g via per-cell Gauss quadrature (exact for degree 4 in 2D, 5 in 1D).
FeField l2_project(const FemSpace& space, const std::function<double(const Point&)>& g);

struct Norms {
  double l2 = 0.0;
  double h1_semi = 0.0;
};

Norms norms(const FemSpace& space, const FeField& field);

/// Mass-weighted L2 inner product of two FE functions.
double l2_inner(const FemSpace& space, const FeField& a, const FeField& b);
double l2_norm(const FemSpace& space, const FeField& a);

}  // namespace tfsrc
