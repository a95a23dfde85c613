#include "tfsrc/mesh_fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tfsrc/errors.hpp"

namespace tfsrc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Gauss-Legendre, 3 points on the reference interval [0,1].
constexpr std::array<double, 3> kLineWeights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
const std::array<double, 3> kLinePoints = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};

// Symmetric 6-point triangle rule of degree 4, barycentric coordinates, weights sum to 1.
struct TriangleRulePoint {
  std::array<double, 3> bary;
  double weight;
};
constexpr double kA = 0.445948490915965;
constexpr double kB = 0.091576213509771;
constexpr double kWa = 0.223381589678011;
constexpr double kWb = 0.109951743655322;
constexpr std::array<TriangleRulePoint, 6> kTriangleRule = {{
    {{kA, kA, 1.0 - 2.0 * kA}, kWa},
    {{kA, 1.0 - 2.0 * kA, kA}, kWa},
    {{1.0 - 2.0 * kA, kA, kA}, kWa},
    {{kB, kB, 1.0 - 2.0 * kB}, kWb},
    {{kB, 1.0 - 2.0 * kB, kB}, kWb},
    {{1.0 - 2.0 * kB, kB, kB}, kWb},
}};

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void add_element_mass(const Mesh& mesh, std::size_t c, Triplets& out) {
  const auto v = mesh.cell(c);
  const double measure = mesh.cell_measure(c);
  if (mesh.dim == 1) {
    const double diag = measure / 3.0;
    const double off = measure / 6.0;
    out.emplace_back(v[0], v[0], diag);
    out.emplace_back(v[1], v[1], diag);
    out.emplace_back(v[0], v[1], off);
    out.emplace_back(v[1], v[0], off);
    return;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.emplace_back(v[i], v[j], measure / 12.0 * (i == j ? 2.0 : 1.0));
    }
  }
}

void add_element_stiffness(const Mesh& mesh, std::size_t c, Triplets& out) {
  const auto v = mesh.cell(c);
  const double measure = mesh.cell_measure(c);
  if (mesh.dim == 1) {
    const double k = 1.0 / measure;
    out.emplace_back(v[0], v[0], k);
    out.emplace_back(v[1], v[1], k);
    out.emplace_back(v[0], v[1], -k);
    out.emplace_back(v[1], v[0], -k);
    return;
  }
  // grad phi_i = (y_j - y_k, x_k - x_j) / (2A) for (i, j, k) cyclic.
  std::array<std::array<double, 2>, 3> grad;
  for (int i = 0; i < 3; ++i) {
    const Point& pj = mesh.nodes[v[(i + 1) % 3]];
    const Point& pk = mesh.nodes[v[(i + 2) % 3]];
    grad[i] = {(pj[1] - pk[1]) / (2.0 * measure), (pk[0] - pj[0]) / (2.0 * measure)};
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      out.emplace_back(v[i], v[j], measure * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]));
    }
  }
}

SparseMatrix from_triplets(std::size_t size, const Triplets& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

double Mesh::cell_measure(std::size_t c) const {
  const auto v = cell(c);
  if (dim == 1) return nodes[v[1]][0] - nodes[v[0]][0];
  return signed_area(nodes[v[0]], nodes[v[1]], nodes[v[2]]);
}

Point Mesh::cell_centroid(std::size_t c) const {
  const auto v = cell(c);
  Point p{0.0, 0.0};
  for (int i : v) {
    p[0] += nodes[i][0];
    p[1] += nodes[i][1];
  }
  const double k = static_cast<double>(v.size());
  return {p[0] / k, p[1] / k};
}

Mesh build_mesh(int dim, int n) {
  if (dim != 1 && dim != 2) throw ValidationError("build_mesh: dim must be 1 or 2");
  if (n < 2) throw ValidationError("build_mesh: need at least 2 cells per axis");

  Mesh mesh;
  mesh.dim = dim;
  mesh.n = n;
  const double h = 1.0 / n;
  if (dim == 1) {
    mesh.nodes.reserve(n + 1);
    for (int i = 0; i <= n; ++i) mesh.nodes.push_back({i * h, 0.0});
    mesh.connectivity.reserve(2 * n);
    for (int i = 0; i < n; ++i) {
      mesh.connectivity.push_back(i);
      mesh.connectivity.push_back(i + 1);
    }
    return mesh;
  }

  const int stride = n + 1;
  mesh.nodes.reserve(stride * stride);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) mesh.nodes.push_back({i * h, j * h});
  }
  mesh.connectivity.reserve(6 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * stride + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + stride;
      const int v11 = v01 + 1;
      mesh.connectivity.insert(mesh.connectivity.end(), {v00, v10, v11, v00, v11, v01});
    }
  }
  return mesh;
}

SpdSolver::SpdSolver(const SparseMatrix& matrix, double residual_tol)
    : matrix_(matrix), residual_tol_(residual_tol) {
  factor_.compute(matrix_);
  if (factor_.info() != Eigen::Success) {
    throw NumericalError("SpdSolver: Cholesky factorization failed (matrix not SPD?)");
  }
}

Vector SpdSolver::solve(const Vector& rhs) const {
  if (rhs.size() != matrix_.rows()) throw ValidationError("SpdSolver: right-hand side has the wrong length");
  Vector x = factor_.solve(rhs);
  if (factor_.info() != Eigen::Success) throw NumericalError("SpdSolver: solve failed");
  const double scale = rhs.norm();
  if (scale > 0.0) {
    const double residual = (matrix_ * x - rhs).norm() / scale;
    if (!(residual <= residual_tol_)) {
      std::ostringstream os;
      os << "SpdSolver: relative residual " << residual << " exceeds " << residual_tol_;
      throw NumericalError(os.str());
    }
  }
  return x;
}

FemSpace::FemSpace(Mesh mesh) : mesh_(std::move(mesh)) {
  Triplets mass_entries;
  Triplets stiffness_entries;
  const std::size_t per_cell = mesh_.dim == 1 ? 4 : 9;
  mass_entries.reserve(per_cell * mesh_.cell_count());
  stiffness_entries.reserve(per_cell * mesh_.cell_count());
  for (std::size_t c = 0; c < mesh_.cell_count(); ++c) {
    if (!(mesh_.cell_measure(c) > 0.0)) {
      std::ostringstream os;
      os << "assemble: degenerate cell " << c;
      throw ValidationError(os.str());
    }
    add_element_mass(mesh_, c, mass_entries);
    add_element_stiffness(mesh_, c, stiffness_entries);
  }
  mass_ = from_triplets(dof_count(), mass_entries);
  stiffness_ = from_triplets(dof_count(), stiffness_entries);
  mass_solver_ = std::make_unique<SpdSolver>(mass_);
}

double FemSpace::evaluate(const FeField& coeffs, const Point& x) const {
  if (static_cast<std::size_t>(coeffs.size()) != dof_count()) {
    throw ValidationError("evaluate: field length does not match the space");
  }
  for (int k = 0; k < mesh_.dim; ++k) {
    if (!(x[k] >= 0.0 && x[k] <= 1.0)) throw ValidationError("evaluate: point outside the domain");
  }
  const int n = mesh_.n;
  auto locate = [n](double s) {
    const int i = static_cast<int>(std::floor(s * n));
    return std::clamp(i, 0, n - 1);
  };
  const int i = locate(x[0]);
  const double s = x[0] * n - i;
  if (mesh_.dim == 1) return (1.0 - s) * coeffs[i] + s * coeffs[i + 1];

  const int j = locate(x[1]);
  const double t = x[1] * n - j;
  const int stride = n + 1;
  const int v00 = j * stride + i;
  const int v10 = v00 + 1;
  const int v01 = v00 + stride;
  const int v11 = v01 + 1;
  if (s >= t) return (1.0 - s) * coeffs[v00] + (s - t) * coeffs[v10] + t * coeffs[v11];
  return (1.0 - t) * coeffs[v00] + s * coeffs[v11] + (t - s) * coeffs[v01];
}

FeField FemSpace::interpolate(const std::function<double(const Point&)>& g) const {
  FeField out(static_cast<Eigen::Index>(dof_count()));
  for (std::size_t i = 0; i < dof_count(); ++i) out[static_cast<Eigen::Index>(i)] = g(mesh_.nodes[i]);
  return out;
}

std::shared_ptr<const FemSpace> assemble(const Mesh& mesh) {
  return std::make_shared<const FemSpace>(mesh);
}

std::shared_ptr<const SubdomainMask> omega_mass(const FemSpace& space, const BoxComplement& spec) {
  const Mesh& mesh = space.mesh();
  auto mask = std::make_shared<SubdomainMask>();
  mask->spec = spec;
  mask->cell_in_omega.assign(mesh.cell_count(), 1);
  mask->node_in_omega.assign(mesh.node_count(), 0);

  if (!spec.full_domain()) {
    if (static_cast<int>(spec.box.size()) != mesh.dim) {
      throw ValidationError("omega_mass: box dimension does not match the mesh");
    }
    for (const Interval& side : spec.box) {
      if (!(0.0 <= side.lo && side.lo < side.hi && side.hi <= 1.0)) {
        throw ValidationError("omega_mass: box sides must satisfy 0 <= lo < hi <= 1");
      }
      for (double face : {side.lo, side.hi}) {
        const double scaled = face * mesh.n;
        if (std::abs(scaled - std::round(scaled)) > 1e-9) {
          std::ostringstream os;
          os << "omega_mass: box face " << face << " is not aligned with the " << mesh.n
             << "-cell grid";
          throw ValidationError(os.str());
        }
      }
    }
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
      const Point centre = mesh.cell_centroid(c);
      bool inside = true;
      for (int a = 0; a < mesh.dim; ++a) {
        inside = inside && centre[a] > spec.box[a].lo && centre[a] < spec.box[a].hi;
      }
      mask->cell_in_omega[c] = inside ? 0 : 1;
    }
  }

  Triplets entries;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    if (!mask->cell_in_omega[c]) continue;
    add_element_mass(mesh, c, entries);
    mask->measure += mesh.cell_measure(c);
    for (int v : mesh.cell(c)) mask->node_in_omega[v] = 1;
  }
  if (entries.empty()) throw ValidationError("omega_mass: observation region is empty");
  mask->omega_mass = from_triplets(mesh.node_count(), entries);
  return mask;
}

FeField l2_project(const FemSpace& space, const std::function<double(const Point&)>& g) {
  const Mesh& mesh = space.mesh();
  Vector load = Vector::Zero(static_cast<Eigen::Index>(space.dof_count()));
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const auto v = mesh.cell(c);
    const double measure = mesh.cell_measure(c);
    if (mesh.dim == 1) {
      const double a = mesh.nodes[v[0]][0];
      for (std::size_t q = 0; q < kLinePoints.size(); ++q) {
        const double s = kLinePoints[q];
        const double value = g({a + s * measure, 0.0}) * kLineWeights[q] * measure;
        load[v[0]] += value * (1.0 - s);
        load[v[1]] += value * s;
      }
      continue;
    }
    for (const auto& qp : kTriangleRule) {
      Point x{0.0, 0.0};
      for (int i = 0; i < 3; ++i) {
        x[0] += qp.bary[i] * mesh.nodes[v[i]][0];
        x[1] += qp.bary[i] * mesh.nodes[v[i]][1];
      }
      const double value = g(x) * qp.weight * measure;
      for (int i = 0; i < 3; ++i) load[v[i]] += value * qp.bary[i];
    }
  }
  return space.mass_solver().solve(load);
}

Norms norms(const FemSpace& space, const FeField& field) {
  if (static_cast<std::size_t>(field.size()) != space.dof_count()) {
    throw ValidationError("norms: field length does not match the space");
  }
  const double l2_sq = field.dot(space.mass() * field);
  const double h1_sq = field.dot(space.stiffness() * field);
  return {std::sqrt(std::max(0.0, l2_sq)), std::sqrt(std::max(0.0, h1_sq))};
}

double l2_inner(const FemSpace& space, const FeField& a, const FeField& b) {
  return a.dot(space.mass() * b);
}

double l2_norm(const FemSpace& space, const FeField& a) {
  return std::sqrt(std::max(0.0, l2_inner(space, a, a)));
}

}  // namespace tfsrc
