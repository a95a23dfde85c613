#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tfsrc/errors.hpp"
#include "tfsrc/mesh_fem.hpp"

using namespace tfsrc;

namespace {

Vector ones(const FemSpace& s) { return Vector::Ones(static_cast<Eigen::Index>(s.dof_count())); }

double total(const SparseMatrix& m, const Vector& a, const Vector& b) { return a.dot(m * b); }

}  // namespace

TEST_CASE("mesh sizes and ordering") {
  const Mesh m1 = build_mesh(1, 8);
  CHECK(m1.node_count() == 9);
  CHECK(m1.cell_count() == 8);
  CHECK(m1.nodes[3][0] == doctest::Approx(3.0 / 8));

  const Mesh m2 = build_mesh(2, 4);
  CHECK(m2.node_count() == 25);
  CHECK(m2.cell_count() == 32);
  // x runs fastest
  CHECK(m2.nodes[1][0] == doctest::Approx(0.25));
  CHECK(m2.nodes[5][1] == doctest::Approx(0.25));
  double area = 0.0;
  for (std::size_t c = 0; c < m2.cell_count(); ++c) area += m2.cell_measure(c);
  CHECK(area == doctest::Approx(1.0));

  CHECK_THROWS_AS(build_mesh(3, 4), ValidationError);
  CHECK_THROWS_AS(build_mesh(1, 0), ValidationError);
}

TEST_CASE("mass and stiffness reproduce exact integrals") {
  for (int dim : {1, 2}) {
    const auto space = assemble(build_mesh(dim, 6));
    const Vector one = ones(*space);
    const Vector x = space->interpolate([](const Point& p) { return p[0]; });
    CHECK(total(space->mass(), one, one) == doctest::Approx(1.0));
    CHECK(total(space->mass(), one, x) == doctest::Approx(0.5));
    CHECK(total(space->mass(), x, x) == doctest::Approx(1.0 / 3));
    CHECK((space->stiffness() * one).norm() < 1e-12);
    CHECK(total(space->stiffness(), x, x) == doctest::Approx(1.0));

    const SparseMatrix asym_m = SparseMatrix(space->mass().transpose()) - space->mass();
    const SparseMatrix asym_k = SparseMatrix(space->stiffness().transpose()) - space->stiffness();
    CHECK(asym_m.norm() == 0.0);
    CHECK(asym_k.norm() < 1e-12);
  }
}

TEST_CASE("interpolate and evaluate are consistent on P1 functions") {
  const auto space = assemble(build_mesh(2, 5));
  auto g = [](const Point& p) { return 1.0 + 2.0 * p[0] - 3.0 * p[1]; };
  const FeField f = space->interpolate(g);
  for (Point p : {Point{0.13, 0.77}, Point{0.5, 0.5}, Point{1.0, 0.0}, Point{0.91, 0.02}}) {
    CHECK(space->evaluate(f, p) == doctest::Approx(g(p)));
  }
  CHECK_THROWS_AS(space->evaluate(f, Point{1.5, 0.0}), ValidationError);
}

TEST_CASE("l2_project reproduces linear functions and converges at second order") {
  for (int dim : {1, 2}) {
    const auto space = assemble(build_mesh(dim, 4));
    auto lin = [](const Point& p) { return 2.0 - p[0] + 0.5 * p[1]; };
    CHECK((l2_project(*space, lin) - space->interpolate(lin)).cwiseAbs().maxCoeff() < 1e-12);
  }
  auto g = [](const Point& p) { return std::sin(std::numbers::pi * p[0]) * std::exp(p[1]); };
  auto err = [&](int n) {
    const auto coarse = assemble(build_mesh(2, n));
    const auto fine = assemble(build_mesh(2, 8 * n));
    const FeField ph = l2_project(*coarse, g);
    const FeField lifted = fine->interpolate([&](const Point& p) { return coarse->evaluate(ph, p); });
    return l2_norm(*fine, lifted - fine->interpolate(g));
  };
  CHECK(std::log2(err(4) / err(8)) > 1.8);
}

TEST_CASE("SpdSolver solves and checks its residual") {
  const auto space = assemble(build_mesh(1, 10));
  const Vector b = space->mass() * ones(*space);
  CHECK((space->mass_solver().solve(b) - ones(*space)).norm() < 1e-12);
  CHECK_THROWS_AS(space->mass_solver().solve(Vector::Ones(3)), ValidationError);
}

TEST_CASE("omega_mass on box complements") {
  const auto s1 = assemble(build_mesh(1, 20));
  const auto full = omega_mass(*s1, {});
  CHECK(full->measure == doctest::Approx(1.0));
  CHECK((full->omega_mass - s1->mass()).norm() == 0.0);

  const auto mid = omega_mass(*s1, {{{0.25, 0.75}}});
  CHECK(mid->measure == doctest::Approx(0.5));
  CHECK(total(mid->omega_mass, ones(*s1), ones(*s1)) == doctest::Approx(0.5));
  CHECK(mid->node_in_omega[0] == 1);
  CHECK(mid->node_in_omega[10] == 0);
  CHECK(mid->node_in_omega[5] == 1);  // face node belongs to an observed cell

  const auto s2 = assemble(build_mesh(2, 20));
  const auto box = omega_mass(*s2, {{{0.1, 0.9}, {0.1, 0.9}}});
  CHECK(box->measure == doctest::Approx(1.0 - 0.64));
  const auto side = omega_mass(*s2, {{{0.0, 0.9}, {0.1, 0.9}}});
  CHECK(side->measure == doctest::Approx(1.0 - 0.72));

  CHECK_THROWS_AS(omega_mass(*s1, {{{0.33, 0.75}}}), ValidationError);
  CHECK_THROWS_AS(omega_mass(*s1, {{{0.0, 1.0}}}), ValidationError);
  CHECK_THROWS_AS(omega_mass(*s2, {{{0.1, 0.9}}}), ValidationError);
}

TEST_CASE("norms") {
  const auto space = assemble(build_mesh(2, 8));
  const Norms n1 = norms(*space, ones(*space));
  CHECK(n1.l2 == doctest::Approx(1.0));
  CHECK(n1.h1_semi == doctest::Approx(0.0));
  const Norms nx = norms(*space, space->interpolate([](const Point& p) { return p[1]; }));
  CHECK(nx.l2 == doctest::Approx(std::sqrt(1.0 / 3)));
  CHECK(nx.h1_semi == doctest::Approx(1.0));
  CHECK_THROWS_AS(norms(*space, Vector::Ones(4)), ValidationError);
}
