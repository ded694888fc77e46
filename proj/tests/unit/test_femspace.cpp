#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "polydg/quadrature.hpp"
#include "polydg/space.hpp"
#include "probes.hpp"

using namespace polydg;
using polydg::probes::polygon_moment;

namespace {

PolyMesh pentagon() {
  return PolyMesh::from_polygons({Vec2(0, 0), Vec2(1, 0), Vec2(1.2, 0.8), Vec2(0.5, 1.3), Vec2(-0.2, 0.7)},
                                 {{0, 1, 2, 3, 4}}, {Region::acoustic});
}

double integrate(const QuadratureRule& rule, auto&& f) {
  double s = 0.0;
  for (Index q = 0; q < rule.size(); ++q) s += rule.weights[q] * f(rule.points[q]);
  return s;
}

}  // namespace

TEST_CASE("gauss legendre integrates up to degree 2n-1") {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule1D& g = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
}

TEST_CASE("unit square volume quadrature") {
  const auto mesh = build_cartesian_mesh({0, 1, 0, 1}, 1, 1, [](const Vec2&) { return Region::acoustic; });
  CHECK(integrate(volume_quadrature(mesh, 0, 1), [](const Vec2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
  const double xy = integrate(volume_quadrature(mesh, 0, 4),
                              [](const Vec2& x) { return x.x() * x.x() * x.y() * x.y(); });
  CHECK(std::abs(xy - 1.0 / 9.0) < 1e-15);
}

TEST_CASE("pentagon moments match the closed-form oracle") {
  const auto mesh = pentagon();
  const std::vector<Vec2> verts(mesh.vertices().begin(), mesh.vertices().end());
  const double lin = integrate(volume_quadrature(mesh, 0, 1), [](const Vec2& x) { return x.x() + x.y(); });
  CHECK(std::abs(lin - polygon_moment(verts, 1, 0) - polygon_moment(verts, 0, 1)) < 1e-13);
  for (int e = 1; e <= 14; ++e) {
    const QuadratureRule rule = volume_quadrature(mesh, 0, e);
    CHECK(rule.exactness >= e);
    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - mesh.area(0)) <= 1e-12 * mesh.area(0));
    for (int p = 0; p <= e; ++p)
      for (int q = 0; p + q <= e; ++q) {
        const double exact = polygon_moment(verts, p, q);
        const double got = integrate(rule, [&](const Vec2& x) { return std::pow(x.x(), p) * std::pow(x.y(), q); });
        CHECK_MESSAGE(std::abs(got - exact) <= 1e-12 * std::max(1.0, std::abs(exact)), "p=" << p << " q=" << q << " e=" << e);
      }
  }
}

TEST_CASE("face quadrature") {
  const QuadratureRule r = segment_quadrature(Vec2(0, 0), Vec2(2, 0), 1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0].x() == doctest::Approx(1.0));
  CHECK(r.points[0].y() == doctest::Approx(0.0));
  CHECK(r.weights[0] == doctest::Approx(2.0));
  for (int e = 0; e <= 9; ++e) {
    const QuadratureRule s = segment_quadrature(Vec2(0.3, -0.1), Vec2(1.1, 0.5), e);
    CHECK(static_cast<int>(s.size()) == (e + 2) / 2);
    // Integral of t^e along the segment parametrized by arc length t in [0, 1].
    double got = 0.0;
    for (Index q = 0; q < s.size(); ++q) got += s.weights[q] * std::pow((s.points[q] - Vec2(0.3, -0.1)).norm(), e);
    CHECK(got == doctest::Approx(std::pow(1.0, e + 1) / (e + 1)).epsilon(1e-13));
  }
}

TEST_CASE("basis evaluation") {
  const ModalBasis basis({0.0, 2.0, 0.0, 1.0}, 3);
  CHECK(basis.size() == 10);
  std::vector<double> v(10), dx(10), dy(10);
  for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(1.7, 0.9), Vec2(3.0, -1.0)}) {
    basis.eval_point_grad(x, v.data(), dx.data(), dy.data());
    CHECK(v[0] == 1.0);
    CHECK(dx[0] == 0.0);
    // mode 1 is L1((x - 1) * 2 / 2): d/dx = 1
    CHECK(dx[1] == doctest::Approx(1.0));
    CHECK(dy[2] == doctest::Approx(2.0));
  }
}

TEST_CASE("gradients match central differences") {
  const auto mesh = pentagon();
  const DgSpace space = build_space(std::make_shared<const PolyMesh>(mesh), 4, 4);
  const ModalBasis& b = space.basis(0);
  const double h = 1e-6 * mesh.diameter(0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::vector<double> dx(b.size()), dy(b.size()), vp(b.size()), vm(b.size());
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 x(ux(rng), ux(rng));
    b.eval_point_grad(x, nullptr, dx.data(), dy.data());
    b.eval_point(x + Vec2(h, 0), vp.data());
    b.eval_point(x - Vec2(h, 0), vm.data());
    for (Index k = 0; k < b.size(); ++k)
      CHECK(std::abs((vp[k] - vm[k]) / (2 * h) - dx[k]) <= 1e-6 * std::max(1.0, std::abs(dx[k])));
    b.eval_point(x + Vec2(0, h), vp.data());
    b.eval_point(x - Vec2(0, h), vm.data());
    for (Index k = 0; k < b.size(); ++k)
      CHECK(std::abs((vp[k] - vm[k]) / (2 * h) - dy[k]) <= 1e-6 * std::max(1.0, std::abs(dy[k])));
  }
}

TEST_CASE("polynomial reproduction by L2 projection") {
  const auto mesh = std::make_shared<const PolyMesh>(pentagon());
  for (int p = 1; p <= 5; ++p) {
    const DgSpace space = build_space(mesh, p, p);
    const QuadratureRule rule = volume_quadrature(*mesh, 0, 2 * p + 2);
    const DenseMatrix phi = space.basis(0).eval(rule.points);
    auto poly = [p](const Vec2& x) {
      double s = 0.0;
      for (int i = 0; i <= p; ++i)
        for (int j = 0; i + j <= p; ++j) s += (1.0 + 0.3 * i - 0.2 * j) * std::pow(x.x(), i) * std::pow(x.y(), j);
      return s;
    };
    Vector rhs = Vector::Zero(phi.rows());
    for (Index q = 0; q < rule.size(); ++q) rhs += rule.weights[q] * poly(rule.points[q]) * phi.col(q);
    const DenseMatrix gram = element_gram(space, 0);
    const Vector c = gram.llt().solve(rhs);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      const Vec2 x(u(rng), u(rng));
      const double got = space.eval_scalar(0, c, 0, x);
      CHECK(std::abs(got - poly(x)) <= 1e-11 * std::abs(poly(x)));
    }
    CHECK(gram_condition_number(space, 0) > 1.0);
  }
}

TEST_CASE("dof map") {
  const auto two = std::make_shared<const PolyMesh>(
      build_cartesian_mesh({0, 1, 0, 1}, 2, 1, [](const Vec2& x) { return x.x() < 0.5 ? Region::poroelastic : Region::acoustic; }));
  const DgSpace s1 = build_space(two, 1, 1);
  CHECK(s1.dofs().u_size == 6);
  CHECK(s1.dofs().phi_size == 3);
  CHECK(s1.size() == 15);
  CHECK(s1.u_index(0, 1) == 3);
  CHECK(s1.w_index(0, 0) == 6);
  CHECK(s1.phi_index(1) == 12);

  const auto one = std::make_shared<const PolyMesh>(
      build_cartesian_mesh({0, 1, 0, 1}, 1, 1, [](const Vec2&) { return Region::poroelastic; }));
  CHECK(build_space(one, 3, 3).dofs().u_size == 20);

  const auto vor = std::make_shared<const PolyMesh>(load_mesh(std::string(POLYDG_DATA_DIR) + "/meshes/tc1_voronoi_100.txt"));
  const Index np = vor->count(Region::poroelastic);
  CHECK(build_space(vor, 3, 3).size() == 2 * (2 * 10 * np) + 10 * (100 - np));

  CHECK_THROWS_AS(build_space(two, 0, 1), ModelError);
  CHECK_THROWS_AS(build_space(two, 1, 0), ModelError);
}
