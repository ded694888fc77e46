#include "polydg/basis.hpp"

#include <array>
#include <atomic>

namespace polydg {

void legendre(int n, double t, double* values, double* derivatives) {
  values[0] = 1.0;
  if (derivatives) derivatives[0] = 0.0;
  if (n == 0) return;
  values[1] = t;
  if (derivatives) derivatives[1] = 1.0;
  for (int k = 2; k <= n; ++k) {
    values[k] = ((2.0 * k - 1.0) * t * values[k - 1] - (k - 1.0) * values[k - 2]) / k;
    if (derivatives) derivatives[k] = derivatives[k - 2] + (2.0 * k - 1.0) * values[k - 1];
  }
}

ModalBasis::ModalBasis(const Rectangle& box, int degree) : box_(box), degree_(degree) {
  if (degree < 0 || degree > max_degree) throw ModelError("polynomial degree out of range [0, 30]");
  const double wx = box.x1 - box.x0, wy = box.y1 - box.y0;
  if (!(wx > 0.0) || !(wy > 0.0)) throw ModelError("degenerate element bounding box");
  center_ = Vec2(0.5 * (box.x0 + box.x1), 0.5 * (box.y0 + box.y1));
  scale_ = Vec2(2.0 / wx, 2.0 / wy);
  for (int total = 0; total <= degree; ++total)
    for (int j = 0; j <= total; ++j) exponents_.push_back({total - j, j});
}

namespace {

std::atomic<std::size_t> outside_count{0};

void check_inside([[maybe_unused]] const Rectangle& box, [[maybe_unused]] const Vec2& x) {
#ifndef NDEBUG
  const double tx = 1e-8 * (box.x1 - box.x0), ty = 1e-8 * (box.y1 - box.y0);
  if (x.x() < box.x0 - tx || x.x() > box.x1 + tx || x.y() < box.y0 - ty || x.y() > box.y1 + ty)
    outside_count.fetch_add(1, std::memory_order_relaxed);
#endif
}

}  // namespace

std::size_t ModalBasis::outside_evaluations() { return outside_count.load(std::memory_order_relaxed); }

void ModalBasis::eval_point(const Vec2& x, double* values) const {
  check_inside(box_, x);
  std::array<double, 32> lx{}, ly{};
  legendre(degree_, (x.x() - center_.x()) * scale_.x(), lx.data(), nullptr);
  legendre(degree_, (x.y() - center_.y()) * scale_.y(), ly.data(), nullptr);
  for (Index k = 0; k < exponents_.size(); ++k) values[k] = lx[exponents_[k][0]] * ly[exponents_[k][1]];
}

void ModalBasis::eval_point_grad(const Vec2& x, double* values, double* dx, double* dy) const {
  check_inside(box_, x);
  std::array<double, 32> lx{}, ly{}, dlx{}, dly{};
  legendre(degree_, (x.x() - center_.x()) * scale_.x(), lx.data(), dlx.data());
  legendre(degree_, (x.y() - center_.y()) * scale_.y(), ly.data(), dly.data());
  for (Index k = 0; k < exponents_.size(); ++k) {
    const auto [i, j] = exponents_[k];
    if (values) values[k] = lx[i] * ly[j];
    dx[k] = scale_.x() * dlx[i] * ly[j];
    dy[k] = scale_.y() * lx[i] * dly[j];
  }
}

DenseMatrix ModalBasis::eval(const std::vector<Vec2>& points) const {
  DenseMatrix values(size(), points.size());
  for (Index q = 0; q < points.size(); ++q) eval_point(points[q], values.col(q).data());
  return values;
}

void ModalBasis::eval_grad(const std::vector<Vec2>& points, DenseMatrix& dx, DenseMatrix& dy) const {
  dx.resize(size(), points.size());
  dy.resize(size(), points.size());
  for (Index q = 0; q < points.size(); ++q)
    eval_point_grad(points[q], nullptr, dx.col(q).data(), dy.col(q).data());
}

}  // namespace polydg
