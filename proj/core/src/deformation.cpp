#include "polarcone/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "polarcone/error.hpp"

namespace polarcone {

VectorMeasure::VectorMeasure(int dim, std::vector<Point> atoms, std::vector<Point> vectors)
    : dim_(dim), atoms_(std::move(atoms)), vectors_(std::move(vectors)) {
  if (dim_ < 1 || dim_ > 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  if (atoms_.size() != vectors_.size()) {
    throw Error(ErrorCode::LengthMismatch, "atoms and vectors differ in length");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].size() != dim_ || vectors_[i].size() != dim_) {
      throw Error(ErrorCode::LengthMismatch, "vector measure entry has the wrong dimension");
    }
    first_moment_ += atoms_[i].norm() * vectors_[i].norm();
  }
  if (!std::isfinite(first_moment_)) {
    throw Error(ErrorCode::InvalidMeasure, "invalid measure: infinite first moment");
  }
}

double VectorMeasure::moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += atoms_[i].dot(vectors_[i]);
  return s;
}

VectorMeasure VectorMeasure::scaled(double factor) const {
  auto v = vectors_;
  for (auto& f : v) f *= factor;
  return VectorMeasure(dim_, atoms_, std::move(v));
}

MatrixMeasureField::MatrixMeasureField(int dim, std::vector<SymMatrix> cells)
    : dim_(dim), cells_(std::move(cells)) {
  for (const auto& c : cells_) {
    if (c.rows() != dim_ || c.cols() != dim_) {
      throw Error(ErrorCode::LengthMismatch, "matrix field entry has the wrong dimension");
    }
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + c.cwiseAbs().maxCoeff())) {
      throw Error(ErrorCode::InvalidArgument, "matrix field entry is not symmetric");
    }
  }
}

MatrixMeasureField MatrixMeasureField::zero(const Grid& grid) {
  const int d = grid.dim();
  return MatrixMeasureField(d, std::vector<SymMatrix>(grid.cell_count(), SymMatrix::Zero(d, d)));
}

double MatrixMeasureField::total_trace() const {
  double t = 0.0;
  for (const auto& c : cells_) t += c.trace();
  return t;
}

double MatrixMeasureField::min_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : cells_) m = std::min(m, polarcone::min_eigenvalue(c));
  return cells_.empty() ? 0.0 : m;
}

double MatrixMeasureField::max_norm() const {
  double m = 0.0;
  for (const auto& c : cells_) m = std::max(m, c.norm());
  return m;
}

bool MatrixMeasureField::is_psd(double tol) const { return min_eigenvalue() >= -tol; }

double MatrixMeasureField::pair(std::span<const SymMatrix> v) const {
  if (v.size() != cells_.size()) {
    throw Error(ErrorCode::GridMismatch, "field and test tensor differ in cell count");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < cells_.size(); ++c) s += frobenius_pairing(v[c], cells_[c]);
  return s;
}

MatrixMeasureField MatrixMeasureField::scaled(double factor) const {
  auto cells = cells_;
  for (auto& c : cells) c *= factor;
  return MatrixMeasureField(dim_, std::move(cells));
}

std::vector<SymMatrix> cell_gradient(const Grid& grid, std::span<const Point> nodal) {
  if (nodal.size() != grid.node_count()) {
    throw Error(ErrorCode::GridMismatch, "nodal values do not match the grid");
  }
  const int d = grid.dim();
  const std::size_t corners = std::size_t{1} << d;
  const double edges = static_cast<double>(corners / 2);
  std::vector<SymMatrix> out(grid.cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto nodes = grid.cell_corners(c);
    SymMatrix jac = SymMatrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
      Point diff = Point::Zero(d);
      for (std::size_t k = 0; k < corners; ++k) {
        if ((k >> a) & 1u) continue;
        diff += nodal[nodes[k | (std::size_t{1} << a)]] - nodal[nodes[k]];
      }
      jac.col(a) = diff / (edges * grid.spacing(a));
    }
    out[c] = jac;
  }
  return out;
}

std::vector<SymMatrix> deformation_tensor(const Grid& grid, std::span<const Point> nodal) {
  auto grads = cell_gradient(grid, nodal);
  for (auto& g : grads) g = symmetric_part(g);
  return grads;
}

TestDeformation make_deformation(const Grid& grid, std::vector<Point> nodal) {
  for (const auto& p : nodal) {
    if (p.size() != grid.dim()) throw Error(ErrorCode::GridMismatch, "nodal value has the wrong dimension");
  }
  auto tensor = deformation_tensor(grid, nodal);
  return {std::move(nodal), std::move(tensor)};
}

TestDeformation identity_deformation(const Grid& grid) {
  return sample_deformation(grid, [](const Point& x) { return x; });
}

Point interpolate(const Grid& grid, std::span<const Point> nodal, const Point& x) {
  const auto loc = grid.locate(x);
  if (!loc) throw Error(ErrorCode::SupportExceedsGrid, "support exceeds grid");
  const auto nodes = grid.cell_corners(loc->cell);
  Point u = Point::Zero(grid.dim());
  for (std::size_t k = 0; k < nodes.size(); ++k) u += loc->weights[k] * nodal[nodes[k]];
  return u;
}

std::vector<TestDeformation> monotone_test_family(const Grid& grid, std::size_t count,
                                                  std::uint64_t seed) {
  const int d = grid.dim();
  if (count < static_cast<std::size_t>(sym_size(d) + 1)) {
    throw Error(ErrorCode::CountTooSmall, "count too small: need at least d(d+1)/2 + 1 members");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto random_unit = [&] {
    Point v(d);
    do {
      for (int a = 0; a < d; ++a) v[a] = normal(rng);
    } while (v.norm() < 1e-8);
    return Point(v / v.norm());
  };
  auto rank_one = [&](const Point& v) {
    return sample_deformation(grid, [v](const Point& x) { return Point(v.dot(x) * v); });
  };

  double diameter = 0.0;
  for (int a = 0; a < d; ++a) diameter += std::pow(grid.hi(a) - grid.lo(a), 2);
  diameter = std::sqrt(diameter);

  std::vector<TestDeformation> family;
  family.reserve(count);
  family.push_back(identity_deformation(grid));
  for (int a = 0; a < d && family.size() < count; ++a) {
    family.push_back(rank_one(Point(Point::Unit(d, a))));
  }
  std::size_t k = 0;
  while (family.size() < count) {
    switch (k++ % 3) {
      case 0: {
        SymMatrix r(d, d), q(d, d);
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            r(i, j) = normal(rng);
            q(i, j) = normal(rng);
          }
        }
        const SymMatrix a = r * r.transpose() / d + 0.5 * (q - q.transpose());
        family.push_back(sample_deformation(grid, [a](const Point& x) { return Point(a * x); }));
        break;
      }
      case 1:
        family.push_back(rank_one(random_unit()));
        break;
      default: {
        // gradient of eps * s^2 * sqrt(1 + |x - c|^2 / s^2), a convex function
        Point c(d);
        for (int a = 0; a < d; ++a) c[a] = grid.lo(a) + unit(rng) * (grid.hi(a) - grid.lo(a));
        const double s = (0.1 + 0.4 * unit(rng)) * diameter;
        const double eps = 0.5 + unit(rng);
        family.push_back(sample_deformation(grid, [c, s, eps](const Point& x) {
          const Point r = x - c;
          return Point(eps * r / std::sqrt(1.0 + r.squaredNorm() / (s * s)));
        }));
        break;
      }
    }
  }
  return family;
}

double evaluate_G(const Grid& grid, const VectorMeasure& f, const MatrixMeasureField& h,
                  const TestDeformation& u) {
  if (f.size() > 0 && f.dim() != grid.dim()) {
    throw Error(ErrorCode::GridMismatch, "force measure dimension differs from the grid");
  }
  if (h.size() != grid.cell_count() || u.tensor.size() != grid.cell_count()) {
    throw Error(ErrorCode::GridMismatch, "field is not defined on the grid");
  }
  double g = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    g -= interpolate(grid, u.nodal, f.atoms()[i]).dot(f.vectors()[i]);
  }
  g -= h.pair(u.tensor);
  return g;
}

double trace_budget(const VectorMeasure& f, const MatrixMeasureField& h) {
  return -f.moment() - h.total_trace();
}

InequalityReport check_inequality(const Grid& grid, const VectorMeasure& f,
                                  const MatrixMeasureField& h,
                                  std::span<const TestDeformation> family) {
  InequalityReport report;
  const double g_id = evaluate_G(grid, f, h, identity_deformation(grid));
  report.tol_G = 1e-9 * (1.0 + std::abs(g_id));
  report.min_G = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double g = evaluate_G(grid, f, h, family[k]);
    report.min_G = std::min(report.min_G, g);
    if (g < -report.tol_G) report.violating_members.push_back(k);
  }
  if (family.empty()) report.min_G = 0.0;
  return report;
}

}  // namespace polarcone
