#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "polarcone/cone.hpp"
#include "polarcone/deformation.hpp"
#include "polarcone/error.hpp"
#include "polarcone/stress.hpp"

using namespace polarcone;

namespace {

Point pt(double x) {
  Point p(1);
  p << x;
  return p;
}
Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

template <class Fn>
void expect_error(ErrorCode code, Fn&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

SymMatrix random_sym(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  SymMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  return (a + a.transpose()) / 2;
}

}  // namespace

TEST(Grid, LayoutAndLocate) {
  Grid g({0.0, -1.0}, {2.0, 1.0}, {4, 2});
  EXPECT_EQ(g.dim(), 2);
  EXPECT_EQ(g.node_count(), 15u);
  EXPECT_EQ(g.cell_count(), 8u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.5);
  EXPECT_DOUBLE_EQ(g.spacing(1), 1.0);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.5);
  EXPECT_EQ(g.node_flat({1, 2, 0}), 11u);
  EXPECT_EQ(g.node_index(11)[0], 1u);
  EXPECT_EQ(g.node_index(11)[1], 2u);
  EXPECT_TRUE(g.node_position(11).isApprox(pt(0.5, 1.0)));
  EXPECT_TRUE(g.cell_center(g.cell_flat({3, 1, 0})).isApprox(pt(1.75, 0.5)));
  EXPECT_TRUE(g.is_boundary_node(0));
  EXPECT_FALSE(g.is_boundary_node(g.node_flat({1, 1, 0})));

  auto corners = g.cell_corners(0);
  EXPECT_EQ(corners, (std::vector<std::size_t>{0, 1, 5, 6}));

  auto loc = g.locate(pt(0.25, -0.5));
  ASSERT_TRUE(loc);
  EXPECT_EQ(loc->cell, 0u);
  for (double w : loc->weights) EXPECT_DOUBLE_EQ(w, 0.25);
  EXPECT_TRUE(g.locate(pt(2.0, 1.0)));
  EXPECT_FALSE(g.locate(pt(2.1, 0.0)));
}

TEST(Grid, Validation) {
  expect_error(ErrorCode::InvalidArgument, [] { Grid({0.0}, {1.0}, {1}); });
  expect_error(ErrorCode::InvalidArgument, [] { Grid({1.0}, {1.0}, {4}); });
  expect_error(ErrorCode::InvalidArgument, [] { Grid::cube(4, 0.0, 1.0, 3); });
  expect_error(ErrorCode::LengthMismatch, [] { Grid({0.0, 0.0}, {1.0}, {4, 4}); });
}

TEST(DeformationTensor, IdentityGivesIdentity) {
  for (int d = 1; d <= 3; ++d) {
    auto g = Grid::cube(d, -1.0, 2.0, 3);
    auto u = identity_deformation(g);
    for (const auto& e : u.tensor) EXPECT_TRUE(e.isApprox(SymMatrix::Identity(d, d), 1e-14));
  }
}

TEST(DeformationTensor, RigidRotationVanishes) {
  auto g = Grid::cube(2, 0.0, 1.0, 5);
  auto u = sample_deformation(g, [](const Point& x) { return Point(pt(-3.0 * x[1] + 1, 3.0 * x[0] - 2)); });
  for (const auto& e : u.tensor) EXPECT_LT(e.cwiseAbs().maxCoeff(), 1e-13);

  auto g3 = Grid::cube(3, 0.0, 1.0, 3);
  Eigen::Matrix3d b;
  b << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
  auto u3 = sample_deformation(g3, [&](const Point& x) { return Point(b * x); });
  for (const auto& e : u3.tensor) EXPECT_LT(e.cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DeformationTensor, QuadraticComponent) {
  for (std::size_t n : {4u, 8u, 16u}) {
    auto g = Grid::cube(2, 0.0, 1.0, n);
    auto u = sample_deformation(g, [](const Point& x) { return Point(pt(x[0] * x[0], 0.0)); });
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      EXPECT_NEAR(u.tensor[c](0, 0), 2.0 * g.cell_center(c)[0], 1e-12);
      EXPECT_NEAR(u.tensor[c](0, 1), 0.0, 1e-14);
      EXPECT_NEAR(u.tensor[c](1, 1), 0.0, 1e-14);
    }
  }
}

TEST(DeformationTensor, SymmetrizedGradient) {
  auto g = Grid::cube(2, 0.0, 1.0, 4);
  auto u = sample_deformation(g, [](const Point& x) { return Point(pt(0.0, 4.0 * x[0])); });
  auto grad = cell_gradient(g, u.nodal);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    EXPECT_NEAR(grad[c](1, 0), 4.0, 1e-13);
    EXPECT_NEAR(grad[c](0, 1), 0.0, 1e-13);
    EXPECT_NEAR(u.tensor[c](0, 1), 2.0, 1e-13);
    EXPECT_NEAR(u.tensor[c](1, 0), 2.0, 1e-13);
  }
}

TEST(DeformationTensor, ConvergenceSlope) {
  auto exact = [](const Point& x) {
    SymMatrix j(2, 2);
    j << std::cos(x[0]) * std::cos(2 * x[1]), -2 * std::sin(x[0]) * std::sin(2 * x[1]),
        2 * x[0] * std::exp(x[1]), x[0] * x[0] * std::exp(x[1]);
    return SymMatrix((j + j.transpose()) / 2);
  };
  std::vector<double> hs, errs;
  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    auto g = Grid::cube(2, 0.0, 1.0, n);
    auto u = sample_deformation(g, [](const Point& x) {
      return Point(pt(std::sin(x[0]) * std::cos(2 * x[1]), x[0] * x[0] * std::exp(x[1])));
    });
    double err = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c)
      err = std::max(err, (u.tensor[c] - exact(g.cell_center(c))).cwiseAbs().maxCoeff());
    hs.push_back(g.spacing(0));
    errs.push_back(err);
  }
  for (std::size_t k = 1; k < hs.size(); ++k) {
    const double slope = std::log(errs[k - 1] / errs[k]) / std::log(hs[k - 1] / hs[k]);
    EXPECT_GE(slope, 0.9) << "refinement " << k;
  }
}

TEST(DeformationTensor, GridMismatch) {
  auto g = Grid::cube(2, 0.0, 1.0, 4);
  std::vector<Point> nodal(3, pt(0.0, 0.0));
  expect_error(ErrorCode::GridMismatch, [&] { deformation_tensor(g, nodal); });
}

TEST(Interpolate, ReproducesAffineMaps) {
  auto g = Grid::cube(2, -1.0, 1.0, 5);
  auto u = sample_deformation(g, [](const Point& x) { return Point(pt(2 * x[0] - x[1] + 3, 0.5 * x[1])); });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Point x = pt(ud(rng), ud(rng));
    Point v = interpolate(g, u.nodal, x);
    EXPECT_NEAR(v[0], 2 * x[0] - x[1] + 3, 1e-13);
    EXPECT_NEAR(v[1], 0.5 * x[1], 1e-13);
  }
  expect_error(ErrorCode::SupportExceedsGrid, [&] { interpolate(g, u.nodal, pt(1.5, 0.0)); });
}

TEST(MonotoneFamily, Conventions) {
  for (int d = 1; d <= 3; ++d) {
    auto g = Grid::cube(d, -1.0, 1.0, d == 3 ? 3 : 6);
    const std::size_t count = 12;
    auto fam = monotone_test_family(g, count, 42);
    ASSERT_EQ(fam.size(), count);
    auto id = identity_deformation(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) EXPECT_TRUE(fam[0].nodal[n].isApprox(id.nodal[n]));

    std::vector<Point> nodes(g.node_count());
    for (std::size_t n = 0; n < nodes.size(); ++n) nodes[n] = g.node_position(n);
    for (const auto& u : fam) EXPECT_TRUE(is_monotone_map(nodes, u.nodal));

    auto again = monotone_test_family(g, count, 42);
    auto other = monotone_test_family(g, count, 43);
    bool differs = false;
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t n = 0; n < g.node_count(); ++n) {
        EXPECT_EQ(again[k].nodal[n], fam[k].nodal[n]);
        if (other[k].nodal[n] != fam[k].nodal[n]) differs = true;
      }
    }
    EXPECT_TRUE(differs);
  }
}

TEST(MonotoneFamily, OneDimensionalTensorsNonnegative) {
  auto g = Grid::cube(1, 0.0, 1.0, 20);
  auto fam = monotone_test_family(g, 30, 5);
  bool has_nonlinear = false;
  for (const auto& u : fam) {
    for (const auto& e : u.tensor) EXPECT_GE(e(0, 0), -1e-14);
    for (std::size_t c = 1; c < g.cell_count(); ++c)
      if (std::abs(u.tensor[c](0, 0) - u.tensor[0](0, 0)) > 1e-6) has_nonlinear = true;
  }
  EXPECT_TRUE(has_nonlinear);
}

TEST(MonotoneFamily, CountTooSmall) {
  auto g = Grid::cube(2, 0.0, 1.0, 4);
  expect_error(ErrorCode::CountTooSmall, [&] { monotone_test_family(g, 3, 1); });
  EXPECT_NO_THROW(monotone_test_family(g, 4, 1));
}

TEST(EvaluateG, ZeroData) {
  auto g = Grid::cube(2, 0.0, 1.0, 4);
  auto fam = monotone_test_family(g, 10, 1);
  for (const auto& u : fam)
    EXPECT_EQ(evaluate_G(g, VectorMeasure::zero(2), MatrixMeasureField::zero(g), u), 0.0);
}

TEST(EvaluateG, IdentityEqualsTraceBudget) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto g = Grid::cube(2, 0.0, 1.0, 5);
  std::vector<Point> atoms, vecs;
  double moment = 0.0;
  for (int i = 0; i < 7; ++i) {
    atoms.push_back(pt(ud(rng), ud(rng)));
    vecs.push_back(pt(nd(rng), nd(rng)));
    moment += atoms.back().dot(vecs.back());
  }
  std::vector<SymMatrix> h;
  double trace = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    h.push_back(random_sym(rng, 2));
    trace += h.back().trace();
  }
  VectorMeasure f(2, atoms, vecs);
  MatrixMeasureField hf(2, h);
  const double gid = evaluate_G(g, f, hf, identity_deformation(g));
  EXPECT_NEAR(gid, -moment - trace, 1e-12 * (1 + std::abs(gid)));
  EXPECT_NEAR(trace_budget(f, hf), -moment - trace, 1e-12 * (1 + std::abs(gid)));
}

TEST(EvaluateG, OneDimensionalHandSum) {
  auto g = Grid::cube(1, -1.0, 1.0, 4);
  VectorMeasure f(1, {pt(-0.5), pt(0.5)}, {pt(1.0), pt(-1.0)});
  const double val = evaluate_G(g, f, MatrixMeasureField::zero(g), identity_deformation(g));
  EXPECT_DOUBLE_EQ(val, -((-0.5) * 1.0 + 0.5 * (-1.0)));
  EXPECT_DOUBLE_EQ(val, 1.0);
  VectorMeasure flipped(1, {pt(0.5), pt(-0.5)}, {pt(1.0), pt(-1.0)});
  EXPECT_DOUBLE_EQ(evaluate_G(g, flipped, MatrixMeasureField::zero(g), identity_deformation(g)), -1.0);
}

TEST(EvaluateG, SupportExceedsGrid) {
  auto g = Grid::cube(1, 0.0, 1.0, 4);
  VectorMeasure f(1, {pt(1.5)}, {pt(1.0)});
  expect_error(ErrorCode::SupportExceedsGrid,
               [&] { evaluate_G(g, f, MatrixMeasureField::zero(g), identity_deformation(g)); });
}

TEST(EvaluateG, Linearity) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto g = Grid::cube(2, 0.0, 1.0, 6);
  std::vector<Point> atoms, vecs;
  for (int i = 0; i < 10; ++i) {
    atoms.push_back(pt(ud(rng), ud(rng)));
    vecs.push_back(pt(nd(rng), nd(rng)));
  }
  std::vector<SymMatrix> h;
  for (std::size_t c = 0; c < g.cell_count(); ++c) h.push_back(random_sym(rng, 2));
  VectorMeasure f(2, atoms, vecs);
  MatrixMeasureField hf(2, h);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> a(g.node_count()), b(g.node_count()), ab(g.node_count());
    const double alpha = nd(rng), beta = nd(rng);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      a[n] = pt(nd(rng), nd(rng));
      b[n] = pt(nd(rng), nd(rng));
      ab[n] = alpha * a[n] + beta * b[n];
    }
    const double ga = evaluate_G(g, f, hf, make_deformation(g, a));
    const double gb = evaluate_G(g, f, hf, make_deformation(g, b));
    const double gab = evaluate_G(g, f, hf, make_deformation(g, ab));
    const double scale = std::abs(alpha * ga) + std::abs(beta * gb) + 1.0;
    EXPECT_NEAR(gab, alpha * ga + beta * gb, 1e-12 * scale);
  }
}

TEST(EvaluateG, RigidNullOnFlowInstances) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.05, 0.35);
  auto g = Grid::cube(2, -1.0, 1.0, 8);
  for (int trial = 0; trial < 10; ++trial) {
    // 4-fold symmetric density about c: isotropic second moment, zero first moment
    const Point c = pt(0.1 * nd(rng), 0.1 * nd(rng));
    FlowData data;
    data.grid = g;
    data.gamma = 1.5 + trial * 0.1;
    for (int k = 0; k < 3; ++k) {
      const double r = ud(rng), th = 2.0 * nd(rng), w = 0.1 + std::abs(nd(rng));
      for (int q = 0; q < 4; ++q) {
        const double a = th + q * std::numbers::pi / 2;
        data.rho.atoms.push_back(c + pt(r * std::cos(a), r * std::sin(a)));
        data.rho.weights.push_back(w);
      }
    }
    SymMatrix a = random_sym(rng, 2);
    for (std::size_t n = 0; n < g.node_count(); ++n) {
      const Point x = g.node_position(n);
      data.f_nodes.push_back(x);
      data.h_nodes.push_back(x + a * (x - c));
    }
    data.e_weights.assign(g.cell_count(), 0.0);
    for (auto& e : data.e_weights) e = std::abs(nd(rng));
    auto inst = instance_from_flow(data);

    const double omega = nd(rng);
    const Point shift = pt(nd(rng), nd(rng));
    auto rigid = sample_deformation(g, [&](const Point& x) { return Point(pt(-omega * x[1], omega * x[0]) + shift); });
    auto minus = sample_deformation(g, [&](const Point& x) { return Point(-(pt(-omega * x[1], omega * x[0]) + shift)); });
    const double gp = evaluate_G(g, inst.F, inst.H, rigid);
    const double gm = evaluate_G(g, inst.F, inst.H, minus);
    EXPECT_NEAR(gp, gm, 1e-12);
    EXPECT_NEAR(gp, 0.0, 1e-12);
  }
}

TEST(EvaluateG, RigidNullOnManufacturedInstances) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd(0.0, 1.0);
  auto g = Grid::cube(2, 0.0, 1.0, 7);
  std::vector<SymMatrix> cells(g.cell_count(), SymMatrix::Zero(2, 2));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (g.is_boundary_cell(c)) continue;
    SymMatrix l = random_sym(rng, 2);
    cells[c] = l * l.transpose();
  }
  auto f = divergence_measure(g, MatrixMeasureField(2, cells));
  auto h = MatrixMeasureField::zero(g);
  auto rigid = sample_deformation(g, [](const Point& x) { return Point(pt(x[1] + 2, -x[0] - 1)); });
  auto minus = sample_deformation(g, [](const Point& x) { return Point(pt(-x[1] - 2, x[0] + 1)); });
  EXPECT_NEAR(evaluate_G(g, f, h, rigid), 0.0, 1e-12);
  EXPECT_NEAR(evaluate_G(g, f, h, minus), 0.0, 1e-12);
}

TEST(CheckInequality, ZeroData) {
  auto g = Grid::cube(2, 0.0, 1.0, 4);
  auto fam = monotone_test_family(g, 10, 1);
  auto rep = check_inequality(g, VectorMeasure::zero(2), MatrixMeasureField::zero(g), fam);
  EXPECT_EQ(rep.min_G, 0.0);
  EXPECT_TRUE(rep.passed());
}

TEST(CheckInequality, EmbeddedPolarResidualAndSignFlip) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t n = 10;
  std::vector<double> x0(n), v0(n), w(n, 1.0 / n);
  for (std::size_t i = 0; i < n; ++i) {
    x0[i] = 0.15 + 0.7 * (i + 0.5) / n;
    v0[i] = nd(rng);
  }
  StickyState s(MonotoneMap1D(x0), v0, DiscreteMeasure(x0, w, true));
  auto y = polar_residual(s, 0.4);
  std::vector<Point> atoms, vecs;
  for (std::size_t i = 0; i < n; ++i) {
    atoms.push_back(pt(x0[i]));
    vecs.push_back(pt(y[i] * w[i]));
  }
  auto g = Grid::cube(1, 0.0, 1.0, 30);
  VectorMeasure f(1, atoms, vecs);
  auto fam = monotone_test_family(g, 40, 3);
  auto rep = check_inequality(g, f, MatrixMeasureField::zero(g), fam);
  EXPECT_GE(rep.min_G, -1e-9);
  EXPECT_TRUE(rep.passed());

  auto flipped = check_inequality(g, f.scaled(-1.0), MatrixMeasureField::zero(g), fam);
  EXPECT_FALSE(flipped.passed());
  EXPECT_LT(flipped.min_G, -flipped.tol_G);
}
