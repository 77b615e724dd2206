#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "instances.hpp"
#include "polarcone/error.hpp"
#include "polarcone/stress.hpp"

using namespace polarcone;

namespace {

std::vector<SymMatrix> random_field(std::mt19937_64& rng, const Grid& g) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const int d = g.dim();
  std::vector<SymMatrix> v(g.cell_count());
  for (auto& c : v) {
    SymMatrix a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = nd(rng);
    c = (a + a.transpose()) / 2;
  }
  return v;
}

std::vector<SymMatrix> add(const std::vector<SymMatrix>& a, const std::vector<SymMatrix>& b,
                           double fb = 1.0) {
  std::vector<SymMatrix> out(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) out[c] = a[c] + fb * b[c];
  return out;
}

std::vector<SymMatrix> scale(const std::vector<SymMatrix>& a, double s) {
  std::vector<SymMatrix> out(a);
  for (auto& c : out) c *= s;
  return out;
}

}  // namespace

class GaugeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(51);
    inst_ = polarcone::testing::manufactured_2d(rng, 5);
  }
  polarcone::testing::Manufactured inst_;
};

TEST_F(GaugeTest, ZeroArgument) {
  auto zero = std::vector<SymMatrix>(inst_.problem.grid.cell_count(), SymMatrix::Zero(2, 2));
  auto p = riedl_gauge(inst_.problem, zero);
  EXPECT_LE(p.value, 1e-12);
  EXPECT_GE(p.value, -1e-8);
}

TEST_F(GaugeTest, TestTensorsOfTheSpanAreExact) {
  const auto& prob = inst_.problem;
  auto id = identity_deformation(prob.grid);
  auto pid = riedl_gauge(prob, id.tensor);
  const double gid = evaluate_G(prob.grid, prob.F, prob.H, id);
  EXPECT_NEAR(pid.value, gid, 1e-8 * std::max(1.0, std::abs(gid)));

  for (std::size_t k : {0u, 7u, 20u}) {
    auto u = materialize(prob.grid, prob.basis[k]);
    const double gu = evaluate_G(prob.grid, prob.F, prob.H, u);
    auto pu = riedl_gauge(prob, u.tensor);
    EXPECT_GE(pu.value, gu - 1e-8 * std::max(1.0, std::abs(gu)));
    EXPECT_NEAR(pu.value, gu, 1e-6 * std::max(1.0, std::abs(gid)));
  }
}

TEST_F(GaugeTest, SublinearHomogeneousAndDominating) {
  std::mt19937_64 rng(52);
  const auto& prob = inst_.problem;
  auto r = recover_stress(prob);
  ASSERT_TRUE(r.converged);
  const double sc = std::max(1.0, std::abs(r.trace_budget));
  for (int trial = 0; trial < 3; ++trial) {
    auto v1 = random_field(rng, prob.grid);
    auto v2 = random_field(rng, prob.grid);
    const double p1 = riedl_gauge(prob, v1).value;
    const double p2 = riedl_gauge(prob, v2).value;
    const double p12 = riedl_gauge(prob, add(v1, v2)).value;
    EXPECT_LE(p12, p1 + p2 + 1e-8 * sc);
    const double lambda = 0.3 + 2.0 * trial;
    const double pl = riedl_gauge(prob, scale(v1, lambda)).value;
    EXPECT_NEAR(pl, lambda * p1, 1e-8 * std::abs(lambda * p1));
    EXPECT_LE(r.M.pair(v1), p1 + 1e-6 * sc);
    EXPECT_LE(inst_.m_star.pair(v1), p1 + 1e-6 * sc);
  }
}

TEST_F(GaugeTest, FastBoundDominatesExact) {
  std::mt19937_64 rng(53);
  auto v = random_field(rng, inst_.problem.grid);
  GaugeOptions fast;
  fast.fast = true;
  const double pf = riedl_gauge(inst_.problem, v, fast).value;
  const double pe = riedl_gauge(inst_.problem, v).value;
  EXPECT_GE(pf, pe - 1e-9 * std::max(1.0, std::abs(pe)));
}

TEST_F(GaugeTest, UnboundedWhenPositivityFails) {
  auto flipped = inst_.problem;
  flipped.F = inst_.problem.F.scaled(-1.0);
  auto zero = std::vector<SymMatrix>(flipped.grid.cell_count(), SymMatrix::Zero(2, 2));
  try {
    riedl_gauge(flipped, zero);
    FAIL() << "expected inconsistency";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Inconsistent);
  }
}

TEST_F(GaugeTest, BasisMustContainIdentity) {
  const auto& prob = inst_.problem;
  auto zero = std::vector<SymMatrix>(prob.grid.cell_count(), SymMatrix::Zero(2, 2));
  std::vector<TestDeformation> hats;
  for (const auto& h : prob.basis) hats.push_back(materialize(prob.grid, h));
  try {
    riedl_gauge(prob, zero, hats);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  try {
    riedl_gauge(prob, zero, std::span<const TestDeformation>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBasis);
  }
}

TEST(Gauge, OneDimensionalDominance) {
  std::mt19937_64 rng(54);
  auto inst = polarcone::testing::sticky_1d(rng, 6, 16, 0.8);
  auto r = recover_stress(inst.problem);
  ASSERT_TRUE(r.converged);
  const double sc = std::max(1.0, std::abs(r.trace_budget));
  for (int k = 0; k < 5; ++k) {
    auto v = random_field(rng, inst.problem.grid);
    const double p = riedl_gauge(inst.problem, v).value;
    EXPECT_LE(r.M.pair(v), p + 1e-6 * sc);
    EXPECT_NEAR(riedl_gauge(inst.problem, scale(v, 3.0)).value, 3.0 * p, 1e-8 * std::abs(3.0 * p));
  }
}
