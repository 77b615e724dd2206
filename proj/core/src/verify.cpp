#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "polarcone/stress.hpp"

namespace polarcone {

std::vector<TestDeformation> fresh_test_family(const Grid& grid, std::size_t count,
                                               std::uint64_t seed) {
  const int d = grid.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto interior = interior_hat_basis(grid);

  std::vector<TestDeformation> family;
  family.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<Point> nodal(grid.node_count(), Point::Zero(d));
    if (k % 2 == 0) {
      // smooth bump times a random direction field
      Point center(d), radius(d);
      for (int a = 0; a < d; ++a) {
        const double len = grid.hi(a) - grid.lo(a);
        center[a] = grid.lo(a) + unit(rng) * len;
        radius[a] = (0.15 + 0.35 * unit(rng)) * len;
      }
      SymMatrix mix(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) mix(i, j) = normal(rng);
      }
      Point shift(d);
      for (int a = 0; a < d; ++a) shift[a] = normal(rng);
      for (std::size_t n = 0; n < nodal.size(); ++n) {
        if (grid.is_boundary_node(n)) continue;
        const Point x = grid.node_position(n);
        double bump = 1.0;
        for (int a = 0; a < d; ++a) {
          const double r = std::abs(x[a] - center[a]) / radius[a];
          bump *= r < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * r), 2) : 0.0;
        }
        nodal[n] = bump * (mix * (x - center) + shift);
      }
    } else {
      // sparse random combination of hats
      const std::size_t terms = 1 + rng() % 6;
      for (std::size_t t = 0; t < terms && !interior.empty(); ++t) {
        const auto& hat = interior[rng() % interior.size()];
        nodal[hat.node][hat.component] += normal(rng);
      }
    }
    family.push_back(make_deformation(grid, std::move(nodal)));
  }
  return family;
}

VerificationReport verify_representation(const MatrixMeasureField& m,
                                         const RepresentationProblem& problem,
                                         const VerifyOptions& opts) {
  VerificationReport report;
  const auto cons = assemble_constraints(problem);
  const double b_scale = 1.0 + (cons.b.size() ? cons.b.cwiseAbs().maxCoeff() : 0.0);
  const double tol_rep = opts.tol_rep * b_scale;

  const Eigen::VectorXd res = cons.A * pack_field(m) - cons.b;
  report.assembly_residual = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;

  // Residual per unit of nodal l1 mass; a hat has unit mass, so this is
  // directly comparable with the assembly residual.
  const auto family = fresh_test_family(problem.grid, opts.fresh_count, opts.seed);
  for (const auto& u : family) {
    double mass = 0.0;
    for (const auto& p : u.nodal) mass += p.cwiseAbs().sum();
    if (mass == 0.0) continue;
    const double g = evaluate_G(problem.grid, problem.F, problem.H, u);
    const double rep = m.pair(u.tensor);
    report.residual_inf = std::max(report.residual_inf, std::abs(g - rep) / mass);
  }
  report.representation_ok = report.residual_inf <= tol_rep && report.assembly_residual <= tol_rep;

  report.min_eigenvalue = m.min_eigenvalue();
  report.psd_ok = report.min_eigenvalue >= -opts.tol_psd * std::max(1.0, m.max_norm());

  report.total_trace = m.total_trace();
  report.trace_budget = problem.trace_budget();
  const double tol_trace = opts.tol_trace * std::max(1.0, std::abs(report.trace_budget));
  report.trace_ok = report.total_trace <= report.trace_budget + tol_trace;
  if (problem.include_identity_row) {
    report.identity_ok = std::abs(report.total_trace - report.trace_budget) <= tol_trace;
  }
  return report;
}

}  // namespace polarcone
