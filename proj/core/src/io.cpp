#include "polarcone/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>

#include "polarcone/error.hpp"

namespace polarcone::io {

namespace {

template <class Fn>
auto parse_guard(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed ") + what + ": " + e.what());
  }
}

Point point_from_json(const json& j, int dim) {
  Point p(dim);
  if (j.is_number()) {
    if (dim != 1) throw Error(ErrorCode::Parse, "scalar given where a vector was expected");
    p[0] = j.get<double>();
    return p;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw Error(ErrorCode::Parse, "vector entry has the wrong dimension");
  }
  for (int a = 0; a < dim; ++a) p[a] = j[a].get<double>();
  return p;
}

json point_to_json(const Point& p) {
  json j = json::array();
  for (Eigen::Index a = 0; a < p.size(); ++a) j.push_back(p[a]);
  return j;
}

json packed_to_json(const SymMatrix& m) {
  std::array<double, 6> buf{};
  const int p = sym_size(static_cast<int>(m.rows()));
  pack_upper(m, std::span<double>(buf.data(), p));
  return json(std::vector<double>(buf.begin(), buf.begin() + p));
}

SymMatrix packed_from_json(const json& j, int dim) {
  const auto v = j.is_number() ? std::vector<double>{j.get<double>()} : j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != sym_size(dim)) {
    throw Error(ErrorCode::Parse, "matrix entry has the wrong number of packed values");
  }
  return unpack_upper(v, dim);
}

std::vector<Point> points_from_json(const json& j, int dim) {
  std::vector<Point> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(point_from_json(e, dim));
  return out;
}

std::vector<Point> nodal_field(const json& j, const Grid& grid) {
  if (j.is_string() && j.get<std::string>() == "identity") {
    std::vector<Point> out(grid.node_count());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = grid.node_position(n);
    return out;
  }
  return points_from_json(j, grid.dim());
}

}  // namespace

json to_json(const DiscreteMeasure& m) {
  return {{"atoms", m.atoms()}, {"weights", m.weights()}};
}

DiscreteMeasure measure_from_json(const json& j) {
  return parse_guard("measure", [&] {
    return DiscreteMeasure(j.at("atoms").get<std::vector<double>>(),
                           j.at("weights").get<std::vector<double>>(),
                           j.value("normalized", false));
  });
}

json to_json(const StickyState& s) {
  return {{"atoms", s.measure().atoms()},
          {"weights", s.measure().weights()},
          {"X0", s.x0().values()},
          {"V0", s.v0()}};
}

StickyState sticky_state_from_json(const json& j) {
  return parse_guard("sticky state", [&] {
    auto weights = j.at("weights").get<std::vector<double>>();
    auto x0 = j.at("X0").get<std::vector<double>>();
    std::vector<double> atoms = j.contains("atoms") ? j.at("atoms").get<std::vector<double>>() : x0;
    return StickyState(MonotoneMap1D(std::move(x0)), j.at("V0").get<std::vector<double>>(),
                       DiscreteMeasure(std::move(atoms), std::move(weights)));
  });
}

json to_json(const PolarCertificate1D& c) {
  return {{"inner_product", c.inner_product}, {"primitive", c.primitive},
          {"feasible", c.feasible},           {"scale", c.scale},
          {"tol_eq", c.tol_eq},               {"tol_pos", c.tol_pos}};
}

json to_json(const Grid& g) {
  std::vector<double> lo, hi;
  std::vector<std::size_t> n;
  for (int a = 0; a < g.dim(); ++a) {
    lo.push_back(g.lo(a));
    hi.push_back(g.hi(a));
    n.push_back(g.cells(a));
  }
  return {{"dim", g.dim()}, {"lo", lo}, {"hi", hi}, {"n", n}};
}

Grid grid_from_json(const json& j) {
  return parse_guard("grid", [&] {
    return Grid(j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>(),
                j.at("n").get<std::vector<std::size_t>>());
  });
}

json to_json(const VectorMeasure& f) {
  json atoms = json::array(), vectors = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    atoms.push_back(point_to_json(f.atoms()[i]));
    vectors.push_back(point_to_json(f.vectors()[i]));
  }
  return {{"atoms", atoms}, {"vectors", vectors}};
}

VectorMeasure vector_measure_from_json(const json& j, int dim) {
  return parse_guard("vector measure", [&] {
    return VectorMeasure(dim, points_from_json(j.at("atoms"), dim),
                         points_from_json(j.at("vectors"), dim));
  });
}

json to_json(const MatrixMeasureField& m) {
  json cells = json::array();
  for (const auto& c : m.cells()) cells.push_back(packed_to_json(c));
  return {{"dim", m.dim()}, {"cells", cells}};
}

MatrixMeasureField matrix_field_from_json(const json& j, int dim) {
  return parse_guard("matrix field", [&] {
    std::vector<SymMatrix> cells;
    for (const auto& c : j.at("cells")) cells.push_back(packed_from_json(c, dim));
    return MatrixMeasureField(dim, std::move(cells));
  });
}

json to_json(const RepresentationProblem& p, std::optional<double> gamma) {
  json j = {{"grid", to_json(p.grid)},
            {"F", to_json(p.F)},
            {"H", to_json(p.H)},
            {"include_identity_row", p.include_identity_row}};
  if (gamma) j["gamma"] = *gamma;
  return j;
}

RepresentationProblem problem_from_json(const json& j) {
  return parse_guard("problem", [&] {
    Grid grid = grid_from_json(j.at("grid"));
    const int d = grid.dim();
    VectorMeasure f = j.contains("F") ? vector_measure_from_json(j.at("F"), d) : VectorMeasure::zero(d);
    MatrixMeasureField h = j.contains("H") ? matrix_field_from_json(j.at("H"), d)
                                           : MatrixMeasureField::zero(grid);
    if (h.size() != grid.cell_count()) {
      throw Error(ErrorCode::GridMismatch, "H has the wrong number of cells");
    }
    return RepresentationProblem::make(std::move(grid), std::move(f), std::move(h),
                                       j.value("include_identity_row", true));
  });
}

json to_json(const RecoveryResult& r) {
  return {{"status", std::string(to_string(r.status))},
          {"converged", r.converged},
          {"residual_inf", r.residual_inf},
          {"min_eigenvalue", r.min_eigenvalue},
          {"total_trace", r.total_trace},
          {"trace_budget", r.trace_budget},
          {"iterations", r.iterations},
          {"tol_rep", r.tol_rep},
          {"polished", r.polished},
          {"M", to_json(r.M)}};
}

RecoveryResult recovery_result_from_json(const json& j) {
  return parse_guard("result", [&] {
    RecoveryResult r;
    const auto& m = j.at("M");
    r.M = matrix_field_from_json(m, m.at("dim").get<int>());
    r.residual_inf = j.at("residual_inf").get<double>();
    r.min_eigenvalue = j.at("min_eigenvalue").get<double>();
    r.total_trace = j.at("total_trace").get<double>();
    r.trace_budget = j.at("trace_budget").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.tol_rep = j.value("tol_rep", 0.0);
    r.polished = j.value("polished", false);
    const auto status = j.at("status").get<std::string>();
    r.status = status == "converged"    ? RecoveryStatus::Converged
               : status == "infeasible" ? RecoveryStatus::Infeasible
                                        : RecoveryStatus::MaxIter;
    return r;
  });
}

json to_json(const VerificationReport& r) {
  return {{"passed", r.passed()},
          {"residual_inf", r.residual_inf},
          {"assembly_residual", r.assembly_residual},
          {"min_eigenvalue", r.min_eigenvalue},
          {"total_trace", r.total_trace},
          {"trace_budget", r.trace_budget},
          {"representation_ok", r.representation_ok},
          {"psd_ok", r.psd_ok},
          {"trace_ok", r.trace_ok},
          {"identity_ok", r.identity_ok}};
}

FlowData flow_from_json(const json& j) {
  return parse_guard("flow data", [&] {
    FlowData data;
    data.grid = grid_from_json(j.at("grid"));
    const int d = data.grid.dim();
    data.f_nodes = nodal_field(j.at("f_nodes"), data.grid);
    data.h_nodes = nodal_field(j.at("h_nodes"), data.grid);
    const auto& e = j.at("e_weights");
    data.e_weights = e.is_number() ? std::vector<double>(data.grid.cell_count(), e.get<double>())
                                   : e.get<std::vector<double>>();
    data.gamma = j.at("gamma").get<double>();
    data.rho.atoms = points_from_json(j.at("rho").at("atoms"), d);
    data.rho.weights = j.at("rho").at("weights").get<std::vector<double>>();
    data.det_floor = j.value("det_floor", 1e-10);
    return data;
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "invalid JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Parse, "failed writing " + path);
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_trajectory_header(std::ostream& os) { os << "t,index,X,V,block_id\n"; }

void write_trajectory_rows(std::ostream& os, double t, const StickySnapshot& snap) {
  const std::string ts = format_double(t);
  for (std::size_t i = 0; i < snap.positions.size(); ++i) {
    os << ts << ',' << i << ',' << format_double(snap.positions[i]) << ','
       << format_double(snap.velocities[i]) << ',' << snap.block_id[i] << '\n';
  }
}

void write_stress_csv(std::ostream& os, const Grid& grid, const MatrixMeasureField& m) {
  const int d = grid.dim();
  static constexpr const char* kAxes[] = {"cell_i", "cell_j", "cell_k"};
  if (d == 1) {
    os << "cell,m\n";
  } else {
    for (int a = 0; a < d; ++a) os << kAxes[a] << ',';
    bool first = true;
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        os << (first ? "" : ",") << 'm' << i + 1 << j + 1;
        first = false;
      }
    }
    os << '\n';
  }
  std::array<double, 6> buf{};
  const int p = sym_size(d);
  for (std::size_t c = 0; c < m.size(); ++c) {
    const auto idx = grid.cell_index(c);
    for (int a = 0; a < d; ++a) os << idx[a] << ',';
    pack_upper(m[c], std::span<double>(buf.data(), p));
    for (int k = 0; k < p; ++k) os << (k ? "," : "") << format_double(buf[k]);
    os << '\n';
  }
}

}  // namespace polarcone::io
