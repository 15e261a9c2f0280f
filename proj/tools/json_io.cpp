#include "json_io.hpp"

#include <fstream>
#include <sstream>

namespace cdil::io {

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const DiskPoint& p) { return p.is_infinite() ? json("inf") : to_json(p.value()); }

json to_json(const BlaschkeProduct& b) {
  json zs = json::array();
  for (const auto& z : b.zeros()) zs.push_back({{"z", to_json(z.point)}, {"mult", z.multiplicity}});
  return {{"zeros", zs}, {"constant", to_json(b.constant())}};
}

json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"point", to_json(a.point)}, {"mass", a.mass}});
  return {{"atoms", atoms}};
}

json to_json(const AlgebraElement& e) {
  json g = json::array(), a = json::array();
  for (const cplx v : e.g) g.push_back(to_json(v));
  for (const auto& c : e.a) a.push_back(json::array({c.r, c.s, to_json(c.value)}));
  return {{"algebra", to_string(e.tag)}, {"B", to_json(e.base)}, {"c", to_json(e.c)}, {"g", g}, {"a", a}};
}

json to_json(const TestFunction& f) {
  json params = json::array();
  for (const auto& p : f.params) params.push_back(to_json(p));
  return {{"family", to_string(f.family)}, {"variant", to_string(f.variant)}, {"params", params},
          {"psi", to_json(f.psi)}};
}

json to_json(const BivariatePoly& p) {
  json rows = json::array();
  for (const auto& r : p.coeffs) {
    json row = json::array();
    for (const cplx v : r) row.push_back(to_json(v));
    rows.push_back(std::move(row));
  }
  return {{"coeffs", rows}, {"scale", p.scale()}};
}

json to_json(const Tolerances& t) {
  return {{"psd_tol", t.psd_tol}, {"residual_tol", t.residual_tol}, {"root_tol", t.root_tol}, {"max_iter", t.max_iter}};
}

json to_json(const GridResolution& g) { return {{"radial", g.radial}, {"angular", g.angular}, {"r_max", g.r_max}}; }

json to_json(const Certificate& c) {
  json j = {{"status", to_string(c.status)}, {"iterations", c.iterations}, {"seed", c.seed}, {"note", c.note}};
  if (c.status == CertStatus::Feasible) {
    j["residual"] = c.residual;
    json w = json::array();
    for (const auto& q : c.weights) w.push_back(to_json(q));
    j["weights"] = std::move(w);
  } else {
    j["residual"] = c.residual;
    j["margin"] = c.margin;
    j["shift"] = c.shift;
    if (c.w.rows() > 0) j["W"] = to_json(c.w);
    j["generator_lmax"] = c.generator_lmax;
  }
  return j;
}

json to_json(const VerificationReport& r) {
  return {{"ok", r.ok},
          {"residual", r.residual},
          {"min_weight_eig", r.min_weight_eig},
          {"margin", r.margin},
          {"worst_lmax", r.worst_lmax},
          {"worst_lmax_fine", r.worst_lmax_fine},
          {"fine_count", r.fine_count},
          {"failures", r.failures}};
}

json to_json(const AnnihilatorBasis& basis) {
  json out = json::array();
  for (const auto& f : basis.functionals) {
    json terms = json::array();
    for (const auto& t : f.terms)
      terms.push_back({{"alpha", to_json(t.kernel.alpha)}, {"order", t.kernel.order}, {"coeff", to_json(t.coeff)}});
    out.push_back({{"terms", terms}});
  }
  return out;
}

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError("expected a number or [re, im], got " + j.dump());
}

ComplexMatrix matrix_from(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ValidationError("expected a nested matrix array");
  ComplexMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != m.cols()) throw ValidationError("ragged matrix");
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = complex_from(j[i][k]);
  }
  return m;
}

DiskPoint disk_point_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return DiskPoint::infinity();
    throw ValidationError("expected \"inf\" or a complex number");
  }
  return DiskPoint(complex_from(j));
}

BlaschkeProduct blaschke_from(const json& j) {
  if (!j.is_object() || !j.contains("zeros")) throw ValidationError("Blaschke JSON needs a \"zeros\" array");
  std::vector<BlaschkeZero> zs;
  for (const auto& z : j.at("zeros")) {
    if (!z.contains("z")) throw ValidationError("zero entry needs \"z\"");
    zs.push_back({complex_from(z.at("z")), z.value("mult", 1)});
  }
  const cplx c = j.contains("constant") ? complex_from(j.at("constant")) : cplx(1.0);
  return BlaschkeProduct(std::move(zs), c);
}

AtomicMeasure measure_from(const json& j) {
  if (!j.is_object() || !j.contains("atoms")) throw ValidationError("measure JSON needs an \"atoms\" array");
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.contains("point") || !a.contains("mass")) throw ValidationError("atom needs \"point\" and \"mass\"");
    atoms.push_back({complex_from(a.at("point")), a.at("mass").get<double>()});
  }
  return AtomicMeasure(std::move(atoms));
}

PickProblem pick_problem_from(const json& j) {
  PickProblem p;
  p.tag = algebra_from_string(j.value("algebra", std::string("AB")));
  if (!j.contains("B") || !j.contains("nodes") || !j.contains("targets"))
    throw ValidationError("Pick problem needs \"B\", \"nodes\" and \"targets\"");
  p.base = blaschke_from(j.at("B"));
  for (const auto& z : j.at("nodes")) p.nodes.push_back(complex_from(z));
  for (const auto& z : j.at("targets")) p.targets.push_back(complex_from(z));
  p.validate();
  return p;
}

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line, col = 1;
    else ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

json load(const std::string& arg) {
  std::string text, where = "inline JSON";
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw ValidationError("cannot open " + arg);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    where = arg;
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": malformed JSON at " + line_col(text, e.byte));
  }
}

cplx parse_complex(const std::string& s) {
  try {
    const auto comma = s.find(',');
    std::size_t used = 0;
    if (comma == std::string::npos) {
      const double re = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {re, 0.0};
    }
    const double re = std::stod(s.substr(0, comma), &used);
    const std::string rest = s.substr(comma + 1);
    std::size_t used2 = 0;
    const double im = std::stod(rest, &used2);
    if (used != comma || used2 != rest.size()) throw std::invalid_argument(s);
    return {re, im};
  } catch (const std::logic_error&) {
    throw ValidationError("cannot parse complex number '" + s + "' (use re or re,im)");
  }
}

DiskPoint parse_disk_point(const std::string& s) {
  return s == "inf" ? DiskPoint::infinity() : DiskPoint(parse_complex(s));
}

GridResolution parse_grid(const std::string& s) {
  GridResolution g;
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t u1 = 0, u2 = 0;
    g.radial = std::stoi(s.substr(0, x), &u1);
    g.angular = std::stoi(s.substr(x + 1), &u2);
    if (u1 != x || u2 != s.size() - x - 1) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw ValidationError("cannot parse grid '" + s + "' (use RxA, e.g. 8x16)");
  }
  g.validate();
  return g;
}

}  // namespace cdil::io
