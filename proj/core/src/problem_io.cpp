#include "qvi/problem_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace qvi {

using nlohmann::json;

namespace {

json to_json(const SparseMat& m) {
  return json{{"rows", m.rows},
              {"cols", m.cols},
              {"row_ptr", m.row_ptr},
              {"col_idx", m.col_idx},
              {"vals", m.vals}};
}

SparseMat mat_from_json(const json& j) {
  SparseMat m;
  m.rows = j.at("rows").get<int>();
  m.cols = j.at("cols").get<int>();
  m.row_ptr = j.at("row_ptr").get<std::vector<int>>();
  m.col_idx = j.at("col_idx").get<std::vector<int>>();
  m.vals = j.at("vals").get<std::vector<double>>();
  m.check_layout();
  return m;
}

json to_json(const NodalTerm& t) {
  return json{{"dof", t.dof},         {"weight", t.weight}, {"sign", t.sign},
              {"offset", t.offset},   {"slope", t.slope},   {"one_sided", t.one_sided}};
}

NodalTerm term_from_json(const json& j) {
  NodalTerm t;
  t.dof = j.at("dof").get<int>();
  t.weight = j.at("weight").get<double>();
  t.sign = j.at("sign").get<double>();
  t.offset = j.at("offset").get<double>();
  t.slope = j.at("slope").get<double>();
  t.one_sided = j.at("one_sided").get<bool>();
  return t;
}

json sparse_pairs(const std::vector<std::pair<int, double>>& entries) {
  json out = json::array();
  for (const auto& [dof, v] : entries) out.push_back(json::array({dof, v}));
  return out;
}

json to_json(const ConstraintSet& k) {
  return json{{"dim", k.dim},
              {"lower", sparse_pairs(k.lower_list())},
              {"upper", sparse_pairs(k.upper_list())},
              {"pins", sparse_pairs(k.pin_list())}};
}

ConstraintSet constraints_from_json(const json& j) {
  ConstraintSet k = ConstraintSet::all_free(j.at("dim").get<int>());
  for (const auto& e : j.at("lower")) k.set_lower(e.at(0).get<int>(), e.at(1).get<double>());
  for (const auto& e : j.at("upper")) k.set_upper(e.at(0).get<int>(), e.at(1).get<double>());
  for (const auto& e : j.at("pins")) k.set_pin(e.at(0).get<int>(), e.at(1).get<double>());
  return k;
}

json dump_or_throw_open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(1) << "\n";
}

void expect_format(const json& j, const std::string& path, const char* format) {
  if (!j.is_object() || j.value("format", std::string{}) != format)
    throw ConfigError(path + ": expected format \"" + format + "\"");
  if (j.value("version", 0) != 1) throw ConfigError(path + ": unsupported version");
}

}  // namespace

void save_mesh(const std::string& path, const Mesh2D& mesh) {
  json j{{"format", "qvi-mesh"}, {"version", 1}};
  json nodes = json::array();
  for (const auto& n : mesh.nodes) nodes.push_back(json::array({n[0], n[1]}));
  json tris = json::array();
  for (const auto& t : mesh.tris) tris.push_back(json::array({t[0], t[1], t[2]}));
  json bnd = json::array();
  for (const auto& e : mesh.boundary) bnd.push_back(json::array({e.a, e.b, e.label}));
  j["nodes"] = std::move(nodes);
  j["tris"] = std::move(tris);
  j["boundary"] = std::move(bnd);
  write_file(path, j);
}

Mesh2D load_mesh(const std::string& path) {
  const json j = dump_or_throw_open(path);
  Mesh2D m;
  try {
    expect_format(j, path, "qvi-mesh");
    for (const auto& n : j.at("nodes"))
      m.nodes.push_back({n.at(0).get<double>(), n.at(1).get<double>()});
    for (const auto& t : j.at("tris"))
      m.tris.push_back({t.at(0).get<std::size_t>(), t.at(1).get<std::size_t>(),
                        t.at(2).get<std::size_t>()});
    for (const auto& e : j.at("boundary"))
      m.boundary.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                            e.at(2).get<int>()});
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  m.validate();
  return m;
}

void save_problem(const std::string& path, const GalerkinProblem& p, const PenaltySpec* pen) {
  json j{{"format", "qvi-problem"}, {"version", 1}};
  j["gram_x"] = to_json(p.inner_x.gram);
  j["gram_y"] = to_json(p.inner_y.gram);
  json a{{"linear", to_json(p.a.linear)}, {"m", p.a.m}, {"M", p.a.M}};
  json terms = json::array();
  for (const auto& t : p.a.boundary) terms.push_back(to_json(t));
  a["boundary"] = std::move(terms);
  j["a"] = std::move(a);
  j["k"] = to_json(p.k);
  json jf{{"kind", p.j.kind == FrictionKind::Zero ? "zero" : "tresca-coulomb"},
          {"mu", p.j.mu},
          {"p_slope", p.j.p_slope},
          {"eps", p.j.eps},
          {"alpha", p.j.alpha},
          {"beta", p.j.beta},
          {"gamma", p.j.gamma}};
  json nodes = json::array();
  for (const auto& n : p.j.nodes)
    nodes.push_back(json{{"normal_dof", n.normal_dof},
                         {"tangent_dof", n.tangent_dof},
                         {"normal_sign", n.normal_sign},
                         {"weight", n.weight}});
  jf["nodes"] = std::move(nodes);
  j["j"] = std::move(jf);
  j["pi"] = to_json(p.pi.pi);
  j["c0"] = p.pi.c0;
  j["f"] = p.f;
  j["extra_load"] = p.extra_load;
  j["smallness_ok"] = p.smallness_ok;
  if (pen) {
    json pj{{"k_tilde", to_json(pen->k_tilde)}, {"lipschitz", pen->g.lipschitz}};
    json pterms = json::array();
    for (const auto& t : pen->g.terms) pterms.push_back(to_json(t));
    pj["terms"] = std::move(pterms);
    j["penalty"] = std::move(pj);
  }
  write_file(path, j);
}

GalerkinProblem load_problem(const std::string& path, PenaltySpec* pen) {
  const json j = dump_or_throw_open(path);
  try {
    expect_format(j, path, "qvi-problem");
    GramInner inner_x(mat_from_json(j.at("gram_x")));
    GramInner inner_y(mat_from_json(j.at("gram_y")));
    OperatorSpec a;
    a.linear = mat_from_json(j.at("a").at("linear"));
    a.m = j.at("a").at("m").get<double>();
    a.M = j.at("a").at("M").get<double>();
    for (const auto& t : j.at("a").at("boundary")) a.boundary.push_back(term_from_json(t));
    ConstraintSet k = constraints_from_json(j.at("k"));
    FrictionFunctional fj;
    const std::string kind = j.at("j").at("kind").get<std::string>();
    if (kind == "zero") {
      fj.kind = FrictionKind::Zero;
    } else if (kind == "tresca-coulomb") {
      fj.kind = FrictionKind::TrescaCoulomb;
    } else {
      throw ConfigError(path + ": unknown friction kind \"" + kind + "\"");
    }
    fj.mu = j.at("j").at("mu").get<double>();
    fj.p_slope = j.at("j").at("p_slope").get<double>();
    fj.eps = j.at("j").at("eps").get<double>();
    fj.alpha = j.at("j").at("alpha").get<double>();
    fj.beta = j.at("j").at("beta").get<double>();
    fj.gamma = j.at("j").at("gamma").get<double>();
    for (const auto& n : j.at("j").at("nodes")) {
      FrictionNode fn;
      fn.normal_dof = n.at("normal_dof").get<int>();
      fn.tangent_dof = n.at("tangent_dof").get<int>();
      fn.normal_sign = n.at("normal_sign").get<double>();
      fn.weight = n.at("weight").get<double>();
      fj.nodes.push_back(fn);
    }
    TraceMap pi{mat_from_json(j.at("pi")), j.at("c0").get<double>()};
    Vec f = j.at("f").get<Vec>();
    Vec extra = j.at("extra_load").get<Vec>();
    if (pen) {
      *pen = PenaltySpec{};
      if (j.contains("penalty")) {
        pen->k_tilde = constraints_from_json(j.at("penalty").at("k_tilde"));
        pen->g.lipschitz = j.at("penalty").at("lipschitz").get<double>();
        for (const auto& t : j.at("penalty").at("terms"))
          pen->g.terms.push_back(term_from_json(t));
      }
    }
    const bool smallness = j.value("smallness_ok", true);
    return smallness ? GalerkinProblem::make(std::move(inner_x), std::move(inner_y),
                                             std::move(a), std::move(k), std::move(fj),
                                             std::move(pi), std::move(f), std::move(extra))
                     : GalerkinProblem::make_unchecked(std::move(inner_x), std::move(inner_y),
                                                       std::move(a), std::move(k), std::move(fj),
                                                       std::move(pi), std::move(f),
                                                       std::move(extra));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace qvi
