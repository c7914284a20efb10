#include "qvi/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace qvi {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

KvFile KvFile::parse(const std::string& text, const std::string& origin) {
  KvFile out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  Section* current = nullptr;
  std::set<std::string> seen_sections;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(origin, lineno, "empty section name");
      if (!seen_sections.insert(name).second)
        fail(origin, lineno, "duplicate section [" + name + "]");
      out.sections.push_back({name, {}});
      current = &out.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    if (!current) fail(origin, lineno, "key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (!current->entries.emplace(key, value).second)
      fail(origin, lineno, "duplicate key \"" + key + "\" in [" + current->name + "]");
  }
  return out;
}

const KvFile::Section* KvFile::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::HeatSweep: return "heat-sweep";
    case ExperimentKind::ContactSweep: return "contact-sweep";
    case ExperimentKind::ContactSolve: return "contact-solve";
    case ExperimentKind::ControlPair: return "control-pair";
    case ExperimentKind::ControlUniqueness: return "control-uniqueness";
    case ExperimentKind::Validate: return "validate";
  }
  return "?";
}

namespace {

// Typed access to one section with unknown-key detection.
class Reader {
 public:
  Reader(const KvFile& file, const std::string& origin, const std::string& section)
      : origin_(origin), section_(section) {
    const KvFile::Section* s = file.find(section);
    if (s) entries_ = s->entries;
  }

  ~Reader() = default;

  std::string str(const std::string& key, const std::string& dflt) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return dflt;
    used_.insert(key);
    return it->second;
  }

  double num(const std::string& key, double dflt) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return dflt;
    used_.insert(key);
    return parse_double(key, it->second);
  }

  int integer(const std::string& key, int dflt) {
    const double v = num(key, static_cast<double>(dflt));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw ConfigError(origin_ + ": [" + section_ + "] " + key + " must be an integer");
    return i;
  }

  std::uint64_t uinteger(const std::string& key, std::uint64_t dflt) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return dflt;
    used_.insert(key);
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section_ + "] " + key + " must be a non-negative integer");
    }
  }

  bool flag(const std::string& key, bool dflt) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return dflt;
    used_.insert(key);
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(origin_ + ": [" + section_ + "] " + key + " must be a boolean");
  }

  void finish() const {
    for (const auto& [key, value] : entries_) {
      (void)value;
      if (used_.find(key) == used_.end())
        throw ConfigError(origin_ + ": unknown key \"" + key + "\" in [" + section_ + "]");
    }
  }

 private:
  double parse_double(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section_ + "] " + key + " must be a number");
    }
  }

  std::string origin_;
  std::string section_;
  std::map<std::string, std::string> entries_;
  std::set<std::string> used_;
};

ExperimentKind parse_kind(const std::string& origin, const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::HeatSweep, ExperimentKind::ContactSweep, ExperimentKind::ContactSolve,
        ExperimentKind::ControlPair, ExperimentKind::ControlUniqueness, ExperimentKind::Validate})
    if (s == kind_name(k)) return k;
  throw ConfigError(origin + ": unknown experiment kind \"" + s + "\"");
}

InnerMethod parse_method(const std::string& origin, const std::string& s) {
  if (s == "auto") return InnerMethod::Auto;
  if (s == "fixed-point") return InnerMethod::FixedPoint;
  if (s == "psor") return InnerMethod::Psor;
  throw ConfigError(origin + ": unknown solver method \"" + s + "\"");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_string(const std::string& text,
                                               const std::string& origin) {
  const KvFile file = KvFile::parse(text, origin);
  static const std::set<std::string> known_sections = {
      "experiment", "mesh", "heat", "contact", "penalty", "solver", "control", "run"};
  for (const auto& s : file.sections)
    if (known_sections.find(s.name) == known_sections.end())
      throw ConfigError(origin + ": unknown section [" + s.name + "]");

  ExperimentConfig cfg;

  Reader exp(file, origin, "experiment");
  cfg.kind = parse_kind(origin, exp.str("kind", "heat-sweep"));
  cfg.name = exp.str("name", kind_name(cfg.kind));
  const bool contact_kind =
      cfg.kind == ExperimentKind::ContactSweep || cfg.kind == ExperimentKind::ContactSolve;
  cfg.model = exp.str("model", contact_kind ? "contact" : "heat");
  exp.finish();

  Reader mesh(file, origin, "mesh");
  cfg.mesh.nx = mesh.integer("nx", cfg.mesh.nx);
  cfg.mesh.ny = mesh.integer("ny", cfg.mesh.ny);
  cfg.mesh.width = mesh.num("width", cfg.mesh.width);
  cfg.mesh.height = mesh.num("height", cfg.mesh.height);
  mesh.finish();

  Reader heat(file, origin, "heat");
  cfg.heat.source_const = heat.num("source_const", cfg.heat.source_const);
  cfg.heat.source_x = heat.num("source_x", cfg.heat.source_x);
  cfg.heat.source_y = heat.num("source_y", cfg.heat.source_y);
  cfg.heat.b_const = heat.num("b_const", cfg.heat.b_const);
  cfg.heat.q_const = heat.num("q_const", cfg.heat.q_const);
  heat.finish();

  Reader con(file, origin, "contact");
  cfg.contact.youngs = con.num("youngs", cfg.contact.youngs);
  cfg.contact.poisson = con.num("poisson", cfg.contact.poisson);
  cfg.contact.cp = con.num("cp", cfg.contact.cp);
  cfg.contact.cq = con.num("cq", cfg.contact.cq);
  cfg.contact.mu = con.num("mu", cfg.contact.mu);
  cfg.contact.smallness_fraction = con.num("smallness_fraction", cfg.contact.smallness_fraction);
  cfg.contact.k = con.num("k", cfg.contact.k);
  cfg.contact.k_tilde = con.num("k_tilde", cfg.contact.k_tilde);
  cfg.contact.traction[0] = con.num("traction_x", cfg.contact.traction[0]);
  cfg.contact.traction[1] = con.num("traction_y", cfg.contact.traction[1]);
  cfg.contact.body_force[0] = con.num("body_x", cfg.contact.body_force[0]);
  cfg.contact.body_force[1] = con.num("body_y", cfg.contact.body_force[1]);
  cfg.contact.theta = con.num("theta", cfg.contact.theta);
  cfg.contact.a0 = con.num("a0", cfg.contact.a0);
  cfg.contact.a2 = con.num("a2", cfg.contact.a2);
  cfg.contact.a3 = con.num("a3", cfg.contact.a3);
  con.finish();

  Reader pen(file, origin, "penalty");
  cfg.schedule.lambda0 = pen.num("lambda0", cfg.schedule.lambda0);
  cfg.schedule.ratio = pen.num("ratio", cfg.schedule.ratio);
  cfg.schedule.count = pen.integer("count", cfg.schedule.count);
  pen.finish();

  Reader sol(file, origin, "solver");
  cfg.solver.method = parse_method(origin, sol.str("method", "auto"));
  cfg.solver.rho = sol.num("rho", cfg.solver.rho);
  cfg.solver.inner_tol = sol.num("inner_tol", cfg.solver.inner_tol);
  cfg.solver.outer_tol = sol.num("outer_tol", cfg.solver.outer_tol);
  cfg.solver.max_inner = sol.integer("max_inner", cfg.solver.max_inner);
  cfg.solver.max_outer = sol.integer("max_outer", cfg.solver.max_outer);
  cfg.solver.omega = sol.num("omega", cfg.solver.omega);
  cfg.log_iterations = sol.flag("log_iterations", cfg.log_iterations);
  sol.finish();

  Reader ctl(file, origin, "control");
  cfg.control.starts = ctl.integer("starts", cfg.control.starts);
  cfg.control.basis = ctl.integer("basis", cfg.control.basis);
  cfg.control.weight_g = ctl.num("weight_g", cfg.control.weight_g);
  cfg.control.weight_h = ctl.num("weight_h", cfg.control.weight_h);
  cfg.control.perturb = ctl.num("perturb", cfg.control.perturb);
  cfg.control.box = ctl.num("box", cfg.control.box);
  cfg.control.opt.step0 = ctl.num("step0", cfg.control.opt.step0);
  cfg.control.opt.shrink = ctl.num("shrink", cfg.control.opt.shrink);
  cfg.control.opt.step_tol = ctl.num("step_tol", cfg.control.opt.step_tol);
  cfg.control.opt.max_evals = ctl.integer("max_evals", cfg.control.opt.max_evals);
  ctl.finish();

  Reader run(file, origin, "run");
  cfg.run.seed = run.uinteger("seed", cfg.run.seed);
  cfg.run.threads = run.integer("threads", cfg.run.threads);
  cfg.run.timings = run.flag("timings", cfg.run.timings);
  cfg.run.samples = run.integer("samples", cfg.run.samples);
  cfg.run.save_problem = run.flag("save_problem", cfg.run.save_problem);
  run.finish();

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

void ExperimentConfig::validate() const {
  if (mesh.nx < 1 || mesh.ny < 1) throw ConfigError("config: mesh cells must be >= 1");
  if (!(mesh.width > 0.0) || !(mesh.height > 0.0))
    throw ConfigError("config: mesh extent must be > 0");
  schedule.validate();
  if (!(solver.inner_tol > 0.0) || !(solver.outer_tol > 0.0))
    throw ConfigError("config: solver tolerances must be > 0");
  if (solver.max_inner < 1 || solver.max_outer < 1)
    throw ConfigError("config: solver iteration limits must be >= 1");
  if (!(solver.omega > 0.0 && solver.omega < 2.0))
    throw ConfigError("config: omega must lie in (0, 2)");
  if (solver.rho < 0.0) throw ConfigError("config: rho must be >= 0");
  if (!(heat.b_const >= 0.0)) throw ConfigError("config: b_const must be >= 0");
  if (control.starts < 1) throw ConfigError("config: control starts must be >= 1");
  if (control.basis < 1) throw ConfigError("config: control basis must be >= 1");
  if (control.weight_g < 0.0 || !(control.weight_h > 0.0))
    throw ConfigError("config: need weight_g >= 0 and weight_h > 0");
  if (control.box < 0.0) throw ConfigError("config: control box must be >= 0");
  if (!(control.opt.step0 > 0.0) || !(control.opt.shrink > 0.0 && control.opt.shrink < 1.0) ||
      !(control.opt.step_tol > 0.0) || control.opt.max_evals < 1)
    throw ConfigError("config: invalid optimizer parameters");
  if (run.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (run.samples < 1) throw ConfigError("config: samples must be >= 1");
  if (model != "heat" && model != "contact")
    throw ConfigError("config: model must be heat or contact");
  if ((kind == ExperimentKind::ControlPair || kind == ExperimentKind::ControlUniqueness ||
       kind == ExperimentKind::HeatSweep) &&
      model != "heat")
    throw ConfigError("config: this experiment kind runs on the heat model");
  if ((kind == ExperimentKind::ContactSweep || kind == ExperimentKind::ContactSolve) &&
      model != "contact")
    throw ConfigError("config: this experiment kind runs on the contact model");
}

HeatData ExperimentConfig::heat_data(const Mesh2D& m) const {
  const HeatConfig& h = heat;
  return sample_heat_data(
      m, [&](double x, double y) { return h.source_const + h.source_x * x + h.source_y * y; },
      [&](double, double) { return h.b_const; }, [&](double, double) { return h.q_const; });
}

}  // namespace qvi
