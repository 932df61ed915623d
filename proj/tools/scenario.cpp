#include "scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace navslip::cli {

ScenarioError::ScenarioError(int line, int column, std::string key, const std::string& message)
    : InvalidInput(fmt::format("line {}, column {}: {}{}", line, column, key.empty() ? "" : key + ": ", message)),
      line_(line),
      column_(column),
      key_(std::move(key)) {}

namespace {

enum class Kind { real, integer, text, law };

struct KeySpec {
  const char* name;
  Kind kind;
  bool required;
};

// Every accepted key. Physical constants are required; numerical knobs have defaults.
const std::map<std::string, std::vector<KeySpec>>& schema() {
  static const std::map<std::string, std::vector<KeySpec>> s{
      {"cavity", {{"width", Kind::real, true}, {"height", Kind::real, true}}},
      {"solid",
       {{"radius", Kind::real, true},
        {"rho", Kind::real, true},
        {"x", Kind::real, true},
        {"y", Kind::real, true},
        {"angle", Kind::real, false},
        {"vx", Kind::real, false},
        {"vy", Kind::real, false}}},
      {"fluid",
       {{"rho", Kind::real, true},
        {"mu", Kind::real, true},
        {"beta_S", Kind::real, true},
        {"beta_Omega", Kind::real, true},
        {"g", Kind::real, true}}},
      {"scheme",
       {{"n", Kind::real, false},
        {"delta", Kind::real, false},
        {"N", Kind::integer, false},
        {"dt", Kind::real, false},
        {"T", Kind::real, true},
        {"picard_tol", Kind::real, false},
        {"picard_max_iter", Kind::integer, false},
        {"relaxation", Kind::real, false}}},
      {"gap_ode",
       {{"law", Kind::law, true},
        {"kappa", Kind::real, false},
        {"h_min", Kind::real, false},
        {"h0", Kind::real, true},
        {"hdot0", Kind::real, false},
        {"a", Kind::real, false},
        {"T", Kind::real, true},
        {"abs_tol", Kind::real, false},
        {"rel_tol", Kind::real, false},
        {"h_contact", Kind::real, false}}},
      {"output", {{"dir", Kind::text, false}, {"prefix", Kind::text, false}}},
  };
  return s;
}

struct Raw {
  std::string text;
  int line = 0, column = 0;
  double real = 0.0;
  long integer = 0;
};

struct SectionData {
  int line = 0, column = 0;
  std::map<std::string, Raw> values;
};

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t a = 0;
  while (a < s.size() && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  std::size_t b = s.size();
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  if (lead) *lead = a;
  return s.substr(a, b - a);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, SectionData>& sections) : sections_(sections) {}

  const Raw* get(const std::string& sec, const std::string& key) const {
    auto it = sections_.find(sec);
    if (it == sections_.end()) return nullptr;
    auto jt = it->second.values.find(key);
    return jt == it->second.values.end() ? nullptr : &jt->second;
  }
  double real(const std::string& sec, const std::string& key, double def) const {
    const Raw* r = get(sec, key);
    return r ? r->real : def;
  }
  long integer(const std::string& sec, const std::string& key, long def) const {
    const Raw* r = get(sec, key);
    return r ? r->integer : def;
  }
  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const {
    const Raw* r = get(sec, key);
    const auto& s = sections_.at(sec);
    throw ScenarioError(r ? r->line : s.line, r ? r->column : s.column, "[" + sec + "]." + key, msg);
  }
  void positive(const std::string& sec, const std::string& key, double v) const {
    if (!(v > 0.0)) fail(sec, key, fmt::format("must be positive (got {})", v));
  }

 private:
  std::map<std::string, SectionData>& sections_;
};

}  // namespace

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, SectionData> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    pos = eol + 1;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    std::size_t lead = 0;
    const std::string_view body = trim(line, &lead);
    const int col0 = static_cast<int>(lead) + 1;
    if (body.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (body.front() == '[') {
      if (body.back() != ']') throw ScenarioError(line_no, col0, "", "malformed section header");
      const std::string name(trim(body.substr(1, body.size() - 2)));
      if (!schema().count(name)) throw ScenarioError(line_no, col0, "[" + name + "]", "unknown section");
      if (sections.count(name)) throw ScenarioError(line_no, col0, "[" + name + "]", "duplicate section");
      sections[name] = SectionData{line_no, col0, {}};
      current = name;
    } else {
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ScenarioError(line_no, col0, "", "expected 'key = value'");
      const std::string key(trim(body.substr(0, eq)));
      std::size_t vlead = 0;
      const std::string_view raw_value = body.substr(eq + 1);
      const std::string value(trim(raw_value, &vlead));
      const int vcol = col0 + static_cast<int>(eq + 1 + vlead);
      if (current.empty()) throw ScenarioError(line_no, col0, key, "key outside of any section");
      const std::string full = "[" + current + "]." + key;
      const auto& specs = schema().at(current);
      const auto spec = std::find_if(specs.begin(), specs.end(), [&](const KeySpec& k) { return key == k.name; });
      if (spec == specs.end()) throw ScenarioError(line_no, col0, full, "unknown key");
      auto& sec = sections[current];
      if (sec.values.count(key)) throw ScenarioError(line_no, col0, full, "duplicate key");
      if (value.empty()) throw ScenarioError(line_no, vcol, full, "missing value");
      Raw r{value, line_no, vcol};
      const char* b = value.data();
      const char* e = b + value.size();
      switch (spec->kind) {
        case Kind::real: {
          const auto res = std::from_chars(b, e, r.real);
          if (res.ec != std::errc() || res.ptr != e || !std::isfinite(r.real))
            throw ScenarioError(line_no, vcol, full, fmt::format("'{}' is not a finite number", value));
          break;
        }
        case Kind::integer: {
          const auto res = std::from_chars(b, e, r.integer);
          if (res.ec != std::errc() || res.ptr != e)
            throw ScenarioError(line_no, vcol, full, fmt::format("'{}' is not an integer", value));
          break;
        }
        case Kind::law:
          if (value != "log" && value != "inverse" && value != "none")
            throw ScenarioError(line_no, vcol, full, fmt::format("'{}' is not one of log, inverse, none", value));
          break;
        case Kind::text:
          if (value.find_first_of(" \t\"") != std::string::npos)
            throw ScenarioError(line_no, vcol, full, "must not contain spaces or quotes");
          break;
      }
      sec.values.emplace(key, std::move(r));
    }
    if (eol == text.size()) break;
  }

  for (const auto& [name, sec] : sections)
    for (const auto& k : schema().at(name))
      if (k.required && !sec.values.count(k.name))
        throw ScenarioError(sec.line, sec.column, "[" + name + "]." + k.name, "missing required key");

  const Reader rd(sections);
  Scenario s;
  if (sections.count("cavity")) {
    CavitySection c{rd.real("cavity", "width", 0), rd.real("cavity", "height", 0)};
    rd.positive("cavity", "width", c.width);
    rd.positive("cavity", "height", c.height);
    s.cavity = c;
  }
  if (sections.count("solid")) {
    SolidSection o;
    o.radius = rd.real("solid", "radius", 0);
    o.rho = rd.real("solid", "rho", 0);
    o.x = rd.real("solid", "x", 0);
    o.y = rd.real("solid", "y", 0);
    o.angle = rd.real("solid", "angle", 0);
    o.vx = rd.real("solid", "vx", 0);
    o.vy = rd.real("solid", "vy", 0);
    rd.positive("solid", "radius", o.radius);
    rd.positive("solid", "rho", o.rho);
    s.solid = o;
  }
  if (sections.count("fluid")) {
    FluidSection f;
    f.rho = rd.real("fluid", "rho", 0);
    f.mu = rd.real("fluid", "mu", 0);
    f.beta_S = rd.real("fluid", "beta_S", 0);
    f.beta_Omega = rd.real("fluid", "beta_Omega", 0);
    f.g = rd.real("fluid", "g", 0);
    for (const char* k : {"rho", "mu", "beta_S", "beta_Omega"}) rd.positive("fluid", k, rd.real("fluid", k, 0));
    if (f.g < 0.0) rd.fail("fluid", "g", fmt::format("gravity magnitude must be >= 0 (got {})", f.g));
    s.fluid = f;
  }
  if (sections.count("scheme")) {
    SchemeSection sc;
    sc.n = rd.real("scheme", "n", sc.n);
    if (rd.get("scheme", "delta")) sc.delta = rd.real("scheme", "delta", 0);
    sc.N = static_cast<int>(rd.integer("scheme", "N", sc.N));
    sc.dt = rd.real("scheme", "dt", sc.dt);
    sc.T = rd.real("scheme", "T", 0);
    sc.picard_tol = rd.real("scheme", "picard_tol", sc.picard_tol);
    sc.picard_max_iter = static_cast<int>(rd.integer("scheme", "picard_max_iter", sc.picard_max_iter));
    sc.relaxation = rd.real("scheme", "relaxation", sc.relaxation);
    if (!(sc.n >= 1.0)) rd.fail("scheme", "n", fmt::format("must be >= 1 (got {})", sc.n));
    if (sc.delta) rd.positive("scheme", "delta", *sc.delta);
    if (sc.N < 1 || sc.N > 4096) rd.fail("scheme", "N", fmt::format("must lie in [1, 4096] (got {})", sc.N));
    rd.positive("scheme", "dt", sc.dt);
    rd.positive("scheme", "T", sc.T);
    rd.positive("scheme", "picard_tol", sc.picard_tol);
    if (sc.picard_max_iter < 1) rd.fail("scheme", "picard_max_iter", "must be >= 1");
    if (!(sc.relaxation > 0.0 && sc.relaxation <= 1.0)) rd.fail("scheme", "relaxation", "must lie in (0, 1]");
    s.scheme = sc;
  }
  if (sections.count("gap_ode")) {
    GapOdeSection gsec;
    gsec.law = drag_kind_from_string(rd.get("gap_ode", "law")->text);
    gsec.kappa = rd.real("gap_ode", "kappa", gsec.kappa);
    gsec.h_min = rd.real("gap_ode", "h_min", gsec.h_min);
    gsec.h0 = rd.real("gap_ode", "h0", 0);
    gsec.hdot0 = rd.real("gap_ode", "hdot0", 0);
    if (rd.get("gap_ode", "a")) gsec.a = rd.real("gap_ode", "a", 0);
    gsec.T = rd.real("gap_ode", "T", 0);
    gsec.abs_tol = rd.real("gap_ode", "abs_tol", gsec.abs_tol);
    gsec.rel_tol = rd.real("gap_ode", "rel_tol", gsec.rel_tol);
    gsec.h_contact = rd.real("gap_ode", "h_contact", gsec.h_contact);
    for (const char* k : {"kappa", "h0", "T", "abs_tol", "rel_tol", "h_contact"})
      rd.positive("gap_ode", k, rd.real("gap_ode", k, 1.0));
    if (gsec.h_min < 0.0) rd.fail("gap_ode", "h_min", "must be >= 0");
    if (gsec.h0 <= gsec.h_contact) rd.fail("gap_ode", "h0", "must exceed h_contact");
    if (!gsec.a && !(sections.count("fluid") && sections.count("solid")))
      rd.fail("gap_ode", "a", "required unless [fluid] and [solid] give the densities and g");
    s.gap_ode = gsec;
  }
  if (sections.count("output")) {
    if (const Raw* r = rd.get("output", "dir")) s.output.dir = r->text;
    if (const Raw* r = rd.get("output", "prefix")) s.output.prefix = r->text;
  }

  // geometry: solid strictly inside the cavity, delta default and guard margin
  if (s.cavity && s.solid) {
    double gap = 0.0;
    try {
      gap = gap_distance(make_placement(s), make_shape(s), make_cavity(s));
    } catch (const InvalidInput&) {
      rd.fail("solid", "x", "the solid does not fit inside the cavity at (x, y)");
    }
    if (!(gap > 0.0)) rd.fail("solid", "x", "the solid touches the cavity wall");
    if (s.scheme) {
      if (!s.scheme->delta) s.scheme->delta = 0.1 * gap;
      if (!(gap > 2.0 * *s.scheme->delta))
        rd.fail("scheme", "delta", fmt::format("initial gap {} must exceed 2 delta = {}", gap, 2.0 * *s.scheme->delta));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(fmt::format("cannot read scenario file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string dump_scenario(const Scenario& s) {
  std::string o;
  auto kv = [&o](const char* k, double v) { o += fmt::format("{} = {:.17g}\n", k, v); };
  auto ki = [&o](const char* k, long v) { o += fmt::format("{} = {}\n", k, v); };
  if (s.cavity) {
    o += "[cavity]\n";
    kv("width", s.cavity->width);
    kv("height", s.cavity->height);
    o += "\n";
  }
  if (s.solid) {
    o += "[solid]\n";
    kv("radius", s.solid->radius);
    kv("rho", s.solid->rho);
    kv("x", s.solid->x);
    kv("y", s.solid->y);
    kv("angle", s.solid->angle);
    kv("vx", s.solid->vx);
    kv("vy", s.solid->vy);
    o += "\n";
  }
  if (s.fluid) {
    o += "[fluid]\n";
    kv("rho", s.fluid->rho);
    kv("mu", s.fluid->mu);
    kv("beta_S", s.fluid->beta_S);
    kv("beta_Omega", s.fluid->beta_Omega);
    kv("g", s.fluid->g);
    o += "\n";
  }
  if (s.scheme) {
    o += "[scheme]\n";
    kv("n", s.scheme->n);
    if (s.scheme->delta) kv("delta", *s.scheme->delta);
    ki("N", s.scheme->N);
    kv("dt", s.scheme->dt);
    kv("T", s.scheme->T);
    kv("picard_tol", s.scheme->picard_tol);
    ki("picard_max_iter", s.scheme->picard_max_iter);
    kv("relaxation", s.scheme->relaxation);
    o += "\n";
  }
  if (s.gap_ode) {
    const auto& g = *s.gap_ode;
    o += "[gap_ode]\n";
    o += fmt::format("law = {}\n", to_string(g.law));
    kv("kappa", g.kappa);
    kv("h_min", g.h_min);
    kv("h0", g.h0);
    kv("hdot0", g.hdot0);
    if (g.a) kv("a", *g.a);
    kv("T", g.T);
    kv("abs_tol", g.abs_tol);
    kv("rel_tol", g.rel_tol);
    kv("h_contact", g.h_contact);
    o += "\n";
  }
  o += "[output]\n";
  o += fmt::format("dir = {}\nprefix = {}\n", s.output.dir, s.output.prefix);
  return o;
}

void require_sections(const Scenario& s, Mode mode) {
  auto need = [](bool ok, const char* what, const char* mode_name) {
    if (!ok) throw InvalidInput(fmt::format("{} mode needs a [{}] section", mode_name, what));
  };
  switch (mode) {
    case Mode::simulate:
    case Mode::check:
    case Mode::rates: {
      const char* m = mode == Mode::simulate ? "simulate" : mode == Mode::check ? "check" : "rates";
      need(s.cavity.has_value(), "cavity", m);
      need(s.solid.has_value(), "solid", m);
      need(s.fluid.has_value(), "fluid", m);
      need(s.scheme.has_value(), "scheme", m);
      break;
    }
    case Mode::gap_ode:
      need(s.gap_ode.has_value(), "gap_ode", "gap-ode");
      break;
  }
}

Cavity make_cavity(const Scenario& s) { return Cavity::rectangle(s.cavity->width, s.cavity->height); }
SolidShape make_shape(const Scenario& s) { return {s.solid->radius, s.solid->rho}; }
Placement make_placement(const Scenario& s) { return {{s.solid->x, s.solid->y}, s.solid->angle}; }

SimParams make_params(const Scenario& s) {
  SimParams p;
  p.rho_F = s.fluid->rho;
  p.rho_S = s.solid->rho;
  p.mu_F = s.fluid->mu;
  p.beta_S = s.fluid->beta_S;
  p.beta_Omega = s.fluid->beta_Omega;
  p.g = Vec2(0.0, s.fluid->g);
  p.n = s.scheme->n;
  p.delta = s.scheme->delta.value_or(0.1);
  p.N = s.scheme->N;
  p.dt = s.scheme->dt;
  p.picard_tol = s.scheme->picard_tol;
  p.picard_max_iter = s.scheme->picard_max_iter;
  p.relaxation = s.scheme->relaxation;
  return p;
}

DragLaw make_drag(const Scenario& s) { return {s.gap_ode->law, s.gap_ode->kappa, s.gap_ode->h_min}; }

GapOdeOptions make_gap_options(const Scenario& s) {
  GapOdeOptions o;
  o.abs_tol = s.gap_ode->abs_tol;
  o.rel_tol = s.gap_ode->rel_tol;
  o.h_contact = s.gap_ode->h_contact;
  return o;
}

double gap_ode_acceleration(const Scenario& s) {
  if (s.gap_ode->a) return *s.gap_ode->a;
  return gap_acceleration(s.fluid->rho, s.solid->rho, s.fluid->g);
}

}  // namespace navslip::cli
