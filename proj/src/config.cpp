#include "lzs/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace lzs {

ConfigError::ConfigError(const std::string& what, std::size_t line, std::size_t column)
    : ValidationError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": " + what),
      line_(line),
      column_(column) {}

namespace {

enum class Unit { None, Energy, Time, Field, Velocity, Gdd, Tod, Angle, WaveNumber };
enum class Kind { Real, Count, Integer, Text };
enum class Range { Any, Positive, NonNegative, PositiveOrInf, Probability };

struct UnitSuffix {
  std::string_view text;
  double factor;
};

std::vector<UnitSuffix> suffixes(Unit u) {
  switch (u) {
    case Unit::None: return {};
    case Unit::Energy: return {{"eV", 1.0}, {"meV", 1e-3}};
    case Unit::Time: return {{"fs", 1.0}, {"as", 1e-3}, {"ps", 1e3}};
    case Unit::Field: return {{"V/nm", 1.0}, {"V/A", 10.0}, {"MV/cm", 0.1}};
    case Unit::Velocity: return {{"nm/fs", 1.0}, {"m/s", 1e-6}};
    case Unit::Gdd: return {{"fs^2", 1.0}, {"fs2", 1.0}};
    case Unit::Tod: return {{"fs^3", 1.0}, {"fs3", 1.0}};
    case Unit::Angle: return {{"rad", 1.0}, {"deg", kPi / 180.0}};
    case Unit::WaveNumber: return {{"1/nm", 1.0}, {"nm^-1", 1.0}};
  }
  return {};
}

std::string_view unit_name(Unit u) {
  switch (u) {
    case Unit::None: return "dimensionless";
    case Unit::Energy: return "eV";
    case Unit::Time: return "fs";
    case Unit::Field: return "V/nm";
    case Unit::Velocity: return "nm/fs";
    case Unit::Gdd: return "fs^2";
    case Unit::Tod: return "fs^3";
    case Unit::Angle: return "rad";
    case Unit::WaveNumber: return "1/nm";
  }
  return "";
}

struct KeyDef {
  std::string_view name;
  Kind kind;
  Unit unit;
  Range range;
  bool hashed;
  std::function<double&(RunConfig&)> real;
  std::function<std::size_t&(RunConfig&)> count;
  std::function<int&(RunConfig&)> integer;
  std::function<std::string&(RunConfig&)> text;
};

KeyDef real_key(std::string_view name, Unit unit, Range range,
                std::function<double&(RunConfig&)> f, bool hashed = true) {
  return {name, Kind::Real, unit, range, hashed, std::move(f), {}, {}, {}};
}

KeyDef count_key(std::string_view name, std::function<std::size_t&(RunConfig&)> f,
                 bool hashed = true) {
  return {name, Kind::Count, Unit::None, Range::NonNegative, hashed, {}, std::move(f), {}, {}};
}

KeyDef int_key(std::string_view name, std::function<int&(RunConfig&)> f) {
  return {name, Kind::Integer, Unit::None, Range::Any, true, {}, {}, std::move(f), {}};
}

KeyDef text_key(std::string_view name, std::function<std::string&(RunConfig&)> f) {
  return {name, Kind::Text, Unit::None, Range::Any, false, {}, {}, {}, std::move(f)};
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    using R = RunConfig;
    std::vector<KeyDef> t;
    t.push_back(real_key("material.gap", Unit::Energy, Range::NonNegative,
                         [](R& c) -> double& { return c.material.gap; }));
    t.push_back(real_key("material.fermi_velocity", Unit::Velocity, Range::Positive,
                         [](R& c) -> double& { return c.material.fermi_velocity; }));
    t.push_back(real_key("pulse.photon_energy", Unit::Energy, Range::Positive,
                         [](R& c) -> double& { return c.pulse.photon_energy; }));
    t.push_back(real_key("pulse.peak_field", Unit::Field, Range::Positive,
                         [](R& c) -> double& { return c.pulse.peak_field; }));
    t.push_back(real_key("pulse.duration", Unit::Time, Range::Positive,
                         [](R& c) -> double& { return c.pulse.duration; }));
    t.push_back(real_key("pulse.cep", Unit::Angle, Range::Any,
                         [](R& c) -> double& { return c.pulse.cep; }));
    t.push_back(real_key("pulse.gdd", Unit::Gdd, Range::Any,
                         [](R& c) -> double& { return c.pulse.gdd; }));
    t.push_back(real_key("pulse.tod", Unit::Tod, Range::Any,
                         [](R& c) -> double& { return c.pulse.tod; }));
    t.push_back(real_key("dephasing.t2", Unit::Time, Range::PositiveOrInf,
                         [](R& c) -> double& { return c.t2; }));
    t.push_back(real_key("point.gamma", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.point_gamma; }));
    t.push_back(real_key("point.m", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.point_m; }));
    t.push_back(real_key("point.k0", Unit::WaveNumber, Range::Any,
                         [](R& c) -> double& { return c.point_k0; }));
    t.push_back(real_key("grid.gamma_min", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.gamma.min; }));
    t.push_back(real_key("grid.gamma_max", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.gamma.max; }));
    t.push_back(count_key("grid.gamma_count", [](R& c) -> std::size_t& { return c.grid.gamma.count; }));
    t.push_back(real_key("grid.m_min", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.m.min; }));
    t.push_back(real_key("grid.m_max", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.m.max; }));
    t.push_back(count_key("grid.m_count", [](R& c) -> std::size_t& { return c.grid.m.count; }));
    t.push_back(count_key("grid.current_gamma_count",
                          [](R& c) -> std::size_t& { return c.current_gamma_count; }));
    t.push_back(count_key("grid.current_m_count",
                          [](R& c) -> std::size_t& { return c.current_m_count; }));
    t.push_back(real_key("grid.k0", Unit::WaveNumber, Range::Any,
                         [](R& c) -> double& { return c.grid.k0; }));
    t.push_back(real_key("grid.k0_half_width", Unit::WaveNumber, Range::NonNegative,
                         [](R& c) -> double& { return c.grid.k_policy.half_width; }));
    t.push_back(count_key("grid.k0_points", [](R& c) -> std::size_t& { return c.grid.k_policy.points; }));
    t.push_back(count_key("grid.k0_max_refinements",
                          [](R& c) -> std::size_t& { return c.grid.k_policy.max_refinements; }));
    t.push_back(real_key("grid.k0_refine_tol", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.k_policy.refine_tol; }));
    t.push_back(real_key("grid.k0_edge_tol", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.k_policy.edge_tol; }));
    t.push_back(count_key("grid.k0_max_extensions",
                          [](R& c) -> std::size_t& { return c.grid.k_policy.max_extensions; }));
    t.push_back(real_key("grid.k0_extension_factor", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.grid.k_policy.extension_factor; }));
    t.push_back(real_key("regime.gamma_boundary", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.thresholds.gamma_boundary; }));
    t.push_back(real_key("regime.z_r_boundary", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.thresholds.z_r_boundary; }));
    t.push_back(real_key("regime.p_hi", Unit::None, Range::Probability,
                         [](R& c) -> double& { return c.thresholds.p_hi; }));
    t.push_back(real_key("regime.p_lo", Unit::None, Range::Probability,
                         [](R& c) -> double& { return c.thresholds.p_lo; }));
    t.push_back(real_key("regime.relativistic_gamma", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.thresholds.relativistic_gamma; }));
    t.push_back(count_key("engine.workers", [](R& c) -> std::size_t& { return c.workers; }, false));
    t.push_back(real_key("engine.tolerance", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.tolerance; }));
    t.push_back(text_key("engine.checkpoint", [](R& c) -> std::string& { return c.checkpoint; }));
    t.push_back(count_key("engine.stop_after", [](R& c) -> std::size_t& { return c.stop_after; }, false));
    t.push_back(text_key("output.dir", [](R& c) -> std::string& { return c.output_dir; }));
    t.push_back(real_key("iso.e0_min", Unit::Field, Range::Positive,
                         [](R& c) -> double& { return c.iso_e0_min; }));
    t.push_back(real_key("iso.e0_max", Unit::Field, Range::Positive,
                         [](R& c) -> double& { return c.iso_e0_max; }));
    t.push_back(count_key("iso.e0_count", [](R& c) -> std::size_t& { return c.iso_e0_count; }));
    t.push_back(real_key("iso.sign_floor", Unit::None, Range::NonNegative,
                         [](R& c) -> double& { return c.iso_sign_floor; }));
    t.push_back(int_key("resonance.max_order", [](R& c) -> int& { return c.resonance_max_order; }));
    t.push_back(real_key("resonance.gamma_min", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.resonance_gamma_min; }));
    t.push_back(real_key("resonance.gamma_max", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.resonance_gamma_max; }));
    t.push_back(count_key("resonance.count", [](R& c) -> std::size_t& { return c.resonance_count; }));
    t.push_back(real_key("lz.window", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.lz_window; }));
    t.push_back(real_key("lz.tolerance", Unit::None, Range::Positive,
                         [](R& c) -> double& { return c.lz_tolerance; }));
    return t;
  }();
  return table;
}

const KeyDef* find_key(std::string_view name) {
  for (const KeyDef& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

// Recursive-descent evaluator for + - * / ( ), numbers, pi and inf. Stops at
// the first token that cannot continue the expression; the rest is the unit.
class ExprParser {
 public:
  ExprParser(std::string_view s, std::size_t line, std::size_t col0)
      : s_(s), line_(line), col0_(col0) {}

  double parse_expression() {
    double v = term();
    for (;;) {
      skip_space();
      if (peek('+')) {
        ++pos_;
        v += term();
      } else if (peek('-')) {
        ++pos_;
        v -= term();
      } else {
        return v;
      }
    }
  }

  std::size_t position() const { return pos_; }

 private:
  double term() {
    double v = factor();
    for (;;) {
      skip_space();
      // A '/' followed by a letter starts a unit such as "1/nm" only after a
      // number with whitespace; inside expressions '/' is division.
      if (peek('*')) {
        ++pos_;
        v *= factor();
      } else if (peek('/') && !unit_follows()) {
        ++pos_;
        v /= factor();
      } else {
        return v;
      }
    }
  }

  double factor() {
    skip_space();
    if (peek('-')) {
      ++pos_;
      return -factor();
    }
    if (peek('+')) {
      ++pos_;
      return factor();
    }
    if (peek('(')) {
      ++pos_;
      const double v = parse_expression();
      skip_space();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return v;
    }
    if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return v;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view word = s_.substr(start, pos_ - start);
    if (word == "pi") return kPi;
    if (word == "inf" || word == "infinity") return std::numeric_limits<double>::infinity();
    pos_ = start;
    fail(word.empty() ? "expected a number" : "unknown symbol '" + std::string(word) + "'");
  }

  bool unit_follows() const {
    std::size_t p = pos_ + 1;
    while (p < s_.size() && s_[p] == ' ') ++p;
    return p < s_.size() && std::isalpha(static_cast<unsigned char>(s_[p])) &&
           s_.substr(p, 2) != "pi";
  }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line_, col0_ + pos_); }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col0_;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const KeyDef& key, std::string_view value, std::size_t line, std::size_t col) {
  if (key.range == Range::PositiveOrInf && (value == "off" || value == "none"))
    return std::numeric_limits<double>::infinity();
  ExprParser p(value, line, col);
  double v = p.parse_expression();
  const std::string unit = trim(value.substr(p.position()));
  const std::size_t unit_col = col + value.find_first_not_of(" \t", p.position());
  if (!unit.empty()) {
    const auto table = suffixes(key.unit);
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const UnitSuffix& u) { return u.text == unit; });
    if (it == table.end())
      throw ConfigError("unit '" + unit + "' does not fit " + std::string(key.name) + " (expects " +
                            std::string(unit_name(key.unit)) + ")",
                        line, unit_col);
    v *= it->factor;
  }
  auto bad = [&](const std::string& what) {
    throw ConfigError(std::string(key.name) + " " + what, line, col);
  };
  if (std::isnan(v)) bad("is not a number");
  switch (key.range) {
    case Range::Any:
      if (!std::isfinite(v)) bad("must be finite");
      break;
    case Range::Positive:
      if (!(v > 0.0) || !std::isfinite(v)) bad("must be > 0 and finite");
      break;
    case Range::NonNegative:
      if (!(v >= 0.0) || !std::isfinite(v)) bad("must be >= 0 and finite");
      break;
    case Range::PositiveOrInf:
      if (!(v > 0.0)) bad("must be > 0 (or inf/off)");
      break;
    case Range::Probability:
      if (!(v >= 0.0 && v <= 1.0)) bad("must lie in [0, 1]");
      break;
  }
  return v;
}

void assign(RunConfig& cfg, const KeyDef& key, std::string_view raw, std::size_t line,
            std::size_t col) {
  const std::string value = trim(raw);
  if (value.empty()) throw ConfigError(std::string(key.name) + " has no value", line, col);
  switch (key.kind) {
    case Kind::Real:
      key.real(cfg) = parse_real(key, value, line, col);
      break;
    case Kind::Count:
    case Kind::Integer: {
      ExprParser p(value, line, col);
      const double v = p.parse_expression();
      if (p.position() != value.size())
        throw ConfigError(std::string(key.name) + " takes a plain integer", line,
                          col + p.position());
      if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e15)
        throw ConfigError(std::string(key.name) + " must be an integer", line, col);
      if (key.kind == Kind::Count) {
        if (v < 0) throw ConfigError(std::string(key.name) + " must be >= 0", line, col);
        key.count(cfg) = static_cast<std::size_t>(v);
      } else {
        key.integer(cfg) = static_cast<int>(v);
      }
      break;
    }
    case Kind::Text: {
      std::string s = value;
      if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
      key.text(cfg) = s;
      break;
    }
  }
}

// Position of a comment start outside double quotes, or npos.
std::size_t comment_start(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && (line[i] == '#' || line[i] == ';')) return i;
  }
  return std::string_view::npos;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical(const RunConfig& cfg, bool hashed_only) {
  RunConfig c = cfg;  // the key accessors hand out mutable references
  std::ostringstream out;
  for (const KeyDef& key : key_table()) {
    if (hashed_only && !key.hashed) continue;
    std::string value;
    switch (key.kind) {
      case Kind::Real: {
        const double v = key.real(c);
        if (std::isnan(v)) continue;  // unset optional
        value = format_real(v);
        break;
      }
      case Kind::Count: value = std::to_string(key.count(c)); break;
      case Kind::Integer: value = std::to_string(key.integer(c)); break;
      case Kind::Text: value = "\"" + key.text(c) + "\""; break;
    }
    out << key.name << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::size_t cut = comment_start(line);
    if (cut != std::string_view::npos) line = line.substr(0, cut);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string_view::npos)
        throw ConfigError("unterminated section header", line_no, first + 1);
      section = trim(line.substr(first + 1, close - first - 1));
      if (!trim(line.substr(close + 1)).empty())
        throw ConfigError("unexpected text after section header", line_no, close + 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value'", line_no, first + 1);
    const std::string name = trim(line.substr(0, eq));
    const std::string full =
        name.find('.') != std::string::npos || section.empty() ? name : section + "." + name;
    const KeyDef* key = find_key(full);
    if (!key) throw ConfigError("unknown key '" + full + "'", line_no, first + 1);
    const std::string_view value = line.substr(eq + 1);
    const auto vstart = value.find_first_not_of(" \t");
    assign(cfg, *key, value, line_no, eq + 2 + (vstart == std::string_view::npos ? 0 : vstart));
  }
  return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override must be key=value: '" + std::string(assignment) + "'", 1, 1);
  std::string name = trim(assignment.substr(0, eq));
  if (name == "gamma") name = "point.gamma";
  if (name == "M" || name == "m") name = "point.m";
  if (name == "k0") name = "point.k0";
  const KeyDef* key = find_key(name);
  if (!key) throw ConfigError("unknown key '" + name + "' in override", 1, 1);
  assign(cfg, *key, assignment.substr(eq + 1), 1, eq + 2);
}

std::string canonical_text(const RunConfig& cfg) { return canonical(cfg, false); }

std::string hashed_text(const RunConfig& cfg) { return canonical(cfg, true); }

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string text = canonical(cfg, true);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const KeyDef& k : key_table()) {
    std::string line(k.name);
    if (k.kind == Kind::Real) line += " [" + std::string(unit_name(k.unit)) + "]";
    out.push_back(line);
  }
  return out;
}

GridSpec RunConfig::resolved_grid(MapKind kind) const {
  GridSpec g = grid;
  if (kind == MapKind::Current) {
    g.gamma.count = current_gamma_count;
    g.m.count = current_m_count;
  }
  g.pulse = pulse;
  g.fermi_velocity = material.fermi_velocity;
  g.t2 = t2;
  g.thresholds = thresholds;
  g.propagation.tol = tolerance;
  g.propagation.record = false;
  return g;
}

WorkingPoint RunConfig::resolved_point() const {
  if (!std::isnan(point_gamma) || !std::isnan(point_m)) {
    if (std::isnan(point_gamma) || std::isnan(point_m))
      throw ValidationError("point.gamma and point.m must be given together");
    return working_point(point_gamma, point_m, pulse.photon_energy, material.fermi_velocity);
  }
  WorkingPoint wp;
  wp.material = material;
  wp.drive.photon_energy = pulse.photon_energy;
  wp.drive.peak_field = pulse.peak_field;
  return wp;
}

void RunConfig::validate() const {
  material.validate();
  pulse.validate();
  resolved_grid(MapKind::Population).validate();
  resolved_grid(MapKind::Current).validate();
  if (thresholds.p_lo >= thresholds.p_hi) throw ValidationError("regime.p_lo must be < regime.p_hi");
  if (!(iso_e0_max > iso_e0_min) || iso_e0_count < 2)
    throw ValidationError("iso.e0_max must exceed iso.e0_min with iso.e0_count >= 2");
  if (resonance_max_order < 1) throw ValidationError("resonance.max_order must be >= 1");
  if (!(resonance_gamma_max > resonance_gamma_min) || resonance_count < 2)
    throw ValidationError("resonance gamma range must be increasing with count >= 2");
  (void)resolved_point();
}

}  // namespace lzs
