#include "tklab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace tklab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("malformed section header", line_no);
      section = lower(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value", line_no);
    if (section.empty())
      throw ParseError("key outside of any section", line_no);
    entries.push_back(
        {section, lower(trim(line.substr(0, eq))), trim(line.substr(eq + 1)),
         line_no});
  }
  return entries;
}

double parse_number(const std::string& s, int line) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
  if (trim(s.substr(pos)) != "")
    throw ParseError("trailing garbage after number: '" + s + "'", line);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

std::vector<double> parse_number_list(const std::string& s, int line) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    if (part.empty()) throw ParseError("empty list element", line);
    out.push_back(parse_number(part, line));
  }
  return out;
}

Mat parse_matrix(const std::string& value, int n, const std::string& what,
                 int line) {
  const auto colon = value.find(':');
  const std::string kind =
      colon == std::string::npos ? "" : lower(trim(value.substr(0, colon)));
  const std::string rest =
      colon == std::string::npos ? "" : trim(value.substr(colon + 1));
  if (kind == "uniform") {
    return Mat::Constant(n, n, parse_number(rest, line));
  }
  if (kind == "ring") {
    const auto parts = parse_number_list(rest, line);
    if (parts.size() != 2)
      throw ParseError(what + ": ring form needs 'base, decay'", line);
    const double base = parts[0], decay = parts[1];
    Mat m(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int d = std::min(std::abs(a - b), n - std::abs(a - b));
        m(a, b) = base * std::pow(decay, d);
      }
    }
    return m;
  }
  if (kind == "rows") {
    const auto rows = split(rest, ';');
    if (static_cast<int>(rows.size()) != n)
      throw ParseError(what + ": expected " + std::to_string(n) + " rows",
                       line);
    Mat m(n, n);
    for (int a = 0; a < n; ++a) {
      std::istringstream rs(rows[a]);
      std::string tok;
      int b = 0;
      while (rs >> tok) {
        if (b >= n)
          throw ParseError(what + ": too many entries in row " +
                               std::to_string(a + 1),
                           line);
        m(a, b++) = parse_number(tok, line);
      }
      if (b != n)
        throw ParseError(what + ": row " + std::to_string(a + 1) + " has " +
                             std::to_string(b) + " entries, expected " +
                             std::to_string(n),
                         line);
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (m(a, b) != m(b, a))
          throw ParseError(what + " is not symmetric at (" +
                               std::to_string(a + 1) + "," +
                               std::to_string(b + 1) + ")",
                           line);
    return m;
  }
  throw ParseError(what + ": expected 'uniform:', 'ring:' or 'rows:'", line);
}

const std::map<std::string, std::vector<std::string>>& known_fields() {
  static const std::map<std::string, std::vector<std::string>> fields = {
      {"model",
       {"name", "n", "kappa1", "kappa2", "eta", "t_star", "nu", "psi", "zeta",
        "positive"}},
      {"initial", {"time", "phases", "temps", "seed"}},
      {"integrator",
       {"method", "dt", "rel_tol", "abs_tol", "t_end", "output_stride",
        "positivity_floor"}},
      {"claims", {"claims", "pairing"}},
  };
  return fields;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string pairing_name(Pairing p) {
  switch (p) {
    case Pairing::none: return "none";
    case Pairing::kuramoto_shadow: return "kuramoto_shadow";
    case Pairing::tcs_reduction: return "tcs_reduction";
    case Pairing::twin_l1: return "twin_l1";
  }
  return "none";
}

Pairing pairing_from_name(const std::string& name) {
  if (name == "none") return Pairing::none;
  if (name == "kuramoto_shadow") return Pairing::kuramoto_shadow;
  if (name == "tcs_reduction") return Pairing::tcs_reduction;
  if (name == "twin_l1") return Pairing::twin_l1;
  throw std::invalid_argument("unknown pairing: " + name);
}

void Scenario::validate() const {
  params.validate();
  options.validate();
  if (initial.has_value() == random_init.has_value())
    throw std::invalid_argument(
        "scenario needs exactly one of explicit or random initial data");
  if (initial) {
    initial->validate();
    if (initial->phases.size() != params.n)
      throw std::invalid_argument("initial data size does not match n");
  }
  if (random_init) {
    if (!(random_init->phase_hi >= random_init->phase_lo) ||
        !(random_init->temp_hi >= random_init->temp_lo))
      throw std::invalid_argument("random bounds are inverted");
    if (!(random_init->temp_lo > 0.0))
      throw std::invalid_argument("random temperature bounds must be positive");
  }
}

EnsembleState Scenario::make_initial() const {
  if (initial) return *initial;
  const RandomSpec& spec = *random_init;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(spec.phase_lo,
                                                    spec.phase_hi);
  std::uniform_real_distribution<double> temp_dist(spec.temp_lo, spec.temp_hi);
  EnsembleState s;
  s.time = 0.0;
  s.phases = Vec::Zero(params.n);
  s.temps = Vec::Zero(params.n);
  for (int i = 0; i < params.n; ++i) s.phases[i] = phase_dist(rng);
  for (int i = 0; i < params.n; ++i) s.temps[i] = temp_dist(rng);
  return s;
}

Scenario parse_scenario(const std::string& text) {
  const auto entries = tokenize(text);

  // Validate section/key names up front, with line numbers.
  for (const auto& e : entries) {
    const auto it = known_fields().find(e.section);
    if (it == known_fields().end())
      throw ParseError("unknown section [" + e.section + "]", e.line);
    if (std::find(it->second.begin(), it->second.end(), e.key) ==
        it->second.end())
      throw ParseError("unknown field '" + e.key + "' in [" + e.section + "]",
                       e.line);
  }

  auto find = [&](const std::string& section,
                  const std::string& key) -> const Entry* {
    for (const auto& e : entries)
      if (e.section == section && e.key == key) return &e;
    return nullptr;
  };

  const Entry* n_entry = find("model", "n");
  if (!n_entry) throw ParseError("[model] must define n", 0);
  const int n = static_cast<int>(parse_number(n_entry->value, n_entry->line));
  if (n <= 0) throw ParseError("n must be positive", n_entry->line);

  Scenario sc;
  sc.params = ModelParams::uniform(n);

  auto get_number = [&](const std::string& sec, const std::string& key,
                        double fallback) {
    const Entry* e = find(sec, key);
    return e ? parse_number(e->value, e->line) : fallback;
  };

  if (const Entry* e = find("model", "name")) sc.name = e->value;
  sc.params.kappa1 = get_number("model", "kappa1", 1.0);
  sc.params.kappa2 = get_number("model", "kappa2", 1.0);
  sc.params.eta = get_number("model", "eta", 0.0);
  sc.params.t_star = get_number("model", "t_star", 1.0);
  if (const Entry* e = find("model", "positive")) {
    const std::string v = lower(e->value);
    if (v == "true" || v == "1") sc.params.strictly_positive = true;
    else if (v == "false" || v == "0") sc.params.strictly_positive = false;
    else throw ParseError("positive must be true or false", e->line);
  }
  if (const Entry* e = find("model", "nu")) {
    if (lower(e->value) == "zero") {
      sc.params.nat_freq = Vec::Zero(n);
    } else {
      const auto vals = parse_number_list(e->value, e->line);
      if (vals.size() == 1) {
        sc.params.nat_freq = Vec::Constant(n, vals[0]);
      } else if (static_cast<int>(vals.size()) == n) {
        sc.params.nat_freq =
            Eigen::Map<const Vec>(vals.data(), static_cast<long>(vals.size()));
      } else {
        throw ParseError("nu needs 1 or " + std::to_string(n) + " values",
                         e->line);
      }
    }
  }
  if (const Entry* e = find("model", "psi"))
    sc.params.psi = parse_matrix(e->value, n, "psi", e->line);
  if (const Entry* e = find("model", "zeta"))
    sc.params.zeta = parse_matrix(e->value, n, "zeta", e->line);

  // Initial data: explicit lists, or matching "random: lo, hi" forms.
  const Entry* phases_e = find("initial", "phases");
  const Entry* temps_e = find("initial", "temps");
  if (!phases_e || !temps_e)
    throw ParseError("[initial] must define phases and temps", 0);
  auto is_random = [&](const Entry* e) {
    return lower(e->value).rfind("random", 0) == 0;
  };
  if (is_random(phases_e) != is_random(temps_e))
    throw ParseError("phases and temps must both be explicit or both random",
                     temps_e->line);
  if (is_random(phases_e)) {
    auto parse_range = [&](const Entry* e, double& lo, double& hi) {
      const auto colon = e->value.find(':');
      if (colon == std::string::npos)
        throw ParseError("random form is 'random: lo, hi'", e->line);
      const auto vals = parse_number_list(e->value.substr(colon + 1), e->line);
      if (vals.size() != 2)
        throw ParseError("random form is 'random: lo, hi'", e->line);
      lo = vals[0];
      hi = vals[1];
    };
    RandomSpec spec;
    parse_range(phases_e, spec.phase_lo, spec.phase_hi);
    parse_range(temps_e, spec.temp_lo, spec.temp_hi);
    const Entry* seed_e = find("initial", "seed");
    if (!seed_e)
      throw ParseError("random initial data requires an explicit seed",
                       phases_e->line);
    spec.seed = static_cast<std::uint64_t>(
        std::llround(parse_number(seed_e->value, seed_e->line)));
    sc.random_init = spec;
  } else {
    EnsembleState init;
    init.time = get_number("initial", "time", 0.0);
    const auto ph = parse_number_list(phases_e->value, phases_e->line);
    const auto tp = parse_number_list(temps_e->value, temps_e->line);
    if (static_cast<int>(ph.size()) != n)
      throw ParseError("phases needs " + std::to_string(n) + " values",
                       phases_e->line);
    if (static_cast<int>(tp.size()) != n)
      throw ParseError("temps needs " + std::to_string(n) + " values",
                       temps_e->line);
    init.phases = Eigen::Map<const Vec>(ph.data(), n);
    init.temps = Eigen::Map<const Vec>(tp.data(), n);
    sc.initial = std::move(init);
  }

  if (const Entry* e = find("integrator", "method")) {
    const std::string m = lower(e->value);
    if (m == "rk4_fixed") sc.options.method = Method::rk4_fixed;
    else if (m == "rk45_adaptive") sc.options.method = Method::rk45_adaptive;
    else throw ParseError("method must be rk4_fixed or rk45_adaptive", e->line);
  }
  sc.options.dt = get_number("integrator", "dt", 0.0);
  sc.options.rel_tol = get_number("integrator", "rel_tol", 1e-8);
  sc.options.abs_tol = get_number("integrator", "abs_tol", 1e-10);
  sc.options.t_end = get_number("integrator", "t_end", 10.0);
  sc.options.output_stride =
      static_cast<int>(get_number("integrator", "output_stride", 1));
  sc.options.positivity_floor =
      get_number("integrator", "positivity_floor", 1e-12);

  if (const Entry* e = find("claims", "claims")) {
    for (const auto& c : split(e->value, ',')) {
      if (!c.empty()) sc.claims.push_back(c);
    }
  }
  if (const Entry* e = find("claims", "pairing")) {
    try {
      sc.pairing = pairing_from_name(lower(e->value));
    } catch (const std::invalid_argument& ex) {
      throw ParseError(ex.what(), e->line);
    }
  }

  try {
    sc.validate();
  } catch (const std::exception& ex) {
    throw ParseError(ex.what(), 0);
  }
  return sc;
}

std::string emit_scenario(const Scenario& sc) {
  std::ostringstream out;
  const int n = sc.params.n;
  out << "[model]\n";
  out << "name = " << sc.name << "\n";
  out << "n = " << n << "\n";
  out << "kappa1 = " << fmt(sc.params.kappa1) << "\n";
  out << "kappa2 = " << fmt(sc.params.kappa2) << "\n";
  out << "eta = " << fmt(sc.params.eta) << "\n";
  out << "t_star = " << fmt(sc.params.t_star) << "\n";
  out << "positive = " << (sc.params.strictly_positive ? "true" : "false")
      << "\n";
  out << "nu = ";
  for (int i = 0; i < n; ++i)
    out << (i ? ", " : "") << fmt(sc.params.nat_freq[i]);
  out << "\n";
  auto emit_matrix = [&](const char* key, const Mat& m) {
    out << key << " = rows: ";
    for (int a = 0; a < n; ++a) {
      if (a) out << "; ";
      for (int b = 0; b < n; ++b) out << (b ? " " : "") << fmt(m(a, b));
    }
    out << "\n";
  };
  emit_matrix("psi", sc.params.psi);
  emit_matrix("zeta", sc.params.zeta);

  out << "\n[initial]\n";
  if (sc.initial) {
    out << "time = " << fmt(sc.initial->time) << "\n";
    out << "phases = ";
    for (int i = 0; i < n; ++i)
      out << (i ? ", " : "") << fmt(sc.initial->phases[i]);
    out << "\ntemps = ";
    for (int i = 0; i < n; ++i)
      out << (i ? ", " : "") << fmt(sc.initial->temps[i]);
    out << "\n";
  } else {
    out << "phases = random: " << fmt(sc.random_init->phase_lo) << ", "
        << fmt(sc.random_init->phase_hi) << "\n";
    out << "temps = random: " << fmt(sc.random_init->temp_lo) << ", "
        << fmt(sc.random_init->temp_hi) << "\n";
    out << "seed = " << sc.random_init->seed << "\n";
  }

  out << "\n[integrator]\n";
  out << "method = "
      << (sc.options.method == Method::rk4_fixed ? "rk4_fixed"
                                                 : "rk45_adaptive")
      << "\n";
  out << "dt = " << fmt(sc.options.dt) << "\n";
  out << "rel_tol = " << fmt(sc.options.rel_tol) << "\n";
  out << "abs_tol = " << fmt(sc.options.abs_tol) << "\n";
  out << "t_end = " << fmt(sc.options.t_end) << "\n";
  out << "output_stride = " << sc.options.output_stride << "\n";
  out << "positivity_floor = " << fmt(sc.options.positivity_floor) << "\n";

  out << "\n[claims]\n";
  out << "claims = ";
  for (std::size_t i = 0; i < sc.claims.size(); ++i)
    out << (i ? ", " : "") << sc.claims[i];
  out << "\n";
  out << "pairing = " << pairing_name(sc.pairing) << "\n";
  return out.str();
}

std::string scenario_hash(const Scenario& scenario) {
  const std::string canon = emit_scenario(scenario);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides) {
  if (overrides.empty()) return text;

  struct Override {
    std::string section, key, value;
    bool applied = false;
  };
  std::vector<Override> parsed;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("override must be section.key=value: " + o);
    const std::string path = trim(o.substr(0, eq));
    const auto dot = path.find('.');
    if (dot == std::string::npos)
      throw std::invalid_argument("override key must be section.key: " + o);
    Override ov;
    ov.section = lower(trim(path.substr(0, dot)));
    ov.key = lower(trim(path.substr(dot + 1)));
    ov.value = trim(o.substr(eq + 1));
    const auto it = known_fields().find(ov.section);
    if (it == known_fields().end() ||
        std::find(it->second.begin(), it->second.end(), ov.key) ==
            it->second.end())
      throw std::invalid_argument("override references unknown field: " + path);
    parsed.push_back(std::move(ov));
  }

  // Rewrite matching lines in place; append missing keys to their section.
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string raw;
  while (std::getline(in, raw)) lines.push_back(raw);

  std::string section;
  std::map<std::string, std::size_t> section_end;  // last line of section
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (!line.empty() && line.front() == '[' && line.back() == ']') {
      section = lower(trim(line.substr(1, line.size() - 2)));
      section_end[section] = i;
      continue;
    }
    if (!section.empty() && !line.empty()) section_end[section] = i;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = lower(trim(line.substr(0, eq)));
    for (auto& ov : parsed) {
      if (!ov.applied && ov.section == section && ov.key == key) {
        lines[i] = ov.key + " = " + ov.value;
        ov.applied = true;
      }
    }
  }
  for (auto& ov : parsed) {
    if (ov.applied) continue;
    const auto it = section_end.find(ov.section);
    const std::string new_line = ov.key + " = " + ov.value;
    if (it == section_end.end()) {
      lines.push_back("[" + ov.section + "]");
      lines.push_back(new_line);
    } else {
      lines.insert(lines.begin() + static_cast<long>(it->second) + 1,
                   new_line);
      for (auto& [sec, idx] : section_end) {
        if (idx > it->second) ++idx;
      }
    }
    ov.applied = true;
  }

  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace tklab
