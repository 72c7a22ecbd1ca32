#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tklab/integrate.hpp"

namespace tklab {

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& what, int line_no)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
};

/// Uniform bounds for randomized initial data. Seeds are mandatory:
/// reproducibility over convenience.
struct RandomSpec {
  double phase_lo = 0.0, phase_hi = 0.0;
  double temp_lo = 1.0, temp_hi = 1.0;
  std::uint64_t seed = 0;
};

enum class Pairing { none, kuramoto_shadow, tcs_reduction, twin_l1 };

struct Scenario {
  std::string name = "scenario";
  ModelParams params;
  std::optional<EnsembleState> initial;    // explicit initial data
  std::optional<RandomSpec> random_init;   // or sampled initial data
  IntegratorOptions options;
  std::vector<std::string> claims;
  Pairing pairing = Pairing::none;

  void validate() const;
  /// Initial state, sampling from random_init when present.
  EnsembleState make_initial() const;
};

/// Parses the sectioned scenario text ([model], [initial], [integrator],
/// [claims]). Matrices accept "uniform: c", "ring: base, decay" (entry =
/// base * decay^d with d the ring-lattice distance) or "rows: r11 r12; ...".
Scenario parse_scenario(const std::string& text);

/// Canonical text form; parse(emit(s)) reproduces s exactly.
std::string emit_scenario(const Scenario& scenario);

/// FNV-1a over the canonical text: stable across runs, changes iff a
/// semantic field changes.
std::string scenario_hash(const Scenario& scenario);

/// key=value overrides with keys of the form "section.field" (e.g.
/// "model.kappa1", "integrator.t_end"). Unknown keys are rejected.
std::string apply_overrides(const std::string& text,
                            const std::vector<std::string>& overrides);

std::string pairing_name(Pairing p);
Pairing pairing_from_name(const std::string& name);

}  // namespace tklab
