#pragma once

#include "slafem/ts_curve.hpp"

namespace slafem {

/// Stiffness left after an integration point exhausts all teeth, as a
/// fraction of the initial penalty. Non-zero to keep the system SPD.
inline constexpr double kResidualStiffnessFraction = 1e-6;

/// Saw-tooth discretization of a softening law: a sequence of secant
/// stiffnesses (MPa/mm) with the strength at which each tooth breaks. Teeth
/// stiffnesses strictly decrease; the final entry is the fully-cracked marker
/// (residual stiffness, zero strength).
struct SawtoothLaw {
  struct Tooth {
    double k = 0.0;        // MPa/mm
    double strength = 0.0; // MPa
  };
  std::vector<Tooth> teeth;

  double k0() const { return teeth.front().k; }
  /// Throws std::runtime_error when the tooth sequence is inconsistent.
  void validate() const;
};

/// Fixed-ratio construction: k_{i+1} = rho·k_i starting from the penalty k0;
/// each tooth's strength is the curve value where its secant crosses the law.
SawtoothLaw sawtooth_stiffness_factor(const TsCurve& ts, double rho, double k0);

/// Band construction: tooth strengths sit on the raised curve σ(w)+band/2 and
/// each break drops the stress to σ(w)−band/2 at constant opening, so the
/// positive and negative area mismatches balance. `band` is absolute (MPa).
SawtoothLaw sawtooth_stress_band(const TsCurve& ts, double band, double k0);

/// Walks the curve with the same reduction the inverse analysis applies:
/// ω = (σ−dsigma)/σ per tooth, next strength read at the new secant. Used to
/// replay identified curves forward.
SawtoothLaw sawtooth_stress_decrement(const TsCurve& ts, double dsigma, double k0);

}  // namespace slafem
