#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slafem/fem.hpp"
#include "slafem/loading_curve.hpp"
#include "slafem/sawtooth.hpp"

namespace slafem {

/// Scaled linear analysis, one damage event per step: solve under the
/// reference load, scale so the most critical interface ip just reaches its
/// strength, record the scaled monitors, then move that ip to its next tooth.

struct ForwardConfig {
  double g0 = 0.0;  // shear penalty MPa/mm; 0 → 1e4 · k0 of the law
  int max_events = 100000;
  double response_limit = std::numeric_limits<double>::infinity();
  double control_limit = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  double tie_tol = 1e-12;  // relative λ window treated as a tie
};

struct EventRecord {
  int step = 0;
  int ip = -1;
  double lambda = 0.0;
  double control = 0.0;
  double response = 0.0;
  double k_after = 0.0;
  double strength_after = 0.0;
};

struct ForwardResult {
  std::vector<std::array<double, 2>> curve;  // scaled (control, response), one per event
  std::vector<EventRecord> events;
  std::string termination;  // all_cracked | no_tensile_ip | max_events |
                            // response_limit | control_limit
};

/// Most critical ip: minimum strength/σ over entries with σ > 0; ties within
/// tie_tol (relative) resolved by a draw from rng. Callers exclude an ip by
/// passing a non-positive stress. Returns nothing when no ip qualifies.
std::optional<std::pair<int, double>> critical_event(std::span<const double> sigma,
                                                     std::span<const double> strength,
                                                     std::mt19937_64& rng,
                                                     double tie_tol = 1e-12);

/// All interface ips share `law`.
ForwardResult run_forward(const Mesh& mesh, const std::vector<Material>& materials,
                          const SawtoothLaw& law, const ForwardConfig& cfg = {});

/// Per-ip laws (size = interface ip count), e.g. replays of identified curves.
ForwardResult run_forward(const Mesh& mesh, const std::vector<Material>& materials,
                          const std::vector<SawtoothLaw>& laws, const ForwardConfig& cfg = {});

}  // namespace slafem
