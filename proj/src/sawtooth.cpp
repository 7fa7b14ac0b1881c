#include "slafem/sawtooth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace slafem {

namespace {

void require_usable(const TsCurve& ts, double k0) {
  if (ts.empty()) throw std::invalid_argument("traction-separation curve is empty");
  if (!ts.complete()) {
    throw std::invalid_argument("traction-separation curve must end at zero stress");
  }
  if (!(k0 > 0.0)) throw std::invalid_argument("initial stiffness must be positive");
  if (!(ts.points().back()[0] > 0.0)) {
    throw std::invalid_argument("curve must extend to a positive opening");
  }
}

}  // namespace

void SawtoothLaw::validate() const {
  if (teeth.empty()) throw std::runtime_error("saw-tooth law has no teeth");
  for (std::size_t i = 0; i < teeth.size(); ++i) {
    if (!(teeth[i].k > 0.0)) throw std::runtime_error("tooth stiffness must be positive");
    if (i > 0 && !(teeth[i].k < teeth[i - 1].k)) {
      throw std::runtime_error("tooth stiffnesses must strictly decrease");
    }
    const bool last = (i + 1 == teeth.size());
    if (last && teeth[i].strength != 0.0) {
      throw std::runtime_error("final tooth must carry zero strength");
    }
    if (!last && !(teeth[i].strength > 0.0)) {
      throw std::runtime_error("intermediate tooth strengths must be positive");
    }
  }
}

SawtoothLaw sawtooth_stiffness_factor(const TsCurve& ts, double rho, double k0) {
  require_usable(ts, k0);
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw std::invalid_argument("stiffness ratio must lie in (0, 1)");
  }
  SawtoothLaw law;
  const double floor = kResidualStiffnessFraction * k0;
  double k = k0;
  while (k > floor) {
    const SecantHit hit = ts_strength_at_secant(ts, k);
    if (!(hit.sigma > 0.0)) break;
    law.teeth.push_back({k, hit.sigma});
    k *= rho;
  }
  law.teeth.push_back({floor, 0.0});
  law.validate();
  return law;
}

SawtoothLaw sawtooth_stress_band(const TsCurve& ts, double band, double k0) {
  require_usable(ts, k0);
  if (!(band > 0.0)) throw std::invalid_argument("stress band must be positive");

  // tooth strengths sit on the raised curve; each break drops the stress by
  // the full band at constant opening, balancing the energy error
  std::vector<std::array<double, 2>> upper = ts.points();
  for (auto& p : upper) p[1] += band / 2.0;

  SawtoothLaw law;
  const double floor = kResidualStiffnessFraction * k0;
  double k = k0;
  const std::size_t cap = 1000000;
  while (law.teeth.size() < cap) {
    const SecantHit hit = ts_strength_at_secant(std::span(upper), k);
    law.teeth.push_back({k, hit.sigma});
    const double low = ts.sigma_at(hit.w) - band / 2.0;
    if (low <= 0.0 || hit.provisional) break;
    k = low / hit.w;
    if (k <= floor) break;
  }
  if (law.teeth.size() >= cap) {
    throw std::runtime_error("stress band produced an unreasonable tooth count");
  }
  law.teeth.push_back({kResidualStiffnessFraction * k0, 0.0});
  law.validate();
  return law;
}

SawtoothLaw sawtooth_stress_decrement(const TsCurve& ts, double dsigma, double k0) {
  require_usable(ts, k0);
  if (!(dsigma > 0.0)) throw std::invalid_argument("stress decrement must be positive");

  SawtoothLaw law;
  const double floor = kResidualStiffnessFraction * k0;
  double k = k0;
  const std::size_t cap = 1000000;
  while (law.teeth.size() < cap) {
    const SecantHit hit = ts_strength_at_secant(ts, k);
    if (!(hit.sigma > 0.0)) break;
    law.teeth.push_back({k, hit.sigma});
    if (hit.sigma <= dsigma) break;  // next drop would cross zero: fully cracked
    k *= (hit.sigma - dsigma) / hit.sigma;
    if (k <= floor) break;
  }
  if (law.teeth.size() >= cap) {
    throw std::runtime_error("stress decrement produced an unreasonable tooth count");
  }
  law.teeth.push_back({kResidualStiffnessFraction * k0, 0.0});
  law.validate();
  return law;
}

}  // namespace slafem
