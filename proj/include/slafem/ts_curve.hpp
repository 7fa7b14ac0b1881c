#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace slafem {

/// Piecewise-linear traction-separation curve: (opening w in mm, cohesive
/// strength σ in MPa). Abscissae strictly increase; a curve is complete when
/// it ends at σ = 0 (fully separated).
class TsCurve {
 public:
  enum class Provenance { Prescribed, Identified };

  TsCurve() = default;
  TsCurve(std::vector<std::array<double, 2>> points, Provenance prov = Provenance::Prescribed);

  const std::vector<std::array<double, 2>>& points() const { return pts_; }
  Provenance provenance() const { return prov_; }
  bool empty() const { return pts_.empty(); }
  std::size_t size() const { return pts_.size(); }

  double w0() const { return pts_.front()[0]; }
  double f_t() const { return pts_.front()[1]; }
  double w_last() const { return pts_.back()[0]; }
  bool complete() const { return !pts_.empty() && pts_.back()[1] == 0.0; }

  /// Linear interpolation; clamps to the first/last ordinate outside the span.
  double sigma_at(double w) const;

 private:
  std::vector<std::array<double, 2>> pts_;
  Provenance prov_ = Provenance::Prescribed;
};

struct FractureEnergy {
  double value = 0.0;     // N/mm
  bool lower_bound = false;  // true when the curve is incomplete
};

/// Trapezoidal integral of σ over the curve's span.
FractureEnergy fracture_energy(const TsCurve& ts);

struct SecantHit {
  double w = 0.0;
  double sigma = 0.0;
  bool provisional = false;  // no intersection inside the curve yet; values
                             // are the last (frontier) point
};

/// First intersection of the secant line σ = k·w with the curve. If the line
/// already exceeds the first point (k ≥ σ0/w0), returns the first point.
SecantHit ts_strength_at_secant(const TsCurve& ts, double k);
SecantHit ts_strength_at_secant(std::span<const std::array<double, 2>> pts, double k);

/// Moving average over (w, σ) pairs with shrinking windows at the ends (first
/// and last point preserved), then a uniform vertical rescale of all but the
/// first ordinate so the trapezoidal integral is preserved.
TsCurve smooth_ts(const TsCurve& ts, int half_window);

/// Pointwise mean on the union grid of abscissae; each curve extends with its
/// first ordinate below its span and with zero beyond it.
TsCurve average_ts(const std::vector<TsCurve>& curves);

/// σ(w) = f_t·exp(−w·f_t/G_F), truncated at 0.01·f_t and closed by a linear
/// tail sized so the sampled curve integrates exactly to G_F.
TsCurve exponential_ts(double f_t, double G_F, int n_points = 400);

/// Linear softening from (0, f_t) to (w_c, 0).
TsCurve triangle_ts(double f_t, double w_c);

/// CSV with header "w_mm,sigma_MPa".
TsCurve read_ts_csv(const std::string& path);
void write_ts_csv(const TsCurve& ts, const std::string& path);

}  // namespace slafem
