#pragma once

#include <array>
#include <string>
#include <vector>

namespace slafem {

/// Measured or synthetic loading record: ordered (control, response) pairs,
/// e.g. (load in N, CMOD in mm). Consecutive duplicate points are collapsed.
///
/// Because the two axes carry different units, all geometry on the curve
/// (arc length, intersections, decimation) is done in normalized coordinates:
/// each axis divided by its absolute maximum over the curve.
class LoadingCurve {
 public:
  LoadingCurve() = default;
  explicit LoadingCurve(std::vector<std::array<double, 2>> points);

  const std::vector<std::array<double, 2>>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }

  double control_max() const { return cscale_; }   // max |control|
  double response_max() const { return rscale_; }  // max |response|

  /// Cumulative normalized arc length per point; back() is the total.
  const std::vector<double>& arc() const { return arc_; }
  double total_length() const { return arc_.empty() ? 0.0 : arc_.back(); }

  /// Normalized coordinates of point i.
  std::array<double, 2> normalized(std::size_t i) const;

 private:
  std::vector<std::array<double, 2>> pts_;
  std::vector<double> arc_;
  double cscale_ = 1.0;
  double rscale_ = 1.0;
};

struct CurveColumns {
  std::string control = "control";
  std::string response = "response";
  double control_scale = 1.0;   // applied multiplicatively after parsing
  double response_scale = 1.0;
};

/// Unit name → factor to N / mm (N, kN, MN, mm, m, um). Throws on unknown names.
double unit_scale(const std::string& unit);

/// CSV reader with a header row; columns selected by name.
LoadingCurve load_curve_csv(const std::string& path, const CurveColumns& cols = {});

void write_curve_csv(const std::vector<std::array<double, 2>>& points,
                     const std::string& path);

/// Keeps an arc-length-uniform subset of the original points, endpoints
/// always included. n >= size returns the curve unchanged.
LoadingCurve decimate_curve(const LoadingCurve& curve, int n);

}  // namespace slafem
