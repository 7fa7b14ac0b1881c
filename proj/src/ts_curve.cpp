#include "slafem/ts_curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "slafem/outputs.hpp"

namespace slafem {

TsCurve::TsCurve(std::vector<std::array<double, 2>> points, Provenance prov)
    : pts_(std::move(points)), prov_(prov) {
  if (pts_.empty()) throw std::invalid_argument("traction-separation curve needs points");
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (!std::isfinite(pts_[i][0]) || !std::isfinite(pts_[i][1])) {
      throw std::invalid_argument("non-finite traction-separation point");
    }
    if (pts_[i][0] < 0.0 || pts_[i][1] < 0.0) {
      throw std::invalid_argument("traction-separation points must be non-negative");
    }
    if (i > 0 && !(pts_[i][0] > pts_[i - 1][0])) {
      throw std::invalid_argument("traction-separation openings must strictly increase");
    }
  }
}

double TsCurve::sigma_at(double w) const {
  if (pts_.empty()) throw std::logic_error("empty traction-separation curve");
  if (w <= pts_.front()[0]) return pts_.front()[1];
  if (w >= pts_.back()[0]) return pts_.back()[1];
  auto it = std::upper_bound(pts_.begin(), pts_.end(), w,
                             [](double v, const std::array<double, 2>& p) { return v < p[0]; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (w - a[0]) / (b[0] - a[0]);
  return a[1] + t * (b[1] - a[1]);
}

FractureEnergy fracture_energy(const TsCurve& ts) {
  FractureEnergy e;
  const auto& p = ts.points();
  for (std::size_t i = 1; i < p.size(); ++i) {
    e.value += 0.5 * (p[i][1] + p[i - 1][1]) * (p[i][0] - p[i - 1][0]);
  }
  e.lower_bound = !ts.complete();
  return e;
}

SecantHit ts_strength_at_secant(std::span<const std::array<double, 2>> pts, double k) {
  if (pts.empty()) throw std::invalid_argument("secant lookup on an empty curve");
  if (!(k > 0.0)) throw std::invalid_argument("secant stiffness must be positive");
  if (k * pts.front()[0] >= pts.front()[1]) {
    return {pts.front()[0], pts.front()[1], false};
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double f1 = k * pts[i + 1][0] - pts[i + 1][1];
    if (f1 < 0.0) continue;  // line still below the curve at the segment end
    // first sign change: solve k·w = σ_a + s·(w − w_a) on this segment
    const double wa = pts[i][0], sa = pts[i][1];
    const double s = (pts[i + 1][1] - sa) / (pts[i + 1][0] - wa);
    const double w = (sa - s * wa) / (k - s);
    return {w, k * w, false};
  }
  return {pts.back()[0], pts.back()[1], true};  // frontier of an unfinished curve
}

SecantHit ts_strength_at_secant(const TsCurve& ts, double k) {
  return ts_strength_at_secant(std::span(ts.points()), k);
}

TsCurve smooth_ts(const TsCurve& ts, int half_window) {
  if (half_window < 0) throw std::invalid_argument("half window must be non-negative");
  const auto& p = ts.points();
  const int n = static_cast<int>(p.size());
  if (half_window == 0 || n < 3) return ts;

  std::vector<std::array<double, 2>> out(n);
  for (int i = 0; i < n; ++i) {
    const int h = std::min({half_window, i, n - 1 - i});  // shrink toward the ends
    double w = 0.0, s = 0.0;
    for (int j = i - h; j <= i + h; ++j) {
      w += p[j][0];
      s += p[j][1];
    }
    out[i] = {w / (2 * h + 1), s / (2 * h + 1)};
  }

  // rescale σ[1..] so the trapezoidal area matches the input curve; the area
  // is affine in the scale factor: E(c) = A + c·B
  const double target = fracture_energy(ts).value;
  double A = 0.5 * out[0][1] * (out[1][0] - out[0][0]);
  double B = 0.5 * out[1][1] * (out[1][0] - out[0][0]);
  for (int i = 1; i + 1 < n; ++i) {
    B += 0.5 * (out[i][1] + out[i + 1][1]) * (out[i + 1][0] - out[i][0]);
  }
  if (B > 0.0) {
    const double c = (target - A) / B;
    if (c > 0.0) {
      for (int i = 1; i < n; ++i) out[i][1] = std::max(0.0, c * out[i][1]);
    }
  }
  return TsCurve(std::move(out), ts.provenance());
}

TsCurve average_ts(const std::vector<TsCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("no curves to average");
  if (curves.size() == 1) return curves.front();

  std::vector<double> grid;
  double w_max = 0.0;
  for (const TsCurve& c : curves) {
    for (const auto& p : c.points()) grid.push_back(p[0]);
    w_max = std::max(w_max, c.w_last());
  }
  std::sort(grid.begin(), grid.end());
  const double tol = 1e-12 * w_max;
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [tol](double a, double b) { return b - a <= tol; }),
             grid.end());

  std::vector<std::array<double, 2>> out;
  out.reserve(grid.size());
  for (double w : grid) {
    double s = 0.0;
    for (const TsCurve& c : curves) {
      if (w > c.w_last() + tol) continue;  // beyond a finished curve: zero
      s += c.sigma_at(w);
    }
    out.push_back({w, s / curves.size()});
  }
  return TsCurve(std::move(out), TsCurve::Provenance::Identified);
}

TsCurve exponential_ts(double f_t, double G_F, int n_points) {
  if (!(f_t > 0.0) || !(G_F > 0.0)) throw std::invalid_argument("f_t and G_F must be positive");
  if (n_points < 3) throw std::invalid_argument("too few sample points");
  const double w_char = G_F / f_t;
  const double w_trunc = w_char * std::log(100.0);  // σ down to 1% of f_t
  std::vector<std::array<double, 2>> pts(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double w = w_trunc * i / (n_points - 1);
    pts[i] = {w, f_t * std::exp(-w / w_char)};
  }
  double area = 0.0;
  for (int i = 1; i < n_points; ++i) {
    area += 0.5 * (pts[i][1] + pts[i - 1][1]) * (pts[i][0] - pts[i - 1][0]);
  }
  if (area >= G_F) throw std::invalid_argument("sampling too coarse to close the tail exactly");
  // linear tail sized so the total area is exactly G_F
  const double w_end = w_trunc + 2.0 * (G_F - area) / pts.back()[1];
  pts.push_back({w_end, 0.0});
  return TsCurve(std::move(pts), TsCurve::Provenance::Prescribed);
}

TsCurve triangle_ts(double f_t, double w_c) {
  if (!(f_t > 0.0) || !(w_c > 0.0)) throw std::invalid_argument("f_t and w_c must be positive");
  return TsCurve({{0.0, f_t}, {w_c, 0.0}}, TsCurve::Provenance::Prescribed);
}

TsCurve read_ts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty curve file '" + path + "'");
  std::vector<std::array<double, 2>> pts;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double w, s;
    if (!(ls >> w >> s)) throw std::runtime_error("bad curve line '" + line + "'");
    pts.push_back({w, s});
  }
  return TsCurve(std::move(pts), TsCurve::Provenance::Prescribed);
}

void write_ts_csv(const TsCurve& ts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write curve file '" + path + "'");
  out << "w_mm,sigma_MPa\n";
  for (const auto& p : ts.points()) {
    out << format_double(p[0]) << "," << format_double(p[1]) << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace slafem
