#include "slafem/loading_curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "slafem/outputs.hpp"

namespace slafem {

LoadingCurve::LoadingCurve(std::vector<std::array<double, 2>> points) {
  pts_.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw std::invalid_argument("non-finite loading record point");
    }
    if (!pts_.empty() && pts_.back() == p) continue;  // collapse exact repeats
    pts_.push_back(p);
  }
  double c = 0.0, r = 0.0;
  for (const auto& p : pts_) {
    c = std::max(c, std::abs(p[0]));
    r = std::max(r, std::abs(p[1]));
  }
  cscale_ = c > 0.0 ? c : 1.0;
  rscale_ = r > 0.0 ? r : 1.0;

  arc_.resize(pts_.size(), 0.0);
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    const double dx = (pts_[i][0] - pts_[i - 1][0]) / cscale_;
    const double dy = (pts_[i][1] - pts_[i - 1][1]) / rscale_;
    arc_[i] = arc_[i - 1] + std::hypot(dx, dy);
  }
}

std::array<double, 2> LoadingCurve::normalized(std::size_t i) const {
  return {pts_[i][0] / cscale_, pts_[i][1] / rscale_};
}

double unit_scale(const std::string& unit) {
  if (unit == "N" || unit == "mm") return 1.0;
  if (unit == "kN") return 1e3;
  if (unit == "MN") return 1e6;
  if (unit == "m") return 1e3;
  if (unit == "um") return 1e-3;
  throw std::invalid_argument("unknown unit '" + unit + "' (use N, kN, MN, mm, m, um)");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) {
    const auto from = cell.find_first_not_of(" \t\r");
    if (from == std::string::npos) {
      cells.push_back("");
      continue;
    }
    const auto to = cell.find_last_not_of(" \t\r");
    cells.push_back(cell.substr(from, to - from + 1));
  }
  return cells;
}

}  // namespace

LoadingCurve load_curve_csv(const std::string& path, const CurveColumns& cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty record file '" + path + "'");

  const std::vector<std::string> header = split_csv(line);
  int ic = -1, ir = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == cols.control) ic = static_cast<int>(i);
    if (header[i] == cols.response) ir = static_cast<int>(i);
  }
  if (ic < 0) throw std::runtime_error("record has no column '" + cols.control + "'");
  if (ir < 0) throw std::runtime_error("record has no column '" + cols.response + "'");

  std::vector<std::array<double, 2>> pts;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv(line);
    if (static_cast<int>(cells.size()) <= std::max(ic, ir)) {
      throw std::runtime_error("short record line '" + line + "'");
    }
    try {
      pts.push_back({std::stod(cells[ic]) * cols.control_scale,
                     std::stod(cells[ir]) * cols.response_scale});
    } catch (const std::exception&) {
      throw std::runtime_error("bad number in record line '" + line + "'");
    }
  }
  if (pts.size() < 2) throw std::runtime_error("record needs at least two points");
  return LoadingCurve(std::move(pts));
}

void write_curve_csv(const std::vector<std::array<double, 2>>& points,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write record file '" + path + "'");
  out << "control,response\n";
  for (const auto& p : points) {
    out << format_double(p[0]) << "," << format_double(p[1]) << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

LoadingCurve decimate_curve(const LoadingCurve& curve, int n) {
  const int size = static_cast<int>(curve.size());
  if (n >= size) return curve;
  if (n < 2) throw std::invalid_argument("decimation needs at least two points");

  const std::vector<double>& arc = curve.arc();
  const auto& pts = curve.points();
  const double total = curve.total_length();
  const double spacing = total / (n - 1);

  // One disjoint half-open arc window per interior target, j = 1..n-2. Where
  // the record oscillates, the window contributes its highest-control local
  // peak: the sample rides the envelope of pre-event states instead of
  // aliasing the event oscillation into the kept polyline. On monotone
  // stretches it falls back to the vertex nearest the target, and a window
  // with no vertex inside (a long straight stretch) samples the polyline at
  // its centre, which adds no geometry on a straight segment.
  std::vector<int> best(n, -1);   // highest-control local peak in the window
  std::vector<int> nearest(n, -1);  // fallback: vertex closest to the target
  for (int i = 1; i + 1 < size; ++i) {
    const int j = static_cast<int>(std::floor(arc[i] / spacing + 0.5));
    if (j < 1 || j > n - 2) continue;  // endpoint territory, pinned below
    const bool peak = pts[i][0] >= pts[i - 1][0] && pts[i][0] > pts[i + 1][0];
    if (peak && (best[j] < 0 || pts[i][0] > pts[best[j]][0])) best[j] = i;
    if (nearest[j] < 0 ||
        std::abs(arc[i] - j * spacing) < std::abs(arc[nearest[j]] - j * spacing)) {
      nearest[j] = i;
    }
  }
  for (int j = 1; j <= n - 2; ++j) {
    if (best[j] < 0) best[j] = nearest[j];
  }

  // The first vertex after the origin is the record's proportional limit; a
  // window that swallowed it under later, higher-control vertices would clip
  // that knee, so it displaces its window's pick.
  {
    const int jc = static_cast<int>(std::floor(arc[1] / spacing + 0.5));
    if (jc >= 1 && jc <= n - 2) best[jc] = 1;
  }

  std::vector<std::array<double, 2>> out;
  out.reserve(n);
  out.push_back(pts[0]);
  std::size_t seg = 0;
  for (int j = 1; j <= n - 2; ++j) {
    if (best[j] >= 0) {
      out.push_back(pts[best[j]]);
      continue;
    }
    const double target = j * spacing;
    while (seg + 2 < arc.size() && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double t = len > 0.0 ? (target - arc[seg]) / len : 0.0;
    out.push_back({pts[seg][0] + t * (pts[seg + 1][0] - pts[seg][0]),
                   pts[seg][1] + t * (pts[seg + 1][1] - pts[seg][1])});
  }
  out.push_back(pts[size - 1]);
  return LoadingCurve(std::move(out));
}

}  // namespace slafem
