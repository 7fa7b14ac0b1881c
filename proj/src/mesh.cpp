#include "slafem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace slafem {

namespace {

double dist(const Node& a, const Node& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// det of the bilinear map Jacobian at (xi, eta)
double quad_jacobian(const Mesh& m, const QuadElement& q, double xi, double eta) {
  static const double dxi_sign[4] = {-1, 1, 1, -1};
  static const double deta_sign[4] = {-1, -1, 1, 1};
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  for (int i = 0; i < 4; ++i) {
    const Node& n = m.nodes[q.nodes[i]];
    double dxi = 0.25 * dxi_sign[i] * (1.0 + deta_sign[i] * eta);
    double deta = 0.25 * deta_sign[i] * (1.0 + dxi_sign[i] * xi);
    j11 += dxi * n.x;
    j12 += dxi * n.y;
    j21 += deta * n.x;
    j22 += deta * n.y;
  }
  return j11 * j22 - j12 * j21;
}

void check_node_ref(const Mesh& m, int node, const char* what) {
  if (node < 0 || node >= static_cast<int>(m.nodes.size())) {
    throw std::runtime_error(std::string(what) + " references missing node " +
                             std::to_string(node));
  }
}

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

void Mesh::validate() const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id != static_cast<int>(i)) {
      throw std::runtime_error("node ids must be dense and ordered");
    }
    if (!std::isfinite(nodes[i].x) || !std::isfinite(nodes[i].y)) {
      throw std::runtime_error("non-finite node coordinate");
    }
  }
  if (!(thickness > 0.0)) throw std::runtime_error("thickness must be positive");

  const double g = 1.0 / std::sqrt(3.0);
  for (std::size_t e = 0; e < quads.size(); ++e) {
    const QuadElement& q = quads[e];
    if (q.id != static_cast<int>(e)) throw std::runtime_error("quad ids must be dense");
    for (int n : q.nodes) check_node_ref(*this, n, "quad");
    for (double xi : {-g, g}) {
      for (double eta : {-g, g}) {
        if (quad_jacobian(*this, q, xi, eta) <= 0.0) {
          throw std::runtime_error("quad " + std::to_string(q.id) +
                                   " is degenerate or inverted");
        }
      }
    }
  }

  // interface pairs must coincide and chain simply (each pair in <= 2 elements)
  std::map<EdgeKey, int> pair_use;
  for (std::size_t e = 0; e < interfaces.size(); ++e) {
    const InterfaceElement& f = interfaces[e];
    if (f.id != static_cast<int>(e)) throw std::runtime_error("interface ids must be dense");
    for (int n : f.nodes) check_node_ref(*this, n, "interface");
    if (dist(nodes[f.nodes[0]], nodes[f.nodes[2]]) > 1e-12 ||
        dist(nodes[f.nodes[1]], nodes[f.nodes[3]]) > 1e-12) {
      throw std::runtime_error("interface " + std::to_string(f.id) +
                               " node pairs do not coincide");
    }
    if (dist(nodes[f.nodes[0]], nodes[f.nodes[1]]) <= 0.0) {
      throw std::runtime_error("interface " + std::to_string(f.id) + " has zero length");
    }
    ++pair_use[edge_key(f.nodes[0], f.nodes[2])];
    ++pair_use[edge_key(f.nodes[1], f.nodes[3])];
  }
  for (const auto& [key, count] : pair_use) {
    if (count > 2) throw std::runtime_error("interface path branches at a node pair");
  }

  for (const Support& s : supports) check_node_ref(*this, s.node, "support");
  for (const PointLoad& l : loads) check_node_ref(*this, l.node, "load");
  for (const Monitor* m : {&control, &response}) {
    // a fully default monitor just means "not set yet" (e.g. a bare grid)
    if (m->name.empty() && m->terms.empty()) continue;
    if (m->terms.empty()) throw std::runtime_error("monitor '" + m->name + "' has no terms");
    for (const Monitor::Term& t : m->terms) check_node_ref(*this, t.node, "monitor");
  }
}

Mesh make_grid(const std::vector<double>& xs, const std::vector<double>& ys,
               double thickness, int material_id) {
  if (xs.size() < 2 || ys.size() < 2) throw std::invalid_argument("grid needs >= 2 coordinates per axis");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("grid x coordinates must increase");
  }
  for (std::size_t i = 1; i < ys.size(); ++i) {
    if (!(ys[i] > ys[i - 1])) throw std::invalid_argument("grid y coordinates must increase");
  }
  Mesh m;
  m.thickness = thickness;
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  m.nodes.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.nodes.push_back({j * nx + i, xs[i], ys[j]});
    }
  }
  m.quads.reserve(static_cast<std::size_t>(nx - 1) * (ny - 1));
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      QuadElement q;
      q.id = static_cast<int>(m.quads.size());
      q.nodes = {j * nx + i, j * nx + i + 1, (j + 1) * nx + i + 1, (j + 1) * nx + i};
      q.material_id = material_id;
      m.quads.push_back(q);
    }
  }
  return m;
}

namespace {

struct PathFrame {
  Polyline pts;
  std::vector<double> arc;  // cumulative
  double total = 0.0;
};

PathFrame make_frame(const Polyline& polyline) {
  PathFrame f;
  f.pts = polyline;
  f.arc.resize(polyline.size(), 0.0);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    double d = std::hypot(polyline[i][0] - polyline[i - 1][0],
                          polyline[i][1] - polyline[i - 1][1]);
    if (d <= 0.0) throw std::invalid_argument("polyline has a zero-length segment");
    f.arc[i] = f.arc[i - 1] + d;
  }
  f.total = f.arc.back();
  return f;
}

// arc-length of the projection if the point lies on the polyline, else nothing
std::optional<double> project_onto(const PathFrame& f, double x, double y, double tol) {
  for (std::size_t i = 0; i + 1 < f.pts.size(); ++i) {
    double ax = f.pts[i][0], ay = f.pts[i][1];
    double bx = f.pts[i + 1][0], by = f.pts[i + 1][1];
    double dx = bx - ax, dy = by - ay;
    double len = std::hypot(dx, dy);
    double t = ((x - ax) * dx + (y - ay) * dy) / (len * len);
    if (t < -tol / len || t > 1.0 + tol / len) continue;
    double px = ax + t * dx, py = ay + t * dy;
    if (std::hypot(x - px, y - py) <= tol) {
      return f.arc[i] + std::clamp(t, 0.0, 1.0) * len;
    }
  }
  return std::nullopt;
}

}  // namespace

Mesh insert_cohesive_path(const Mesh& mesh, const Polyline& polyline,
                          double traction_free_length, std::map<int, int>* pair_map_out) {
  if (polyline.size() < 2) return mesh;
  Mesh m = mesh;
  if (!m.interfaces.empty()) {
    throw std::invalid_argument("mesh already contains an interface path");
  }

  double min_x = std::numeric_limits<double>::max(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const Node& n : m.nodes) {
    min_x = std::min(min_x, n.x); max_x = std::max(max_x, n.x);
    min_y = std::min(min_y, n.y); max_y = std::max(max_y, n.y);
  }
  const double tol = 1e-9 * std::max(max_x - min_x, max_y - min_y);

  PathFrame frame = make_frame(polyline);

  // chain of mesh nodes along the path, ordered by arc length
  std::vector<std::pair<double, int>> chain;  // (s, node)
  for (const Node& n : m.nodes) {
    if (auto s = project_onto(frame, n.x, n.y, tol)) chain.push_back({*s, n.id});
  }
  std::sort(chain.begin(), chain.end());
  if (chain.size() < 2) throw std::invalid_argument("path does not follow mesh nodes");
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i].first - chain[i - 1].first <= tol) {
      throw std::invalid_argument("path visits coincident nodes (self-intersecting?)");
    }
  }
  const Node& first = m.nodes[chain.front().second];
  const Node& last = m.nodes[chain.back().second];
  if (std::hypot(first.x - polyline.front()[0], first.y - polyline.front()[1]) > tol ||
      std::hypot(last.x - polyline.back()[0], last.y - polyline.back()[1]) > tol) {
    throw std::invalid_argument("path endpoints must be mesh nodes");
  }

  // adjacency: edges and node → quads
  std::map<EdgeKey, int> edge_use;
  std::unordered_map<int, std::vector<int>> node_quads;
  for (const QuadElement& q : m.quads) {
    for (int k = 0; k < 4; ++k) {
      ++edge_use[edge_key(q.nodes[k], q.nodes[(k + 1) % 4])];
      node_quads[q.nodes[k]].push_back(q.id);
    }
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    auto it = edge_use.find(edge_key(chain[i].second, chain[i + 1].second));
    if (it == edge_use.end()) {
      throw std::invalid_argument("path does not follow element edges");
    }
  }
  std::set<int> boundary_nodes;
  for (const auto& [key, count] : edge_use) {
    if (count == 1) { boundary_nodes.insert(key.a); boundary_nodes.insert(key.b); }
  }

  // which chain nodes split: interior always, endpoints only on the boundary
  std::vector<int> chain_nodes;
  for (const auto& [s, n] : chain) chain_nodes.push_back(n);
  std::map<int, int> dup;  // original → duplicate (plus face)
  for (std::size_t i = 0; i < chain_nodes.size(); ++i) {
    bool endpoint = (i == 0 || i + 1 == chain_nodes.size());
    if (endpoint && !boundary_nodes.count(chain_nodes[i])) continue;
    int orig = chain_nodes[i];
    int copy = static_cast<int>(m.nodes.size());
    m.nodes.push_back({copy, m.nodes[orig].x, m.nodes[orig].y});
    dup[orig] = copy;

    // forward path direction at this node (reversed fallback at the last node)
    const Node& a = m.nodes[chain_nodes[i]];
    double fx, fy;
    if (i + 1 < chain_nodes.size()) {
      fx = m.nodes[chain_nodes[i + 1]].x - a.x;
      fy = m.nodes[chain_nodes[i + 1]].y - a.y;
    } else {
      fx = a.x - m.nodes[chain_nodes[i - 1]].x;
      fy = a.y - m.nodes[chain_nodes[i - 1]].y;
    }

    for (int qid : node_quads[orig]) {
      QuadElement& q = m.quads[qid];
      // classify by the chain edge this quad shares, so both of its endpoints
      // agree even where the path bends
      double tx = fx, ty = fy;
      for (int n : q.nodes) {
        if (i + 1 < chain_nodes.size() && n == chain_nodes[i + 1]) {
          tx = m.nodes[n].x - a.x;
          ty = m.nodes[n].y - a.y;
          break;
        }
        if (i > 0 && n == chain_nodes[i - 1]) {
          tx = a.x - m.nodes[n].x;
          ty = a.y - m.nodes[n].y;
          break;
        }
      }
      double cx = 0, cy = 0;
      for (int n : q.nodes) { cx += m.nodes[n].x; cy += m.nodes[n].y; }
      cx = cx / 4.0 - a.x;
      cy = cy / 4.0 - a.y;
      double side = tx * cy - ty * cx;  // >0: left of the path = plus face
      if (side > 0.0) {
        for (int& n : q.nodes) {
          if (n == orig) n = copy;
        }
      }
    }
  }

  auto plus_of = [&](int n) {
    auto it = dup.find(n);
    return it == dup.end() ? n : it->second;
  };
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    double mid = 0.5 * (chain[i].first + chain[i + 1].first);
    if (mid <= traction_free_length + tol) continue;
    InterfaceElement f;
    f.id = static_cast<int>(m.interfaces.size());
    f.nodes = {chain_nodes[i], chain_nodes[i + 1],
               plus_of(chain_nodes[i]), plus_of(chain_nodes[i + 1])};
    m.interfaces.push_back(f);
  }

  if (pair_map_out) *pair_map_out = dup;
  return m;
}

namespace {

std::vector<double> linspace(double a, double b, int n_cells) {
  std::vector<double> v(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) v[i] = a + (b - a) * i / n_cells;
  v.front() = a;
  v.back() = b;
  return v;
}

int find_node(const Mesh& m, double x, double y, double tol) {
  for (const Node& n : m.nodes) {
    if (std::hypot(n.x - x, n.y - y) <= tol) return n.id;
  }
  throw std::runtime_error("no node at requested position");
}

// drops the listed quads and every node that becomes unreferenced
Mesh remove_quads(const Mesh& mesh, const std::set<int>& drop) {
  Mesh m;
  m.thickness = mesh.thickness;
  std::vector<int> remap(mesh.nodes.size(), -1);
  for (const QuadElement& q : mesh.quads) {
    if (drop.count(q.id)) continue;
    for (int n : q.nodes) remap[n] = 0;
  }
  for (const Node& n : mesh.nodes) {
    if (remap[n.id] == 0) {
      remap[n.id] = static_cast<int>(m.nodes.size());
      m.nodes.push_back({remap[n.id], n.x, n.y});
    }
  }
  for (const QuadElement& q : mesh.quads) {
    if (drop.count(q.id)) continue;
    QuadElement c = q;
    c.id = static_cast<int>(m.quads.size());
    for (int& n : c.nodes) n = remap[n];
    m.quads.push_back(c);
  }
  return m;
}

}  // namespace

Mesh generate_notched_beam(double span, double depth, double thickness,
                           double notch_depth, double notch_width,
                           double elem_size, const BeamOptions& opt) {
  if (span <= 0 || depth <= 0 || thickness <= 0 || elem_size <= 0) {
    throw std::invalid_argument("beam dimensions and element size must be positive");
  }
  if (notch_depth < 0 || notch_depth >= depth) {
    throw std::invalid_argument("notch depth must lie inside the beam depth");
  }
  if (notch_width < 0 || notch_width >= span) {
    throw std::invalid_argument("notch width must lie inside the span");
  }

  int nx = std::max(2, static_cast<int>(std::lround(span / elem_size)));
  if (nx % 2) ++nx;  // a grid line at mid-span
  int ny = std::max(1, static_cast<int>(std::lround(depth / elem_size)));
  const double dy = depth / ny;
  const int n_notch = std::clamp(static_cast<int>(std::lround(notch_depth / dy)), 0, ny - 1);
  if (ny - n_notch < 3) {
    throw std::invalid_argument("ligament must host at least 3 interface elements");
  }

  Mesh m = make_grid(linspace(0, span, nx), linspace(0, depth, ny), thickness);
  const double mid = span / 2.0;
  const double tol = 1e-9 * std::max(span, depth);
  const double tip = n_notch * dy;

  double path_from = 0.0;
  double slit = tip;
  if (notch_width > 0.0 && n_notch > 0) {
    const double dx = span / nx;
    // a symmetric void is an even number of element columns wide
    const int half_cols = std::max(1, static_cast<int>(std::lround(notch_width / (2.0 * dx))));
    std::set<int> drop;
    for (const QuadElement& q : m.quads) {
      double cx = 0, cy = 0;
      for (int n : q.nodes) { cx += m.nodes[n].x; cy += m.nodes[n].y; }
      cx /= 4.0; cy /= 4.0;
      if (cy < tip && std::abs(cx - mid) < half_cols * dx - tol) {
        drop.insert(q.id);
      }
    }
    if (!drop.empty()) {
      m = remove_quads(m, drop);
      path_from = tip;  // path starts at the notch root, on the void boundary
      slit = 0.0;
    }
  }

  std::map<int, int> dup;
  m = insert_cohesive_path(m, {{mid, path_from}, {mid, depth}}, slit, &dup);

  m.supports.push_back({find_node(m, 0, 0, tol), Dof::X});
  m.supports.push_back({find_node(m, 0, 0, tol), Dof::Y});
  m.supports.push_back({find_node(m, span, 0, tol), Dof::Y});

  // the mid-span top pair shares the load; the path runs bottom → top so the
  // duplicate (plus face) is the left half
  int top_m = find_node(m, mid, depth, tol);
  if (dup.count(top_m) == 0) {
    // find_node may have returned the duplicate; resolve via the map
    for (const auto& [orig, copy] : dup) {
      if (copy == top_m) { top_m = orig; break; }
    }
  }
  const int top_p = dup.at(top_m);
  m.loads.push_back({top_m, Dof::Y, -opt.load / 2.0});
  m.loads.push_back({top_p, Dof::Y, -opt.load / 2.0});

  m.control.name = "load";
  m.control.kind = Monitor::Kind::Load;
  m.control.terms = {{top_m, Dof::Y, -1.0}, {top_p, Dof::Y, -1.0}};

  m.response.name = opt.response == ResponseKind::Cmod ? "cmod" : "deflection";
  m.response.kind = Monitor::Kind::Disp;
  if (opt.response == ResponseKind::Cmod) {
    if (notch_width > 0.0 && slit == 0.0) {
      // nearest bottom nodes flanking the void are its mouth corners
      double best = std::numeric_limits<double>::max();
      int right = -1;
      for (const Node& n : m.nodes) {
        if (std::abs(n.y) < tol && n.x > mid + tol && n.x - mid < best) {
          best = n.x - mid; right = n.id;
        }
      }
      int left = find_node(m, mid - best, 0.0, tol);
      m.response.terms = {{right, Dof::X, 1.0}, {left, Dof::X, -1.0}};
    } else {
      int bot_m = find_node(m, mid, 0.0, tol);
      if (dup.count(bot_m) == 0) {
        for (const auto& [orig, copy] : dup) {
          if (copy == bot_m) { bot_m = orig; break; }
        }
      }
      m.response.terms = {{bot_m, Dof::X, 1.0}, {dup.at(bot_m), Dof::X, -1.0}};
    }
  } else {
    m.response.terms = {{top_m, Dof::Y, -0.5}, {top_p, Dof::Y, -0.5}};
  }

  m.validate();
  return m;
}

Mesh generate_compact_tension(double width, double height, double thickness,
                              double notch_length, double elem_size_fine,
                              double elem_size_coarse, const CtOptions& opt) {
  if (width <= 0 || height <= 0 || thickness <= 0 || elem_size_fine <= 0 ||
      elem_size_coarse <= 0) {
    throw std::invalid_argument("plate dimensions and element sizes must be positive");
  }
  if (notch_length <= 0 || notch_length >= width) {
    throw std::invalid_argument("notch length must lie inside the plate width");
  }
  const int n_lig = static_cast<int>(std::lround((width - notch_length) / elem_size_fine));
  if (n_lig < 3) {
    throw std::invalid_argument("ligament must host at least 3 interface elements");
  }

  // x: coarse over the notch, fine over the ligament
  const int n_notch = std::max(1, static_cast<int>(std::lround(notch_length / elem_size_coarse)));
  std::vector<double> xs = linspace(0, notch_length, n_notch);
  std::vector<double> fine = linspace(notch_length, width, n_lig);
  xs.insert(xs.end(), fine.begin() + 1, fine.end());

  // y: fine band around the path at mid-height, coarse toward the faces
  const double mid = height / 2.0;
  const double band = std::min(mid / 2.0, std::max(3.0 * elem_size_fine, mid / 5.0));
  const int nf = std::max(1, static_cast<int>(std::lround(band / elem_size_fine)));
  const double band_snap = nf * elem_size_fine;
  const int nc = std::max(1, static_cast<int>(std::lround((mid - band_snap) / elem_size_coarse)));
  std::vector<double> upper = linspace(mid, mid + band_snap, nf);
  std::vector<double> rest = linspace(mid + band_snap, height, nc);
  upper.insert(upper.end(), rest.begin() + 1, rest.end());
  std::vector<double> ys;
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) ys.push_back(2.0 * mid - *it);
  ys.insert(ys.end(), upper.begin() + 1, upper.end());

  Mesh m = make_grid(xs, ys, thickness);
  const double tol = 1e-9 * std::max(width, height);

  std::map<int, int> dup;
  m = insert_cohesive_path(m, {{0.0, mid}, {width, mid}}, notch_length, &dup);

  auto nearest = [&](const std::vector<double>& v, double target) {
    double best = v.front();
    for (double x : v) {
      if (std::abs(x - target) < std::abs(best - target)) best = x;
    }
    return best;
  };
  const double pin_x = nearest(xs, notch_length / 2.0);
  const double pin_dy = nearest(ys, mid + mid / 2.0) - mid;
  const int pin_top = find_node(m, pin_x, mid + pin_dy, tol);
  const int pin_bot = find_node(m, pin_x, mid - pin_dy, tol);

  m.supports.push_back({pin_top, Dof::X});
  m.supports.push_back({pin_bot, Dof::X});
  m.supports.push_back({pin_bot, Dof::Y});
  m.loads.push_back({pin_top, Dof::Y, opt.load});

  m.control.name = "load";
  m.control.kind = Monitor::Kind::Load;
  m.control.terms = {{pin_top, Dof::Y, 1.0}};

  int mouth_m = find_node(m, 0.0, mid, tol);
  if (dup.count(mouth_m) == 0) {
    for (const auto& [orig, copy] : dup) {
      if (copy == mouth_m) { mouth_m = orig; break; }
    }
  }
  m.response.name = "cmod";
  m.response.kind = Monitor::Kind::Disp;
  m.response.terms = {{dup.at(mouth_m), Dof::Y, 1.0}, {mouth_m, Dof::Y, -1.0}};

  m.validate();
  return m;
}

}  // namespace slafem
