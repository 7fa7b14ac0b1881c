#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace slafem {

/// 2D node, coordinates in mm.
struct Node {
  int id = -1;
  double x = 0.0;
  double y = 0.0;
};

/// 4-node plane-stress quad, nodes counter-clockwise.
struct QuadElement {
  int id = -1;
  std::array<int, 4> nodes{-1, -1, -1, -1};
  int material_id = 0;
};

/// Zero-thickness line interface between two initially coincident faces.
///
/// nodes[0], nodes[1] span the minus face (ordered along the path),
/// nodes[2], nodes[3] the plus face; pairs (0,2) and (1,3) coincide
/// geometrically. The unit normal is the minus-face tangent rotated +90°
/// and points toward the plus face. Integration is 2-point Newton-Cotes,
/// one integration point per node pair: ip 0 at pair (0,2), ip 1 at (1,3).
struct InterfaceElement {
  int id = -1;
  std::array<int, 4> nodes{-1, -1, -1, -1};
};

enum class Dof { X = 0, Y = 1 };

struct Support {
  int node = -1;
  Dof dir = Dof::X;
};

/// Reference point load in N; analyses scale the whole load vector by λ.
struct PointLoad {
  int node = -1;
  Dof dir = Dof::Y;
  double value = 0.0;
};

/// Named scalar probe of the solution. `Load` monitors evaluate
/// Σ weight·F_ref(node,dir)·λ, `Disp` monitors Σ weight·u(node,dir).
/// Relative displacements (e.g. CMOD) are two Disp terms with ±1 weights.
struct Monitor {
  enum class Kind { Load, Disp };
  struct Term {
    int node = -1;
    Dof dir = Dof::X;
    double weight = 1.0;
  };
  std::string name;
  Kind kind = Kind::Disp;
  std::vector<Term> terms;
};

struct Mesh {
  std::vector<Node> nodes;
  std::vector<QuadElement> quads;
  std::vector<InterfaceElement> interfaces;
  std::vector<Support> supports;
  std::vector<PointLoad> loads;
  Monitor control;
  Monitor response;
  double thickness = 1.0;  // mm, uniform

  int dof_count() const { return 2 * static_cast<int>(nodes.size()); }
  int interface_ip_count() const { return 2 * static_cast<int>(interfaces.size()); }

  /// Throws std::runtime_error on broken invariants: non-dense ids, degenerate
  /// or inverted quads, non-coincident interface pairs, branching interface
  /// paths, references to missing nodes.
  void validate() const;
};

using Polyline = std::vector<std::array<double, 2>>;

/// Tensor-product structured grid of quads. xs/ys strictly increasing.
Mesh make_grid(const std::vector<double>& xs, const std::vector<double>& ys,
               double thickness, int material_id = 0);

/// Splits the mesh along a polyline that follows existing element edges and
/// inserts one interface element per edge. Interior path nodes are always
/// duplicated; endpoint nodes only if they lie on the domain boundary (an
/// interior endpoint is a closed crack tip and stays a single node). Edges
/// whose midpoint arc-length is below `traction_free_length` get duplicated
/// nodes but no interface element (open slit). An empty polyline returns the
/// mesh unchanged.
///
/// `pair_map_out`, if given, receives original-node → duplicate-node pairs
/// (the original keeps the minus face).
Mesh insert_cohesive_path(const Mesh& mesh, const Polyline& polyline,
                          double traction_free_length = 0.0,
                          std::map<int, int>* pair_map_out = nullptr);

enum class ResponseKind { Cmod, Deflection };

struct BeamOptions {
  ResponseKind response = ResponseKind::Cmod;
  double load = 1.0;  // total downward mid-span force, N
};

/// Simply supported three-point-bending beam with a vertical cohesive path at
/// mid-span. notch_depth = 0 gives an unnotched beam (path over the full
/// depth); notch_width = 0 models the notch as a traction-free slit,
/// notch_width > 0 removes whole element columns. Monitors: control = applied
/// load, response = CMOD across the notch mouth or mid-span deflection.
Mesh generate_notched_beam(double span, double depth, double thickness,
                           double notch_depth, double notch_width,
                           double elem_size, const BeamOptions& opt = {});

struct CtOptions {
  double load = 1.0;  // opening force at each pin, N
};

/// Compact-tension style plate: horizontal slit of length `notch_length` from
/// the left edge at mid-height, cohesive path over the remaining ligament.
/// The ligament and the rows around the path use elem_size_fine, the rest
/// elem_size_coarse. Loaded by an opening force pair at two pin nodes.
/// Monitors: control = pin force, response = CMOD at the notch mouth.
Mesh generate_compact_tension(double width, double height, double thickness,
                              double notch_length, double elem_size_fine,
                              double elem_size_coarse, const CtOptions& opt = {});

/// Plain-text mesh I/O. Sections: THICKNESS, NODES (id x y), QUADS
/// (id n1 n2 n3 n4 mat), INTERFACES (id n1 n2 n3 n4), SUPPORTS (node dir),
/// LOADS (node dir value), MONITORS (name load|disp node dir weight ...);
/// '#' starts a comment. Exactly two monitors: control first, response second.
Mesh read_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, const std::string& path);

}  // namespace slafem
