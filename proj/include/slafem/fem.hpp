#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <span>
#include <vector>

#include "slafem/material.hpp"
#include "slafem/mesh.hpp"

namespace slafem {

/// Q4 isoparametric plane-stress stiffness, 2x2 Gauss integration.
/// `xy` are the node coordinates counter-clockwise; dof order
/// (u1,v1,...,u4,v4). Throws if the Jacobian is non-positive at any point.
Eigen::Matrix<double, 8, 8> q4_stiffness(const std::array<std::array<double, 2>, 4>& xy,
                                         const Eigen::Matrix3d& D, double thickness);

/// Zero-thickness interface stiffness with per-ip normal/shear penalties
/// (MPa/mm), 2-point Newton-Cotes so the two node pairs do not couple.
/// dof order (minus0, minus1, plus0, plus1) x (u,v).
Eigen::Matrix<double, 8, 8> interface_stiffness(const std::array<std::array<double, 2>, 2>& face_xy,
                                                const std::array<double, 2>& k_n,
                                                const std::array<double, 2>& g_t,
                                                double thickness);

/// Relative displacement and traction at one interface integration point.
struct IpKinematics {
  double w = 0.0;      // normal opening, mm
  double slip = 0.0;   // tangential jump, mm
  double sigma = 0.0;  // normal traction, MPa
  double tau = 0.0;    // shear traction, MPa
};

struct BulkIpState {
  Eigen::Vector3d strain = Eigen::Vector3d::Zero();
  Eigen::Vector3d stress = Eigen::Vector3d::Zero();
};

struct SolveResult {
  Eigen::VectorXd u;          // full dof vector, supported dofs zero
  Eigen::VectorXd reactions;  // one entry per support, in support order
  double control = 0.0;       // control monitor at this λ
  double response = 0.0;      // response monitor at this λ
  double residual = 0.0;      // ‖K u − λF‖ / ‖λF‖
};

/// Assembled linear model over a fixed mesh. Bulk stiffness triplets and the
/// sparsity pattern are cached; interface penalties are passed per solve and
/// the matrix is refactorized every call (SimplicialLDLT, SPD verified via
/// the factor diagonal).
class FemModel {
 public:
  FemModel(Mesh mesh, std::vector<Material> materials);

  const Mesh& mesh() const { return mesh_; }
  int interface_ip_count() const { return mesh_.interface_ip_count(); }
  int free_dof_count() const { return n_free_; }

  /// k_n, g_t sized interface_ip_count() (ip = 2*elem + local pair index).
  SolveResult solve(std::span<const double> k_n, std::span<const double> g_t,
                    double lambda) const;

  /// Openings/tractions at every interface ip for a solved displacement field.
  std::vector<IpKinematics> interface_state(const Eigen::VectorXd& u,
                                            std::span<const double> k_n,
                                            std::span<const double> g_t) const;

  /// Strain/stress at the 2x2 Gauss points of every quad (4 per element).
  std::vector<std::array<BulkIpState, 4>> bulk_state(const Eigen::VectorXd& u) const;

  double eval_monitor(const Monitor& m, const Eigen::VectorXd& u, double lambda) const;

 private:
  struct InterfaceGeom {
    std::array<int, 4> nodes;          // minus0, minus1, plus0, plus1
    std::array<double, 2> tangent;     // unit, minus0 → minus1
    std::array<double, 2> normal;      // tangent rotated +90°, toward plus face
    double length = 0.0;
  };

  void build_dof_map();
  void cache_bulk();

  Mesh mesh_;
  std::vector<Material> materials_;
  std::vector<Eigen::Matrix3d> dmats_;
  std::vector<int> free_index_;     // dof → free index or -1
  std::vector<int> support_index_;  // dof → support row or -1
  int n_free_ = 0;
  std::vector<Eigen::Triplet<double>> bulk_ff_;
  std::vector<Eigen::Triplet<double>> bulk_sf_;
  Eigen::VectorXd f_free_;
  Eigen::VectorXd f_supp_;
  std::vector<InterfaceGeom> ifgeom_;
  // sparsity pattern is fixed across solves, so symbolic analysis runs once
  mutable Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  mutable bool pattern_ready_ = false;
};

/// One-shot convenience wrapper around FemModel for a single solve.
SolveResult assemble_and_solve(const Mesh& mesh, const std::vector<Material>& materials,
                               std::span<const double> k_n, std::span<const double> g_t,
                               double lambda);

}  // namespace slafem
