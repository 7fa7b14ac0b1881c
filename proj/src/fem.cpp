#include "slafem/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace slafem {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)
constexpr double kXiSign[4] = {-1, 1, 1, -1};
constexpr double kEtaSign[4] = {-1, -1, 1, 1};

// strain-displacement matrix and Jacobian determinant at (xi, eta)
Eigen::Matrix<double, 3, 8> q4_bmatrix(const std::array<std::array<double, 2>, 4>& xy,
                                       double xi, double eta, double& det) {
  double dxi[4], deta[4];
  for (int i = 0; i < 4; ++i) {
    dxi[i] = 0.25 * kXiSign[i] * (1.0 + kEtaSign[i] * eta);
    deta[i] = 0.25 * kEtaSign[i] * (1.0 + kXiSign[i] * xi);
  }
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  for (int i = 0; i < 4; ++i) {
    j11 += dxi[i] * xy[i][0];
    j12 += dxi[i] * xy[i][1];
    j21 += deta[i] * xy[i][0];
    j22 += deta[i] * xy[i][1];
  }
  det = j11 * j22 - j12 * j21;
  if (det <= 0.0) throw std::runtime_error("quad Jacobian is not positive");
  const double i11 = j22 / det, i12 = -j12 / det, i21 = -j21 / det, i22 = j11 / det;
  Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
  for (int i = 0; i < 4; ++i) {
    const double dx = i11 * dxi[i] + i12 * deta[i];
    const double dy = i21 * dxi[i] + i22 * deta[i];
    B(0, 2 * i) = dx;
    B(1, 2 * i + 1) = dy;
    B(2, 2 * i) = dy;
    B(2, 2 * i + 1) = dx;
  }
  return B;
}

// Gauss point g = 0..3 in the order (-,-), (+,-), (-,+), (+,+)
void gauss_point(int g, double& xi, double& eta) {
  xi = (g & 1) ? kGauss : -kGauss;
  eta = (g & 2) ? kGauss : -kGauss;
}

}  // namespace

Eigen::Matrix<double, 8, 8> q4_stiffness(const std::array<std::array<double, 2>, 4>& xy,
                                         const Eigen::Matrix3d& D, double thickness) {
  Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
  for (int g = 0; g < 4; ++g) {
    double xi, eta, det;
    gauss_point(g, xi, eta);
    const Eigen::Matrix<double, 3, 8> B = q4_bmatrix(xy, xi, eta, det);
    K += B.transpose() * D * B * (det * thickness);
  }
  return K;
}

Eigen::Matrix<double, 8, 8> interface_stiffness(const std::array<std::array<double, 2>, 2>& face_xy,
                                                const std::array<double, 2>& k_n,
                                                const std::array<double, 2>& g_t,
                                                double thickness) {
  const double dx = face_xy[1][0] - face_xy[0][0];
  const double dy = face_xy[1][1] - face_xy[0][1];
  const double len = std::hypot(dx, dy);
  if (len <= 0.0) throw std::runtime_error("interface has zero length");
  const Eigen::Vector2d t(dx / len, dy / len);
  const Eigen::Vector2d n(-t.y(), t.x());

  Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
  for (int p = 0; p < 2; ++p) {
    // lumped Newton-Cotes: each node pair integrates half the face
    const Eigen::Matrix2d M =
        (0.5 * len * thickness) *
        (k_n[p] * n * n.transpose() + g_t[p] * t * t.transpose());
    const int m = 2 * p;      // minus node dofs
    const int q = 4 + 2 * p;  // plus node dofs
    K.block<2, 2>(m, m) += M;
    K.block<2, 2>(q, q) += M;
    K.block<2, 2>(m, q) -= M;
    K.block<2, 2>(q, m) -= M;
  }
  return K;
}

FemModel::FemModel(Mesh mesh, std::vector<Material> materials)
    : mesh_(std::move(mesh)), materials_(std::move(materials)) {
  mesh_.validate();
  if (mesh_.control.terms.empty() || mesh_.response.terms.empty()) {
    throw std::invalid_argument("model requires control and response monitors");
  }
  if (materials_.empty()) throw std::invalid_argument("at least one material required");
  dmats_.reserve(materials_.size());
  for (const Material& m : materials_) dmats_.push_back(elastic_matrix(m));
  for (const QuadElement& q : mesh_.quads) {
    if (q.material_id < 0 || q.material_id >= static_cast<int>(materials_.size())) {
      throw std::invalid_argument("quad " + std::to_string(q.id) +
                                  " references missing material " +
                                  std::to_string(q.material_id));
    }
  }
  build_dof_map();
  cache_bulk();

  ifgeom_.reserve(mesh_.interfaces.size());
  for (const InterfaceElement& f : mesh_.interfaces) {
    InterfaceGeom g;
    g.nodes = f.nodes;
    const Node& a = mesh_.nodes[f.nodes[0]];
    const Node& b = mesh_.nodes[f.nodes[1]];
    const double dx = b.x - a.x, dy = b.y - a.y;
    g.length = std::hypot(dx, dy);
    g.tangent = {dx / g.length, dy / g.length};
    g.normal = {-g.tangent[1], g.tangent[0]};
    ifgeom_.push_back(g);
  }
}

void FemModel::build_dof_map() {
  const int ndof = mesh_.dof_count();
  free_index_.assign(ndof, -1);
  support_index_.assign(ndof, -1);
  for (std::size_t s = 0; s < mesh_.supports.size(); ++s) {
    const int dof = 2 * mesh_.supports[s].node + static_cast<int>(mesh_.supports[s].dir);
    if (support_index_[dof] >= 0) {
      throw std::invalid_argument("duplicate support on node " +
                                  std::to_string(mesh_.supports[s].node));
    }
    support_index_[dof] = static_cast<int>(s);
  }
  n_free_ = 0;
  for (int d = 0; d < ndof; ++d) {
    if (support_index_[d] < 0) free_index_[d] = n_free_++;
  }
  if (n_free_ == 0) throw std::invalid_argument("no free degrees of freedom");

  f_free_ = Eigen::VectorXd::Zero(n_free_);
  f_supp_ = Eigen::VectorXd::Zero(static_cast<int>(mesh_.supports.size()));
  for (const PointLoad& l : mesh_.loads) {
    const int dof = 2 * l.node + static_cast<int>(l.dir);
    if (free_index_[dof] >= 0) {
      f_free_[free_index_[dof]] += l.value;
    } else {
      f_supp_[support_index_[dof]] += l.value;
    }
  }
}

void FemModel::cache_bulk() {
  for (const QuadElement& q : mesh_.quads) {
    std::array<std::array<double, 2>, 4> xy;
    std::array<int, 8> gdof;
    for (int i = 0; i < 4; ++i) {
      const Node& n = mesh_.nodes[q.nodes[i]];
      xy[i] = {n.x, n.y};
      gdof[2 * i] = 2 * q.nodes[i];
      gdof[2 * i + 1] = 2 * q.nodes[i] + 1;
    }
    const Eigen::Matrix<double, 8, 8> K = q4_stiffness(xy, dmats_[q.material_id], mesh_.thickness);
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        const int fa = free_index_[gdof[a]];
        const int fb = free_index_[gdof[b]];
        if (fb < 0) continue;
        if (fa >= 0) {
          bulk_ff_.emplace_back(fa, fb, K(a, b));
        } else {
          bulk_sf_.emplace_back(support_index_[gdof[a]], fb, K(a, b));
        }
      }
    }
  }
}

SolveResult FemModel::solve(std::span<const double> k_n, std::span<const double> g_t,
                            double lambda) const {
  const int nip = interface_ip_count();
  if (static_cast<int>(k_n.size()) != nip || static_cast<int>(g_t.size()) != nip) {
    throw std::invalid_argument("penalty spans must match the interface ip count");
  }

  std::vector<Eigen::Triplet<double>> ff = bulk_ff_;
  std::vector<Eigen::Triplet<double>> sf = bulk_sf_;
  for (std::size_t e = 0; e < ifgeom_.size(); ++e) {
    const InterfaceGeom& g = ifgeom_[e];
    std::array<std::array<double, 2>, 2> face{
        std::array<double, 2>{mesh_.nodes[g.nodes[0]].x, mesh_.nodes[g.nodes[0]].y},
        std::array<double, 2>{mesh_.nodes[g.nodes[1]].x, mesh_.nodes[g.nodes[1]].y}};
    const Eigen::Matrix<double, 8, 8> K = interface_stiffness(
        face, {k_n[2 * e], k_n[2 * e + 1]}, {g_t[2 * e], g_t[2 * e + 1]}, mesh_.thickness);
    std::array<int, 8> gdof;
    for (int i = 0; i < 4; ++i) {
      gdof[2 * i] = 2 * g.nodes[i];
      gdof[2 * i + 1] = 2 * g.nodes[i] + 1;
    }
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        if (K(a, b) == 0.0) continue;
        const int fa = free_index_[gdof[a]];
        const int fb = free_index_[gdof[b]];
        if (fb < 0) continue;
        if (fa >= 0) {
          ff.emplace_back(fa, fb, K(a, b));
        } else {
          sf.emplace_back(support_index_[gdof[a]], fb, K(a, b));
        }
      }
    }
  }

  Eigen::SparseMatrix<double> K(n_free_, n_free_);
  K.setFromTriplets(ff.begin(), ff.end());

  if (!pattern_ready_) {
    solver_.analyzePattern(K);
    pattern_ready_ = true;
  }
  solver_.factorize(K);
  // a rank-deficient system can sneak a roundoff-sized positive pivot past an
  // absolute test, so gate the smallest pivot relative to the largest
  const Eigen::VectorXd& D = solver_.vectorD();
  const double pivot_floor = 1e-14 * D.maxCoeff();
  if (solver_.info() != Eigen::Success || !(D.minCoeff() > pivot_floor)) {
    throw std::runtime_error("stiffness matrix is not positive definite");
  }

  const Eigen::VectorXd rhs = lambda * f_free_;
  Eigen::VectorXd uf = solver_.solve(rhs);

  const double fnorm = rhs.norm();
  double residual = 0.0;
  if (fnorm > 0.0) {
    Eigen::VectorXd r = rhs - K * uf;
    residual = r.norm() / fnorm;
    if (residual > 1e-11) {  // one step of iterative refinement
      uf += solver_.solve(r);
      r = rhs - K * uf;
      residual = r.norm() / fnorm;
    }
  }

  SolveResult res;
  res.u = Eigen::VectorXd::Zero(mesh_.dof_count());
  for (int d = 0; d < mesh_.dof_count(); ++d) {
    if (free_index_[d] >= 0) res.u[d] = uf[free_index_[d]];
  }
  res.reactions = -lambda * f_supp_;
  for (const Eigen::Triplet<double>& t : sf) {
    res.reactions[t.row()] += t.value() * uf[t.col()];
  }
  res.residual = residual;
  res.control = eval_monitor(mesh_.control, res.u, lambda);
  res.response = eval_monitor(mesh_.response, res.u, lambda);
  return res;
}

std::vector<IpKinematics> FemModel::interface_state(const Eigen::VectorXd& u,
                                                    std::span<const double> k_n,
                                                    std::span<const double> g_t) const {
  const int nip = interface_ip_count();
  if (static_cast<int>(k_n.size()) != nip || static_cast<int>(g_t.size()) != nip) {
    throw std::invalid_argument("penalty spans must match the interface ip count");
  }
  std::vector<IpKinematics> out(nip);
  for (std::size_t e = 0; e < ifgeom_.size(); ++e) {
    const InterfaceGeom& g = ifgeom_[e];
    for (int p = 0; p < 2; ++p) {
      const int minus = g.nodes[p];
      const int plus = g.nodes[2 + p];
      const double du = u[2 * plus] - u[2 * minus];
      const double dv = u[2 * plus + 1] - u[2 * minus + 1];
      IpKinematics& ip = out[2 * e + p];
      ip.w = g.normal[0] * du + g.normal[1] * dv;
      ip.slip = g.tangent[0] * du + g.tangent[1] * dv;
      ip.sigma = k_n[2 * e + p] * ip.w;
      ip.tau = g_t[2 * e + p] * ip.slip;
    }
  }
  return out;
}

std::vector<std::array<BulkIpState, 4>> FemModel::bulk_state(const Eigen::VectorXd& u) const {
  std::vector<std::array<BulkIpState, 4>> out(mesh_.quads.size());
  for (const QuadElement& q : mesh_.quads) {
    std::array<std::array<double, 2>, 4> xy;
    Eigen::Matrix<double, 8, 1> ue;
    for (int i = 0; i < 4; ++i) {
      const Node& n = mesh_.nodes[q.nodes[i]];
      xy[i] = {n.x, n.y};
      ue[2 * i] = u[2 * q.nodes[i]];
      ue[2 * i + 1] = u[2 * q.nodes[i] + 1];
    }
    for (int g = 0; g < 4; ++g) {
      double xi, eta, det;
      gauss_point(g, xi, eta);
      const Eigen::Matrix<double, 3, 8> B = q4_bmatrix(xy, xi, eta, det);
      BulkIpState& s = out[q.id][g];
      s.strain = B * ue;
      s.stress = dmats_[q.material_id] * s.strain;
    }
  }
  return out;
}

double FemModel::eval_monitor(const Monitor& m, const Eigen::VectorXd& u, double lambda) const {
  double value = 0.0;
  if (m.kind == Monitor::Kind::Disp) {
    for (const Monitor::Term& t : m.terms) {
      value += t.weight * u[2 * t.node + static_cast<int>(t.dir)];
    }
  } else {
    for (const Monitor::Term& t : m.terms) {
      double f = 0.0;
      for (const PointLoad& l : mesh_.loads) {
        if (l.node == t.node && l.dir == t.dir) f += l.value;
      }
      value += t.weight * f * lambda;
    }
  }
  return value;
}

SolveResult assemble_and_solve(const Mesh& mesh, const std::vector<Material>& materials,
                               std::span<const double> k_n, std::span<const double> g_t,
                               double lambda) {
  return FemModel(mesh, materials).solve(k_n, g_t, lambda);
}

}  // namespace slafem
