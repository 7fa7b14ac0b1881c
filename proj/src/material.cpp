#include "slafem/material.hpp"

#include <stdexcept>

namespace slafem {

Material Material::isotropic(double E, double nu) {
  Material m;
  m.kind = Kind::Isotropic;
  m.E = E;
  m.nu = nu;
  return m;
}

Material Material::orthotropic(double E_xx, double E_yy, double G_xy, double nu_xy) {
  Material m;
  m.kind = Kind::Orthotropic;
  m.E_xx = E_xx;
  m.E_yy = E_yy;
  m.G_xy = G_xy;
  m.nu_xy = nu_xy;
  return m;
}

double Material::reference_modulus() const {
  return kind == Kind::Isotropic ? E : E_xx;
}

Eigen::Matrix3d elastic_matrix(const Material& m) {
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  if (m.kind == Material::Kind::Isotropic) {
    if (!(m.E > 0.0) || !(std::abs(m.nu) < 1.0)) {
      throw std::invalid_argument("isotropic material needs E > 0 and |nu| < 1");
    }
    const double c = m.E / (1.0 - m.nu * m.nu);
    D(0, 0) = D(1, 1) = c;
    D(0, 1) = D(1, 0) = c * m.nu;
    D(2, 2) = c * (1.0 - m.nu) / 2.0;
  } else {
    const double nu_yx = m.nu_xy * m.E_yy / m.E_xx;
    const double den = 1.0 - m.nu_xy * nu_yx;
    if (!(m.E_xx > 0.0) || !(m.E_yy > 0.0) || !(m.G_xy > 0.0) || !(den > 0.0)) {
      throw std::invalid_argument("orthotropic parameters do not give a stable material");
    }
    D(0, 0) = m.E_xx / den;
    D(1, 1) = m.E_yy / den;
    D(0, 1) = D(1, 0) = m.nu_xy * m.E_yy / den;
    D(2, 2) = m.G_xy;
  }
  Eigen::LLT<Eigen::Matrix3d> llt(D);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("elastic matrix is not positive definite");
  }
  return D;
}

}  // namespace slafem
