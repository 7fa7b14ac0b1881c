#pragma once

#include <Eigen/Dense>

namespace slafem {

/// Plane-stress elastic material. Units: MPa.
struct Material {
  enum class Kind { Isotropic, Orthotropic };
  Kind kind = Kind::Isotropic;

  // isotropic
  double E = 0.0;
  double nu = 0.0;

  // orthotropic (x = first material axis, aligned with global x)
  double E_xx = 0.0;
  double E_yy = 0.0;
  double G_xy = 0.0;
  double nu_xy = 0.0;

  static Material isotropic(double E, double nu);
  static Material orthotropic(double E_xx, double E_yy, double G_xy, double nu_xy);

  /// Representative stiffness used for penalty defaults (E, or E_xx).
  double reference_modulus() const;
};

/// 3x3 plane-stress constitutive matrix, voigt order (xx, yy, xy).
/// Throws std::invalid_argument if the parameters do not give an SPD matrix.
Eigen::Matrix3d elastic_matrix(const Material& m);

}  // namespace slafem
