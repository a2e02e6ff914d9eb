#pragma once

// Planar shape space: k labelled landmarks in the plane modulo translation,
// rotation, and scale, realized as CP^{k-2}.  Landmarks are centered, then
// expressed in the Helmert basis of the centered subspace, then normalized;
// the global phase (rotation) is quotiented by the CP^{k-2} representation.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "riem/manifold.hpp"

namespace riem {

/// Row j (0-based) of the (k-1) x k Helmert submatrix: j+1 leading entries
/// 1/sqrt((j+1)(j+2)) followed by -(j+1)/sqrt((j+1)(j+2)).  Rows are
/// orthonormal and orthogonal to the constant vector.
inline Eigen::MatrixXd helmert_submatrix(int k) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k - 1, k);
  for (int j = 0; j < k - 1; ++j) {
    const double s = 1.0 / std::sqrt(double(j + 1) * (j + 2));
    H.row(j).head(j + 1).setConstant(s);
    H(j, j + 1) = -(j + 1) * s;
  }
  return H;
}

/// Embed k landmarks (k >= 3, not all equal) as a point of CP^{k-2}.
inline Point shape_embed(const std::vector<std::complex<double>>& landmarks,
                         std::shared_ptr<const Manifold>& manifold_out) {
  const int k = int(landmarks.size());
  if (k < 3) throw std::invalid_argument("shape_embed: need at least 3 landmarks");
  VectorXcd z(k);
  for (int i = 0; i < k; ++i) z(i) = landmarks[i];
  z.array() -= z.mean();  // centroid out (Helmert rows would too; explicit for clarity)
  VectorXcd w = helmert_submatrix(k).cast<std::complex<double>>() * z;
  const double n = w.norm();
  if (n < 1e-14) throw std::invalid_argument("shape_embed: degenerate (all-equal) landmarks");
  w /= n;
  manifold_out = std::make_shared<ComplexProjective>(k - 2);
  return {manifold_out.get(), ComplexProjective::as_real(w)};
}

/// Invert the embedding: a unit-size, centroid-zero landmark configuration
/// whose first Helmert coordinate is phase-aligned to real-positive.
inline std::vector<std::complex<double>> shape_representative(const VectorXd& coords) {
  const VectorXcd w0 = ComplexProjective::as_complex(coords);
  const int k = int(w0.size()) + 1;
  VectorXcd w = w0;
  int lead = 0;
  while (lead < w.size() && std::abs(w(lead)) < 1e-14) ++lead;
  if (lead < w.size()) {
    const std::complex<double> ph = w(lead) / std::abs(w(lead));
    w /= ph;
  }
  const VectorXcd z = helmert_submatrix(k).transpose().cast<std::complex<double>>() * w;
  return {z.data(), z.data() + z.size()};
}

}  // namespace riem
