// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/solver.hpp"

namespace cidcassi {

SpectralCube gradient_projection(const SpectralCube& z, const Measurement& y,
                                 const SensingOperator& op, std::span<const double> gram,
                                 const Plane& sigma_map, double mu, double gram_floor) {
  if (y.height() != op.measurement_height() || y.width() != op.measurement_width()) {
    throw ShapeError("gradient_projection: measurement dims do not match the operator");
  }
  if (!y.same_shape(sigma_map)) {
    std::ostringstream msg;
    msg << "gradient_projection: sigma map is " << sigma_map.height() << "x"
        << sigma_map.width() << " but measurement is " << y.height() << "x" << y.width();
    throw ShapeError(msg.str());
  }
  if (gram.size() != y.size()) throw ShapeError("gradient_projection: gram length != y size");
  if (!(gram_floor > 0.0)) throw ConfigError("gradient_projection: gram_floor must be > 0");

  Measurement r = apply_forward(op, z);
  auto rv = r.values();
  const auto yv = y.values();
  const auto sv = sigma_map.values();
  for (std::size_t i = 0; i < rv.size(); ++i) {
    const double denom = std::max(gram[i] + mu * sv[i] * sv[i], gram_floor);
    rv[i] = (yv[i] - rv[i]) / denom;
  }
  SpectralCube c = apply_adjoint(op, r);
  auto cv = c.values();
  const auto zv = z.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] += zv[i];
  return c;
}

SpectralCube gradient_projection(const SpectralCube& z, const Measurement& y,
                                 const SensingOperator& op, const Plane& sigma_map, double mu,
                                 double gram_floor) {
  const std::vector<double> gram = gram_diagonal(op);
  return gradient_projection(z, y, op, gram, sigma_map, mu, gram_floor);
}

}  // namespace cidcassi
