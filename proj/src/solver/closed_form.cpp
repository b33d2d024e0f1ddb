// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/solver.hpp"

namespace cidcassi {
namespace {

Eigen::VectorXd floored_variance(const Eigen::VectorXd& sigma, double floor) {
  Eigen::VectorXd var(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) var(i) = std::max(sigma(i) * sigma(i), floor);
  return var;
}

void check_dims(const Eigen::MatrixXd& h, const Eigen::VectorXd& sigma, double mu) {
  if (sigma.size() != h.rows()) throw ShapeError("closed form: sigma length != rows of H");
  if (!(mu > 0.0)) throw ConfigError("closed form: mu must be > 0");
}

}  // namespace

Eigen::MatrixXd data_step_inverse_direct(const Eigen::MatrixXd& dense_h,
                                         const Eigen::VectorXd& sigma, double mu,
                                         double gram_floor) {
  check_dims(dense_h, sigma, mu);
  const Eigen::VectorXd inv_var = floored_variance(sigma, gram_floor).cwiseInverse();
  Eigen::MatrixXd a = dense_h.transpose() * inv_var.asDiagonal() * dense_h;
  a.diagonal().array() += mu;
  return a.ldlt().solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

Eigen::MatrixXd data_step_inverse_woodbury(const Eigen::MatrixXd& dense_h,
                                           const Eigen::VectorXd& sigma, double mu,
                                           double gram_floor) {
  check_dims(dense_h, sigma, mu);
  Eigen::MatrixXd inner = (dense_h * dense_h.transpose()) / mu;
  inner.diagonal() += floored_variance(sigma, gram_floor);
  const Eigen::MatrixXd inner_inv_h = inner.ldlt().solve(dense_h);
  Eigen::MatrixXd out = -(dense_h.transpose() * inner_inv_h) / (mu * mu);
  out.diagonal().array() += 1.0 / mu;
  return out;
}

ClosedFormResult closed_form_direct(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& dense_h,
                                    const Eigen::VectorXd& sigma, double mu, double gram_floor,
                                    double agreement_tol) {
  check_dims(dense_h, sigma, mu);
  if (z.size() != dense_h.cols() || y.size() != dense_h.rows()) {
    throw ShapeError("closed_form_direct: z/y lengths do not match H");
  }
  const Eigen::VectorXd var = floored_variance(sigma, gram_floor);
  const Eigen::VectorXd inv_var = var.cwiseInverse();
  const Eigen::VectorXd rhs =
      dense_h.transpose() * inv_var.cwiseProduct(y) + mu * z;

  Eigen::MatrixXd a = dense_h.transpose() * inv_var.asDiagonal() * dense_h;
  a.diagonal().array() += mu;

  ClosedFormResult out;
  out.direct = a.ldlt().solve(rhs);

  Eigen::MatrixXd inner = (dense_h * dense_h.transpose()) / mu;
  inner.diagonal() += var;
  const Eigen::VectorXd hv = dense_h * rhs;
  out.woodbury = rhs / mu - dense_h.transpose() * inner.ldlt().solve(hv) / (mu * mu);

  const double scale = std::max(out.direct.norm(), 1e-300);
  out.relative_difference = (out.direct - out.woodbury).norm() / scale;
  if (!(out.relative_difference <= agreement_tol)) {
    std::ostringstream msg;
    msg << "closed_form_direct: direct and Woodbury routes differ by "
        << out.relative_difference << " (relative)";
    throw NumericalError(msg.str());
  }
  return out;
}

SpectralCube closed_form_direct(const SpectralCube& z, const Measurement& y,
                                const Eigen::MatrixXd& dense_h, const Plane& sigma_map, double mu,
                                double gram_floor) {
  if (!y.same_shape(sigma_map)) throw ShapeError("closed_form_direct: sigma map dims != y dims");
  const auto zv = z.values();
  const auto yv = y.values();
  const auto sv = sigma_map.values();
  const Eigen::VectorXd ze = Eigen::Map<const Eigen::VectorXd>(zv.data(), zv.size());
  const Eigen::VectorXd ye = Eigen::Map<const Eigen::VectorXd>(yv.data(), yv.size());
  const Eigen::VectorXd se = Eigen::Map<const Eigen::VectorXd>(sv.data(), sv.size());
  const ClosedFormResult r = closed_form_direct(ze, ye, dense_h, se, mu, gram_floor);
  return SpectralCube(z.height(), z.width(), z.bands(),
                      std::vector<double>(r.direct.data(), r.direct.data() + r.direct.size()));
}

}  // namespace cidcassi
