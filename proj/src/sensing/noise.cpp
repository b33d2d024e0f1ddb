// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/random.hpp"
#include "cidcassi/sensing.hpp"

namespace cidcassi {

void NoiseModel::validate() const {
  const auto s = sigma_map.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || s[i] < 0.0) {
      std::ostringstream msg;
      msg << "noise model: sigma at index " << i << " is " << s[i] << "; must be >= 0";
      throw ConfigError(msg.str());
    }
  }
  if (!std::isfinite(omega) || omega < 0.0) throw ConfigError("noise model: omega must be >= 0");
}

Measurement add_noise(const Measurement& y, const NoiseModel& noise, std::uint64_t seed) {
  if (!y.same_shape(noise.sigma_map)) {
    std::ostringstream msg;
    msg << "add_noise: measurement is " << y.height() << "x" << y.width() << " but sigma map is "
        << noise.sigma_map.height() << "x" << noise.sigma_map.width();
    throw ShapeError(msg.str());
  }
  noise.validate();
  Rng rng(seed);
  Measurement out = y;
  auto v = out.values();
  const auto s = noise.sigma_map.values();
  // One draw per pixel regardless of sigma keeps the stream aligned with pixel index.
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double n = rng.normal();
    if (s[i] > 0.0) v[i] += s[i] * n;
  }
  return out;
}

}  // namespace cidcassi
