// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/attention.hpp"
#include "cidcassi/error.hpp"

namespace cidcassi {

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels),
      values_(height * width * channels, fill) {}

Eigen::RowVectorXd FeatureMap::pixel(std::size_t r, std::size_t c) const {
  return Eigen::Map<const Eigen::RowVectorXd>(values_.data() + (r * width_ + c) * channels_,
                                              static_cast<Eigen::Index>(channels_));
}

void FeatureMap::set_pixel(std::size_t r, std::size_t c,
                           const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  Eigen::Map<Eigen::RowVectorXd>(values_.data() + (r * width_ + c) * channels_,
                                 static_cast<Eigen::Index>(channels_)) = v;
}

WindowSet window_partition(const FeatureMap& f, std::size_t n) {
  if (n == 0) throw ConfigError("window_partition: window size must be > 0");
  WindowSet set;
  set.window = n;
  set.height = f.height();
  set.width = f.width();
  set.channels = f.channels();
  set.padded_height = (f.height() + n - 1) / n * n;
  set.padded_width = (f.width() + n - 1) / n * n;

  const auto c = static_cast<Eigen::Index>(f.channels());
  for (std::size_t wr = 0; wr < set.padded_height; wr += n) {
    for (std::size_t wc = 0; wc < set.padded_width; wc += n) {
      Eigen::MatrixXd win = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n * n), c);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t r = wr + i;
          const std::size_t col = wc + j;
          if (r < f.height() && col < f.width()) {
            win.row(static_cast<Eigen::Index>(i * n + j)) = f.pixel(r, col);
          }
        }
      }
      set.windows.push_back(std::move(win));
    }
  }
  return set;
}

FeatureMap window_merge(const WindowSet& set) {
  const std::size_t n = set.window;
  if (n == 0) throw ConfigError("window_merge: window size must be > 0");
  const std::size_t per_row = set.padded_width / n;
  if (set.windows.size() != per_row * (set.padded_height / n)) {
    throw ShapeError("window_merge: window count does not match padded dims");
  }
  FeatureMap out(set.height, set.width, set.channels);
  for (std::size_t w = 0; w < set.windows.size(); ++w) {
    const std::size_t wr = (w / per_row) * n;
    const std::size_t wc = (w % per_row) * n;
    const auto& win = set.windows[w];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t r = wr + i;
        const std::size_t c = wc + j;
        if (r < set.height && c < set.width) {
          out.set_pixel(r, c, win.row(static_cast<Eigen::Index>(i * n + j)));
        }
      }
    }
  }
  return out;
}

}  // namespace cidcassi
