// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cidcassi/attention.hpp"
#include "cidcassi/error.hpp"
#include "cidcassi/random.hpp"

namespace cidcassi {
namespace {

using Eigen::Index;

// Q, K, V of one pixel, each C x (heads * head_dim).
struct Projections {
  Eigen::MatrixXd q, k, v;
};

Eigen::MatrixXd reshape_rows(const Eigen::VectorXd& flat, Index rows, Index cols) {
  Eigen::MatrixXd out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out(r, c) = flat(r * cols + c);
  }
  return out;
}

Eigen::VectorXd flatten_rows(const Eigen::MatrixXd& m) {
  Eigen::VectorXd out(m.size());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out(r * m.cols() + c) = m(r, c);
  }
  return out;
}

Projections project(const Eigen::RowVectorXd& x, const SpectralAttentionParams& p) {
  const auto c = static_cast<Index>(p.channels);
  const auto e = static_cast<Index>(p.heads * p.head_dim);
  const Eigen::VectorXd xc = x.transpose();
  return {reshape_rows(p.wq * xc, c, e), reshape_rows(p.wk * xc, c, e),
          reshape_rows(p.wv * xc, c, e)};
}

Eigen::MatrixXd head_scores(const Projections& pr, std::size_t head, std::size_t head_dim) {
  const auto d = static_cast<Index>(head_dim);
  const Index off = static_cast<Index>(head) * d;
  return (pr.q.middleCols(off, d) * pr.k.middleCols(off, d).transpose()) /
         std::sqrt(static_cast<double>(head_dim));
}

void check_window(const Eigen::MatrixXd& window, const SpectralAttentionParams& p) {
  if (window.cols() != static_cast<Index>(p.channels)) {
    std::ostringstream msg;
    msg << "spectral attention: window has " << window.cols() << " channels, params expect "
        << p.channels;
    throw ShapeError(msg.str());
  }
}

}  // namespace

void SpectralAttentionParams::validate() const {
  if (channels == 0 || heads == 0 || head_dim == 0) {
    throw ConfigError("spectral attention params: channels, heads, head_dim must be > 0");
  }
  const auto c = static_cast<Index>(channels);
  const auto e = static_cast<Index>(channels * heads * head_dim);
  for (const auto* m : {&wq, &wk, &wv}) {
    if (m->rows() != e || m->cols() != c) {
      throw ShapeError("spectral attention params: q/k/v projection must be (C*heads*d) x C");
    }
  }
  if (wo.rows() != c || wo.cols() != e) {
    throw ShapeError("spectral attention params: output projection must be C x (C*heads*d)");
  }
  if (bo.size() != c) throw ShapeError("spectral attention params: output bias must have C rows");
}

SpectralAttentionParams SpectralAttentionParams::identity(std::size_t channels) {
  SpectralAttentionParams p;
  p.channels = channels;
  const auto c = static_cast<Index>(channels);
  p.wq = p.wk = p.wv = p.wo = Eigen::MatrixXd::Identity(c, c);
  p.bo = Eigen::VectorXd::Zero(c);
  return p;
}

SpectralAttentionParams SpectralAttentionParams::random(std::size_t channels, std::size_t heads,
                                                        std::size_t head_dim,
                                                        std::uint64_t seed) {
  SpectralAttentionParams p;
  p.channels = channels;
  p.heads = heads;
  p.head_dim = head_dim;
  const auto c = static_cast<Index>(channels);
  const auto e = static_cast<Index>(channels * heads * head_dim);
  Rng rng(seed);
  auto fill = [&rng](Index rows, Index cols, double scale) {
    Eigen::MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
  };
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(c));
  p.wq = fill(e, c, in_scale);
  p.wk = fill(e, c, in_scale);
  p.wv = fill(e, c, in_scale);
  p.wo = fill(c, e, 1.0 / std::sqrt(static_cast<double>(e)));
  p.bo = Eigen::VectorXd::Zero(c);
  return p;
}

Eigen::MatrixXd topk_softmax(const Eigen::MatrixXd& scores, std::size_t k) {
  const auto cols = static_cast<std::size_t>(scores.cols());
  if (k < 1 || k > cols) {
    std::ostringstream msg;
    msg << "topk_softmax: k = " << k << " outside [1, " << cols << "]";
    throw ConfigError(msg.str());
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(scores.rows(), scores.cols());
  std::vector<Index> order(cols);
  for (Index r = 0; r < scores.rows(); ++r) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return scores(r, a) > scores(r, b); });
    // Retained entries, restored to column order so the sum order is fixed.
    std::vector<Index> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(kept.begin(), kept.end());
    double peak = scores(r, kept.front());
    for (Index j : kept) peak = std::max(peak, scores(r, j));
    double sum = 0.0;
    for (Index j : kept) {
      out(r, j) = std::exp(scores(r, j) - peak);
      sum += out(r, j);
    }
    for (Index j : kept) out(r, j) /= sum;
  }
  return out;
}

Eigen::MatrixXd topk_spectral_attention(const Eigen::MatrixXd& window,
                                        const SpectralAttentionParams& params, std::size_t k,
                                        SpectralAttentionMaps* maps) {
  params.validate();
  check_window(window, params);
  if (k < 1 || k > params.channels) {
    std::ostringstream msg;
    msg << "topk_spectral_attention: k = " << k << " outside [1, " << params.channels << "]";
    throw ConfigError(msg.str());
  }
  const auto d = static_cast<Index>(params.head_dim);
  Eigen::MatrixXd out(window.rows(), window.cols());
  if (maps) maps->maps.assign(static_cast<std::size_t>(window.rows()), {});
  for (Index i = 0; i < window.rows(); ++i) {
    const Projections pr = project(window.row(i), params);
    Eigen::MatrixXd z(pr.v.rows(), pr.v.cols());
    for (std::size_t h = 0; h < params.heads; ++h) {
      const Eigen::MatrixXd a = topk_softmax(head_scores(pr, h, params.head_dim), k);
      z.middleCols(static_cast<Index>(h) * d, d) = a * pr.v.middleCols(static_cast<Index>(h) * d, d);
      if (maps) maps->maps[static_cast<std::size_t>(i)].push_back(a);
    }
    out.row(i) = (params.wo * flatten_rows(z) + params.bo).transpose();
  }
  return out;
}

std::size_t topk_count(double ratio, std::size_t channels) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw ConfigError("topk ratio must lie in (0, 1]");
  }
  const double raw = std::ceil(ratio * static_cast<double>(channels) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, channels);
}

std::vector<double> default_topk_ratios() { return {1.0 / 2.0, 2.0 / 3.0, 3.0 / 4.0, 4.0 / 5.0}; }

Eigen::MatrixXd multi_ratio_attention(const Eigen::MatrixXd& window,
                                      const SpectralAttentionParams& params,
                                      const std::vector<double>& ratios,
                                      const std::vector<double>& weights) {
  params.validate();
  check_window(window, params);
  if (ratios.size() != weights.size()) {
    throw ConfigError("multi_ratio_attention: ratios and weights differ in length");
  }
  if (ratios.empty()) throw ConfigError("multi_ratio_attention: no ratios");
  std::vector<std::size_t> ks;
  for (double r : ratios) ks.push_back(topk_count(r, params.channels));

  const auto d = static_cast<Index>(params.head_dim);
  Eigen::MatrixXd out(window.rows(), window.cols());
  for (Index i = 0; i < window.rows(); ++i) {
    const Projections pr = project(window.row(i), params);
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(pr.v.rows(), pr.v.cols());
    for (std::size_t h = 0; h < params.heads; ++h) {
      const Eigen::MatrixXd scores = head_scores(pr, h, params.head_dim);
      const auto vh = pr.v.middleCols(static_cast<Index>(h) * d, d);
      for (std::size_t r = 0; r < ks.size(); ++r) {
        z.middleCols(static_cast<Index>(h) * d, d) += weights[r] * (topk_softmax(scores, ks[r]) * vh);
      }
    }
    out.row(i) = (params.wo * flatten_rows(z) + params.bo).transpose();
  }
  return out;
}

FeatureMap spectral_attention_map(const FeatureMap& f, const SpectralAttentionParams& params,
                                  std::size_t window, const std::vector<double>& ratios,
                                  const std::vector<double>& weights) {
  WindowSet set = window_partition(f, window);
  for (auto& w : set.windows) w = multi_ratio_attention(w, params, ratios, weights);
  return window_merge(set);
}

}  // namespace cidcassi
