// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <sstream>

#include "cidcassi/attention.hpp"
#include "cidcassi/error.hpp"
#include "cidcassi/random.hpp"

namespace cidcassi {
namespace {

using Eigen::Index;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

void expect(bool ok, const char* what) {
  if (!ok) throw ShapeError(std::string("spatial attention params: ") + what);
}

// Labels of the three row bands x three column bands a cyclic shift creates.
std::vector<int> shift_regions(std::size_t ph, std::size_t pw, std::size_t m, std::size_t s) {
  auto band = [m, s](std::size_t i, std::size_t extent) {
    if (i < extent - m) return 0;
    if (i < extent - s) return 1;
    return 2;
  };
  std::vector<int> labels(ph * pw);
  for (std::size_t r = 0; r < ph; ++r)
    for (std::size_t c = 0; c < pw; ++c) labels[r * pw + c] = 3 * band(r, ph) + band(c, pw);
  return labels;
}

FeatureMap roll(const FeatureMap& f, std::ptrdiff_t dr, std::ptrdiff_t dc) {
  const auto h = static_cast<std::ptrdiff_t>(f.height());
  const auto w = static_cast<std::ptrdiff_t>(f.width());
  FeatureMap out(f.height(), f.width(), f.channels());
  for (std::ptrdiff_t r = 0; r < h; ++r) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      const auto sr = static_cast<std::size_t>(((r + dr) % h + h) % h);
      const auto sc = static_cast<std::size_t>(((c + dc) % w + w) % w);
      out.set_pixel(static_cast<std::size_t>(r), static_cast<std::size_t>(c), f.pixel(sr, sc));
    }
  }
  return out;
}

FeatureMap pad_to(const FeatureMap& f, std::size_t ph, std::size_t pw) {
  if (ph == f.height() && pw == f.width()) return f;
  FeatureMap out(ph, pw, f.channels(), 0.0);
  for (std::size_t r = 0; r < f.height(); ++r)
    for (std::size_t c = 0; c < f.width(); ++c) out.set_pixel(r, c, f.pixel(r, c));
  return out;
}

}  // namespace

Eigen::RowVectorXd layer_norm(const Eigen::RowVectorXd& x, const Eigen::VectorXd& gamma,
                              const Eigen::VectorXd& beta, double eps) {
  const double mean = x.mean();
  const Eigen::RowVectorXd centred = x.array() - mean;
  const double var = centred.squaredNorm() / static_cast<double>(x.size());
  const double inv = 1.0 / std::sqrt(var + eps);
  return (centred * inv).cwiseProduct(gamma.transpose()) + beta.transpose();
}

void SpatialAttentionParams::validate() const {
  if (channels == 0 || heads == 0 || window == 0) {
    throw ConfigError("spatial attention params: channels, heads, window must be > 0");
  }
  if (channels % heads != 0) throw ConfigError("spatial attention params: heads must divide C");
  const auto c = static_cast<Index>(channels);
  const auto m = static_cast<Index>(2 * window - 1);
  expect(ln1_gamma.size() == c && ln1_beta.size() == c, "ln1 must have C entries");
  expect(ln2_gamma.size() == c && ln2_beta.size() == c, "ln2 must have C entries");
  expect(wqkv.rows() == 3 * c && wqkv.cols() == c && bqkv.size() == 3 * c, "qkv must be 3C x C");
  expect(wproj.rows() == c && wproj.cols() == c && bproj.size() == c, "proj must be C x C");
  expect(rel_bias.rows() == m * m && rel_bias.cols() == static_cast<Index>(heads),
         "relative bias must be (2M-1)^2 x heads");
  const auto hid = static_cast<Index>(hidden);
  expect(ffn_w1.rows() == hid && ffn_w1.cols() == c && ffn_b1.size() == hid,
         "ffn_w1 must be hidden x C");
  expect(ffn_w2.rows() == c && ffn_w2.cols() == hid && ffn_b2.size() == c,
         "ffn_w2 must be C x hidden");
}

SpatialAttentionParams SpatialAttentionParams::zeros(std::size_t channels, std::size_t heads,
                                                     std::size_t window, std::size_t hidden) {
  SpatialAttentionParams p;
  p.channels = channels;
  p.heads = heads;
  p.window = window;
  p.hidden = hidden;
  const auto c = static_cast<Index>(channels);
  const auto hid = static_cast<Index>(hidden);
  const auto m = static_cast<Index>(2 * window - 1);
  p.ln1_gamma = p.ln2_gamma = Eigen::VectorXd::Ones(c);
  p.ln1_beta = p.ln2_beta = Eigen::VectorXd::Zero(c);
  p.wqkv = Eigen::MatrixXd::Zero(3 * c, c);
  p.bqkv = Eigen::VectorXd::Zero(3 * c);
  p.wproj = Eigen::MatrixXd::Zero(c, c);
  p.bproj = Eigen::VectorXd::Zero(c);
  p.rel_bias = Eigen::MatrixXd::Zero(m * m, static_cast<Index>(heads));
  p.ffn_w1 = Eigen::MatrixXd::Zero(hid, c);
  p.ffn_b1 = Eigen::VectorXd::Zero(hid);
  p.ffn_w2 = Eigen::MatrixXd::Zero(c, hid);
  p.ffn_b2 = Eigen::VectorXd::Zero(c);
  return p;
}

SpatialAttentionParams SpatialAttentionParams::random(std::size_t channels, std::size_t heads,
                                                      std::size_t window, std::size_t hidden,
                                                      std::uint64_t seed) {
  SpatialAttentionParams p = zeros(channels, heads, window, hidden);
  Rng rng(seed);
  auto fill = [&rng](Eigen::MatrixXd& m, double scale) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.normal();
  };
  const double cs = 1.0 / std::sqrt(static_cast<double>(channels));
  fill(p.wqkv, cs);
  fill(p.wproj, cs);
  fill(p.ffn_w1, cs);
  fill(p.ffn_w2, 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden, 1))));
  return p;
}

WindowAttentionResult window_self_attention(const Eigen::MatrixXd& tokens,
                                            const SpatialAttentionParams& params,
                                            const std::vector<int>& region_labels) {
  const auto c = static_cast<Index>(params.channels);
  const Index n = tokens.rows();
  const auto m = static_cast<Index>(params.window);
  if (tokens.cols() != c || n != m * m) {
    throw ShapeError("window_self_attention: tokens must be (M*M) x C");
  }
  if (!region_labels.empty() && region_labels.size() != static_cast<std::size_t>(n)) {
    throw ShapeError("window_self_attention: one region label per token");
  }

  const Eigen::MatrixXd qkv = (tokens * params.wqkv.transpose()).rowwise() +
                              params.bqkv.transpose();
  const auto hd = c / static_cast<Index>(params.heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  const Index span = 2 * m - 1;

  WindowAttentionResult result;
  Eigen::MatrixXd merged(n, c);
  for (Index h = 0; h < static_cast<Index>(params.heads); ++h) {
    const auto q = qkv.middleCols(h * hd, hd);
    const auto k = qkv.middleCols(c + h * hd, hd);
    const auto v = qkv.middleCols(2 * c + h * hd, hd);
    Eigen::MatrixXd attn = (q * k.transpose()) * scale;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const Index dr = i / m - j / m + m - 1;
        const Index dc = i % m - j % m + m - 1;
        attn(i, j) += params.rel_bias(dr * span + dc, h);
        if (!region_labels.empty() && region_labels[static_cast<std::size_t>(i)] !=
                                          region_labels[static_cast<std::size_t>(j)]) {
          attn(i, j) = -std::numeric_limits<double>::infinity();
        }
      }
      // Token i always sees itself, so the row max is finite.
      const double peak = attn.row(i).maxCoeff();
      double sum = 0.0;
      for (Index j = 0; j < n; ++j) {
        attn(i, j) = std::exp(attn(i, j) - peak);
        sum += attn(i, j);
      }
      attn.row(i) /= sum;
    }
    merged.middleCols(h * hd, hd) = attn * v;
    result.attention.push_back(std::move(attn));
  }
  result.output = (merged * params.wproj.transpose()).rowwise() + params.bproj.transpose();
  return result;
}

FeatureMap window_msa(const FeatureMap& f, const SpatialAttentionParams& params, bool shifted) {
  params.validate();
  if (f.channels() != params.channels) {
    std::ostringstream msg;
    msg << "window_msa: map has " << f.channels() << " channels, params expect "
        << params.channels;
    throw ShapeError(msg.str());
  }
  const std::size_t m = params.window;
  const std::size_t h = f.height();
  const std::size_t w = f.width();

  FeatureMap normed(h, w, f.channels());
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c)
      normed.set_pixel(r, c, layer_norm(f.pixel(r, c), params.ln1_gamma, params.ln1_beta,
                                        params.ln_eps));

  const std::size_t ph = (h + m - 1) / m * m;
  const std::size_t pw = (w + m - 1) / m * m;
  FeatureMap work = pad_to(normed, ph, pw);
  const std::size_t s = shifted ? m / 2 : 0;
  std::vector<int> labels;
  if (s > 0) {
    work = roll(work, static_cast<std::ptrdiff_t>(s), static_cast<std::ptrdiff_t>(s));
    labels = shift_regions(ph, pw, m, s);
  }

  WindowSet set = window_partition(work, m);
  const std::size_t per_row = pw / m;
  for (std::size_t wi = 0; wi < set.windows.size(); ++wi) {
    std::vector<int> local;
    if (!labels.empty()) {
      const std::size_t wr = (wi / per_row) * m;
      const std::size_t wc = (wi % per_row) * m;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) local.push_back(labels[(wr + i) * pw + wc + j]);
    }
    set.windows[wi] = window_self_attention(set.windows[wi], params, local).output;
  }
  FeatureMap attended = window_merge(set);
  if (s > 0) {
    attended = roll(attended, -static_cast<std::ptrdiff_t>(s), -static_cast<std::ptrdiff_t>(s));
  }

  FeatureMap out(h, w, f.channels());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const Eigen::RowVectorXd spa = f.pixel(r, c) + attended.pixel(r, c);
      const Eigen::RowVectorXd ln = layer_norm(spa, params.ln2_gamma, params.ln2_beta,
                                               params.ln_eps);
      Eigen::VectorXd hidden = params.ffn_w1 * ln.transpose() + params.ffn_b1;
      for (Index i = 0; i < hidden.size(); ++i) hidden(i) = gelu(hidden(i));
      const Eigen::VectorXd ffn = params.ffn_w2 * hidden + params.ffn_b2;
      out.set_pixel(r, c, spa + ffn.transpose());
    }
  }
  return out;
}

}  // namespace cidcassi
