// SPDX-License-Identifier: Apache-2.0
#pragma once

// Forward-only reference kernels for the hybrid spatial-spectral attention
// blocks: window partitioning, TopK spectral attention (single and
// multi-ratio) and Swin-style windowed spatial self-attention. They exist to
// check the mechanisms at desk scale, not to train anything.

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace cidcassi {

/// H x W x C activations, pixel-major (channel fastest).
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }

  double& at(std::size_t r, std::size_t c, std::size_t ch) noexcept {
    return values_[(r * width_ + c) * channels_ + ch];
  }
  double at(std::size_t r, std::size_t c, std::size_t ch) const noexcept {
    return values_[(r * width_ + c) * channels_ + ch];
  }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Channel vector of one pixel as a row.
  Eigen::RowVectorXd pixel(std::size_t r, std::size_t c) const;
  void set_pixel(std::size_t r, std::size_t c, const Eigen::Ref<const Eigen::RowVectorXd>& v);

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
};

/// Non-overlapping n x n windows in row-major window order. Each window is a
/// (n*n) x C matrix whose rows are the window's pixels in row-major order.
/// Input dims that are not multiples of n are zero-padded; the original
/// dims are kept so window_merge can crop.
struct WindowSet {
  std::size_t window = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t padded_height = 0;
  std::size_t padded_width = 0;
  std::size_t channels = 0;
  std::vector<Eigen::MatrixXd> windows;
};

WindowSet window_partition(const FeatureMap& f, std::size_t n);
FeatureMap window_merge(const WindowSet& set);

/// Row-wise TopK mask + softmax of a score matrix. Each row keeps its k
/// largest entries (ties go to the lower column index); every other entry
/// of the result is exactly 0.
Eigen::MatrixXd topk_softmax(const Eigen::MatrixXd& scores, std::size_t k);

/// Parameters of the TopK spectral attention.
///
/// At a pixel with channel vector x, the 1x1 projections give
///   Q = reshape(wq * x, C, heads * head_dim)    (likewise K, V)
/// and head h uses columns [h*head_dim, (h+1)*head_dim). The C x (heads *
/// head_dim) result is flattened row-major and mapped back to C channels by
///   out = wo * vec(Z) + bo.
struct SpectralAttentionParams {
  std::size_t channels = 0;
  std::size_t heads = 1;
  std::size_t head_dim = 1;
  Eigen::MatrixXd wq, wk, wv;  // (C * heads * head_dim) x C
  Eigen::MatrixXd wo;          // C x (C * heads * head_dim)
  Eigen::VectorXd bo;          // C

  void validate() const;
  /// Projections that make Q = K = V = x (as a C x 1 matrix) and out = Z.
  static SpectralAttentionParams identity(std::size_t channels);
  static SpectralAttentionParams random(std::size_t channels, std::size_t heads,
                                        std::size_t head_dim, std::uint64_t seed);
};

/// Per-pixel attention maps of one window, indexed [pixel][head].
struct SpectralAttentionMaps {
  std::vector<std::vector<Eigen::MatrixXd>> maps;
};

/// TopK spectral attention on one window ((n*n) x C). Throws ConfigError
/// unless 1 <= k <= C. If maps is non-null it receives the attention maps.
Eigen::MatrixXd topk_spectral_attention(const Eigen::MatrixXd& window,
                                        const SpectralAttentionParams& params, std::size_t k,
                                        SpectralAttentionMaps* maps = nullptr);

/// k = ceil(ratio * C), with a 1e-9 guard so 4/5 of 5 is 4 rather than 5.
std::size_t topk_count(double ratio, std::size_t channels);

/// Weighted sum over ratios of the TopK attention outputs, sharing one
/// Q/K/V computation:
///   out = wo * vec(sum_r weights[r] * A_r V) + bo
Eigen::MatrixXd multi_ratio_attention(const Eigen::MatrixXd& window,
                                      const SpectralAttentionParams& params,
                                      const std::vector<double>& ratios,
                                      const std::vector<double>& weights);

/// Ratio set used by the reference network.
std::vector<double> default_topk_ratios();

/// Applies TopK spectral attention window by window to a whole feature map.
FeatureMap spectral_attention_map(const FeatureMap& f, const SpectralAttentionParams& params,
                                  std::size_t window, const std::vector<double>& ratios,
                                  const std::vector<double>& weights);

/// Parameters of one Swin-style block:
///   Z_spa = MSA(LN1(X)) + X
///   Z_out = FFN(LN2(Z_spa)) + Z_spa
/// Linear maps act on row vectors as x * W^T + b.
struct SpatialAttentionParams {
  std::size_t channels = 0;
  std::size_t heads = 1;
  std::size_t window = 1;
  std::size_t hidden = 0;
  double ln_eps = 1e-5;
  Eigen::VectorXd ln1_gamma, ln1_beta;
  Eigen::MatrixXd wqkv;  // 3C x C, rows ordered q, k, v
  Eigen::VectorXd bqkv;  // 3C
  Eigen::MatrixXd wproj;  // C x C
  Eigen::VectorXd bproj;
  /// Relative position bias, (2M-1)^2 x heads. Zero unless trained values exist.
  Eigen::MatrixXd rel_bias;
  Eigen::VectorXd ln2_gamma, ln2_beta;
  Eigen::MatrixXd ffn_w1;  // hidden x C
  Eigen::VectorXd ffn_b1;
  Eigen::MatrixXd ffn_w2;  // C x hidden
  Eigen::VectorXd ffn_b2;

  void validate() const;
  /// All projection and FFN weights and biases zero; LN at gamma 1, beta 0.
  static SpatialAttentionParams zeros(std::size_t channels, std::size_t heads,
                                      std::size_t window, std::size_t hidden);
  static SpatialAttentionParams random(std::size_t channels, std::size_t heads,
                                       std::size_t window, std::size_t hidden,
                                       std::uint64_t seed);
};

struct WindowAttentionResult {
  Eigen::MatrixXd output;                  // tokens x C, after the output projection
  std::vector<Eigen::MatrixXd> attention;  // one tokens x tokens map per head
};

/// Multi-head self-attention over the tokens of one M x M window (tokens are
/// rows). region_labels, when non-empty, forbids attention between tokens
/// with different labels (the shifted-window mask).
WindowAttentionResult window_self_attention(const Eigen::MatrixXd& tokens,
                                            const SpatialAttentionParams& params,
                                            const std::vector<int>& region_labels = {});

/// Full block. When shifted, the map is rolled by -M/2 on both axes before
/// partitioning, masked so tokens only see their own region, and rolled back.
FeatureMap window_msa(const FeatureMap& f, const SpatialAttentionParams& params, bool shifted);

/// Layer norm over channels, per pixel.
Eigen::RowVectorXd layer_norm(const Eigen::RowVectorXd& x, const Eigen::VectorXd& gamma,
                              const Eigen::VectorXd& beta, double eps);

/// Parameter bundles: a JSON manifest naming each tensor plus one cube file
/// per tensor (1 band, rows x cols). Values pass through float32.
void save_spectral_params(const SpectralAttentionParams& p, const std::filesystem::path& manifest);
SpectralAttentionParams load_spectral_params(const std::filesystem::path& manifest);
void save_spatial_params(const SpatialAttentionParams& p, const std::filesystem::path& manifest);
SpatialAttentionParams load_spatial_params(const std::filesystem::path& manifest);

}  // namespace cidcassi
