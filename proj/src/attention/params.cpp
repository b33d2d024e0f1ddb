// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "cidcassi/attention.hpp"
#include "cidcassi/error.hpp"
#include "cidcassi/io.hpp"

namespace cidcassi {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

fs::path tensor_path(const fs::path& manifest, const std::string& name) {
  return manifest.parent_path() / (manifest.stem().string() + "." + name + ".cidc");
}

void save_tensor(const Eigen::MatrixXd& m, const fs::path& manifest, const std::string& name,
                 json& index) {
  Plane plane(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      plane.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  const fs::path path = tensor_path(manifest, name);
  plane_write(plane, path);
  index[name] = {{"file", path.filename().string()}, {"rows", m.rows()}, {"cols", m.cols()}};
}

Eigen::MatrixXd load_tensor(const json& index, const fs::path& manifest, const std::string& name,
                            std::size_t rows, std::size_t cols) {
  if (!index.contains(name)) throw ParseError("parameter manifest: missing tensor \"" + name + "\"");
  const auto file = index.at(name).at("file").get<std::string>();
  const Plane plane = plane_read(manifest.parent_path() / file);
  if (plane.height() != rows || plane.width() != cols) {
    std::ostringstream msg;
    msg << "parameter manifest: tensor \"" << name << "\" is " << plane.height() << "x"
        << plane.width() << ", expected " << rows << "x" << cols;
    throw ShapeError(msg.str());
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = plane.at(r, c);
  return m;
}

Eigen::VectorXd load_vector(const json& index, const fs::path& manifest, const std::string& name,
                            std::size_t n) {
  return load_tensor(index, manifest, name, n, 1).col(0);
}

json read_manifest(const fs::path& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "parameter manifest: invalid JSON at byte offset " << e.byte;
    throw ParseError(msg.str());
  }
  if (j.value("kind", std::string()) != kind) {
    throw ParseError("parameter manifest: expected kind \"" + kind + "\"");
  }
  return j;
}

void write_manifest(const json& j, const fs::path& path) {
  write_atomically(path, [&j](std::ostream& out) { out << j.dump(2) << '\n'; });
}

}  // namespace

void save_spectral_params(const SpectralAttentionParams& p, const fs::path& manifest) {
  p.validate();
  json tensors = json::object();
  save_tensor(p.wq, manifest, "wq", tensors);
  save_tensor(p.wk, manifest, "wk", tensors);
  save_tensor(p.wv, manifest, "wv", tensors);
  save_tensor(p.wo, manifest, "wo", tensors);
  save_tensor(p.bo, manifest, "bo", tensors);
  json j{{"kind", "spectral_attention"},
         {"channels", p.channels},
         {"heads", p.heads},
         {"head_dim", p.head_dim},
         {"tensors", tensors}};
  write_manifest(j, manifest);
}

SpectralAttentionParams load_spectral_params(const fs::path& manifest) {
  const json j = read_manifest(manifest, "spectral_attention");
  SpectralAttentionParams p;
  try {
    p.channels = j.at("channels").get<std::size_t>();
    p.heads = j.at("heads").get<std::size_t>();
    p.head_dim = j.at("head_dim").get<std::size_t>();
    const json& t = j.at("tensors");
    const std::size_t inner = p.channels * p.heads * p.head_dim;
    p.wq = load_tensor(t, manifest, "wq", inner, p.channels);
    p.wk = load_tensor(t, manifest, "wk", inner, p.channels);
    p.wv = load_tensor(t, manifest, "wv", inner, p.channels);
    p.wo = load_tensor(t, manifest, "wo", p.channels, inner);
    p.bo = load_vector(t, manifest, "bo", p.channels);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("parameter manifest: ") + e.what());
  }
  p.validate();
  return p;
}

void save_spatial_params(const SpatialAttentionParams& p, const fs::path& manifest) {
  p.validate();
  json tensors = json::object();
  save_tensor(p.ln1_gamma, manifest, "ln1_gamma", tensors);
  save_tensor(p.ln1_beta, manifest, "ln1_beta", tensors);
  save_tensor(p.wqkv, manifest, "wqkv", tensors);
  save_tensor(p.bqkv, manifest, "bqkv", tensors);
  save_tensor(p.wproj, manifest, "wproj", tensors);
  save_tensor(p.bproj, manifest, "bproj", tensors);
  save_tensor(p.rel_bias, manifest, "rel_bias", tensors);
  save_tensor(p.ln2_gamma, manifest, "ln2_gamma", tensors);
  save_tensor(p.ln2_beta, manifest, "ln2_beta", tensors);
  save_tensor(p.ffn_w1, manifest, "ffn_w1", tensors);
  save_tensor(p.ffn_b1, manifest, "ffn_b1", tensors);
  save_tensor(p.ffn_w2, manifest, "ffn_w2", tensors);
  save_tensor(p.ffn_b2, manifest, "ffn_b2", tensors);
  json j{{"kind", "spatial_attention"}, {"channels", p.channels}, {"heads", p.heads},
         {"window", p.window},          {"hidden", p.hidden},     {"ln_eps", p.ln_eps},
         {"tensors", tensors}};
  write_manifest(j, manifest);
}

SpatialAttentionParams load_spatial_params(const fs::path& manifest) {
  const json j = read_manifest(manifest, "spatial_attention");
  SpatialAttentionParams p;
  try {
    p.channels = j.at("channels").get<std::size_t>();
    p.heads = j.at("heads").get<std::size_t>();
    p.window = j.at("window").get<std::size_t>();
    p.hidden = j.at("hidden").get<std::size_t>();
    p.ln_eps = j.value("ln_eps", 1e-5);
    const json& t = j.at("tensors");
    const std::size_t c = p.channels;
    const std::size_t span = 2 * p.window - 1;
    p.ln1_gamma = load_vector(t, manifest, "ln1_gamma", c);
    p.ln1_beta = load_vector(t, manifest, "ln1_beta", c);
    p.wqkv = load_tensor(t, manifest, "wqkv", 3 * c, c);
    p.bqkv = load_vector(t, manifest, "bqkv", 3 * c);
    p.wproj = load_tensor(t, manifest, "wproj", c, c);
    p.bproj = load_vector(t, manifest, "bproj", c);
    p.rel_bias = load_tensor(t, manifest, "rel_bias", span * span, p.heads);
    p.ln2_gamma = load_vector(t, manifest, "ln2_gamma", c);
    p.ln2_beta = load_vector(t, manifest, "ln2_beta", c);
    p.ffn_w1 = load_tensor(t, manifest, "ffn_w1", p.hidden, c);
    p.ffn_b1 = load_vector(t, manifest, "ffn_b1", p.hidden);
    p.ffn_w2 = load_tensor(t, manifest, "ffn_w2", c, p.hidden);
    p.ffn_b2 = load_vector(t, manifest, "ffn_b2", c);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("parameter manifest: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace cidcassi
