// SPDX-License-Identifier: Apache-2.0

#include "cidcassi/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "cidcassi/attention.hpp"
#include "cidcassi/decomposition.hpp"
#include "cidcassi/error.hpp"
#include "cidcassi/io.hpp"
#include "cidcassi/metrics.hpp"
#include "cidcassi/random.hpp"
#include "cidcassi/scene.hpp"
#include "cidcassi/simd/kernels.hpp"
#include "cidcassi/solver.hpp"

namespace cidcassi {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  write_atomically(path, [&text](std::ostream& out) { out << text; });
}

DispersionAxis parse_axis(const std::string& s) {
  return s == "v" ? DispersionAxis::vertical : DispersionAxis::horizontal;
}

Plane constant_plane(std::size_t h, std::size_t w, double v) { return Plane(h, w, v); }

/// Band count implied by the detector extent, or the explicit value.
std::size_t infer_bands(const Measurement& y, const CodedMask& mask, std::size_t d,
                        DispersionAxis axis, std::size_t requested) {
  const std::size_t scene_extent = axis == DispersionAxis::horizontal ? mask.width() : mask.height();
  const std::size_t meas_extent = axis == DispersionAxis::horizontal ? y.width() : y.height();
  if (d == 0) {
    if (requested == 0) throw ConfigError("--bands is required when --d is 0");
    return requested;
  }
  if (meas_extent < scene_extent || (meas_extent - scene_extent) % d != 0) {
    std::ostringstream msg;
    msg << "measurement extent " << meas_extent << " does not match mask extent " << scene_extent
        << " with shift step " << d;
    throw ShapeError(msg.str());
  }
  const std::size_t bands = (meas_extent - scene_extent) / d + 1;
  if (requested != 0 && requested != bands) {
    std::ostringstream msg;
    msg << "--bands " << requested << " disagrees with the measurement, which implies " << bands;
    throw ShapeError(msg.str());
  }
  return bands;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scene, mask, out_meas, out_pan, out_truth;
  std::size_t d = 1;
  std::string axis = "h";
  double sigma = 0.0;
  double pan_noise = 0.0;
  std::uint64_t seed = 0;
};

void run_simulate(const SimulateArgs& a) {
  const SpectralCube truth = generate_scene(load_scene_spec(a.scene));
  const CodedMask mask = mask_read(a.mask);
  const SceneDims dims{truth.height(), truth.width(), truth.bands()};
  const SensingOperator op =
      build_operator(mask, GuidanceCube::unit(dims.height, dims.width, dims.bands), a.d,
                     parse_axis(a.axis), dims);
  Measurement y = apply_forward(op, truth);
  if (a.sigma > 0.0) {
    NoiseModel noise{constant_plane(y.height(), y.width(), a.sigma), 0.0};
    y = add_noise(y, noise, a.seed);
  }
  IntensityMap pan = band_mean(truth);
  if (a.pan_noise > 0.0) {
    Rng rng(a.seed ^ 0x9e3779b97f4a7c15ULL);
    for (double& v : pan.values()) v = std::max(0.0, v + a.pan_noise * rng.normal());
  }
  cube_write(truth, a.out_truth);
  plane_write(y, a.out_meas);
  plane_write(pan, a.out_pan);
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string meas, pan, rgb, mask, out, trace, out_chroma;
  bool unguided = false;
  std::vector<double> band_centers;
  std::vector<double> anchors;
  std::size_t d = 1;
  std::string axis = "h";
  std::string solver = "cid-tv";
  std::string estimator = "residual";
  std::size_t stages = 30;
  std::size_t tv_iterations = kDefaultTvIterations;
  double tau = 1.0;
  double mu = 1.0;
  double sigma = 0.0;
  std::size_t bands = 0;
};

GuidanceCube load_guidance(const ReconstructArgs& a, SceneDims dims) {
  if (!a.pan.empty()) {
    const Plane pan = plane_read(a.pan);
    IntensityMap intensity{pan};
    return GuidanceCube::pan(intensity, dims.bands);
  }
  if (!a.rgb.empty()) {
    const SpectralCube rgb_cube = cube_read(a.rgb);
    if (rgb_cube.bands() != 3) throw ShapeError("--rgb must hold exactly 3 bands");
    if (a.band_centers.size() != dims.bands) {
      std::ostringstream msg;
      msg << "--band-centers lists " << a.band_centers.size() << " values for " << dims.bands
          << " bands";
      throw ConfigError(msg.str());
    }
    if (a.anchors.size() != 3) throw ConfigError("--anchors needs exactly 3 values");
    RgbImage rgb{{rgb_cube.band_plane(0), rgb_cube.band_plane(1), rgb_cube.band_plane(2)}};
    return expand_rgb_guidance(rgb, a.band_centers, {a.anchors[0], a.anchors[1], a.anchors[2]});
  }
  return GuidanceCube::unit(dims.height, dims.width, dims.bands);
}

std::string trace_csv(const SolveTrace& trace) {
  std::ostringstream out;
  out << "stage,residual_norm,consistency_norm,mean_sigma,omega\n";
  for (std::size_t i = 0; i < trace.stages.size(); ++i) {
    const StageRecord& s = trace.stages[i];
    out << i + 1 << ',' << format_number(s.residual_norm) << ','
        << format_number(s.consistency_norm) << ',' << format_number(s.mean_sigma) << ','
        << format_number(s.omega) << '\n';
  }
  return out.str();
}

void run_reconstruct(const ReconstructArgs& a) {
  const Measurement y{plane_read(a.meas)};
  const CodedMask mask = mask_read(a.mask);
  const DispersionAxis axis = parse_axis(a.axis);
  const SceneDims dims{mask.height(), mask.width(), infer_bands(y, mask, a.d, axis, a.bands)};
  const GuidanceCube guidance = load_guidance(a, dims);
  const SensingOperator op = build_operator(mask, guidance, a.d, axis, dims);

  SolverConfig config;
  config.stages = a.stages;
  config.tau = a.tau;
  config.mu = a.mu;
  config.denoiser = a.solver == "cid-identity" ? DenoiserKind::identity : DenoiserKind::tv;
  config.noise_estimator =
      a.estimator == "fixed" ? NoiseEstimatorKind::fixed : NoiseEstimatorKind::residual;
  config.fixed_sigma = a.sigma;
  config.tv_iterations = a.tv_iterations;
  config.record_trace = !a.trace.empty();
  const SolveResult result = run_hqs(y, op, config);

  cube_write(recompose(result.estimate, guidance), a.out);
  if (!a.out_chroma.empty()) cube_write(result.estimate, a.out_chroma);
  if (!a.trace.empty()) write_text(a.trace, trace_csv(result.trace));
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string ref, rec, out;
  double range = 1.0;
};

void run_evaluate(const EvaluateArgs& a) {
  const EvalReport report = evaluate_cube(cube_read(a.ref), cube_read(a.rec), a.range);
  std::ostringstream out;
  out << "band,psnr_db,ssim\n";
  for (std::size_t b = 0; b < report.band_psnr.size(); ++b) {
    out << b << ',' << format_number(report.band_psnr[b]) << ','
        << format_number(report.band_ssim[b]) << '\n';
  }
  out << "mean," << format_number(report.mean_psnr) << ',' << format_number(report.mean_ssim)
      << '\n';
  write_text(a.out, out.str());
}

// ---------------------------------------------------------------------------

struct DecomposeArgs {
  std::string in, out_chroma, out_intensity, out_csv;
  double eps = kDefaultEpsilon;
};

void run_decompose(const DecomposeArgs& a) {
  const Decomposition dec = decompose(cube_read(a.in), a.eps);
  cube_write(dec.chromaticity, a.out_chroma);
  plane_write(dec.intensity, a.out_intensity);
  if (a.out_csv.empty()) return;
  std::ostringstream out;
  out << "band,chroma_mean,chroma_min,chroma_max\n";
  for (std::size_t b = 0; b < dec.chromaticity.bands(); ++b) {
    const auto band = dec.chromaticity.band(b);
    double sum = 0.0;
    double lo = band.empty() ? 0.0 : band[0];
    double hi = lo;
    for (double v : band) {
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out << b << ',' << format_number(sum / static_cast<double>(band.size())) << ','
        << format_number(lo) << ',' << format_number(hi) << '\n';
  }
  write_text(a.out_csv, out.str());
}

// ---------------------------------------------------------------------------

struct SpectraArgs {
  std::string in, out;
  std::vector<std::size_t> roi;
  bool chroma = false;
  double eps = kDefaultEpsilon;
};

SpectralCube maybe_chroma(const std::string& path, bool chroma, double eps) {
  SpectralCube cube = cube_read(path);
  if (!chroma) return cube;
  return decompose(cube, eps).chromaticity;
}

void run_spectra(const SpectraArgs& a) {
  const SpectralCube cube = maybe_chroma(a.in, a.chroma, a.eps);
  const std::size_t x = a.roi[0], y = a.roi[1], w = a.roi[2], h = a.roi[3];
  if (w == 0 || h == 0 || x + w > cube.width() || y + h > cube.height()) {
    std::ostringstream msg;
    msg << "ROI " << x << ',' << y << ',' << w << ',' << h << " does not fit a "
        << cube.shape_string() << " cube";
    throw ShapeError(msg.str());
  }
  const double count = static_cast<double>(w * h);
  std::ostringstream out;
  out << "band,mean,std\n";
  for (std::size_t b = 0; b < cube.bands(); ++b) {
    double sum = 0.0;
    for (std::size_t r = y; r < y + h; ++r)
      for (std::size_t c = x; c < x + w; ++c) sum += cube.at(b, r, c);
    const double mean = sum / count;
    double sq = 0.0;
    for (std::size_t r = y; r < y + h; ++r)
      for (std::size_t c = x; c < x + w; ++c) sq += (cube.at(b, r, c) - mean) * (cube.at(b, r, c) - mean);
    out << b << ',' << format_number(mean) << ',' << format_number(std::sqrt(sq / count)) << '\n';
  }
  write_text(a.out, out.str());
}

// ---------------------------------------------------------------------------

struct CorrArgs {
  std::string in, out;
  bool chroma = false;
  double eps = kDefaultEpsilon;
};

void run_corr(const CorrArgs& a) {
  const Eigen::MatrixXd corr = spectral_correlation(maybe_chroma(a.in, a.chroma, a.eps));
  std::ostringstream out;
  out << "band";
  for (Eigen::Index j = 0; j < corr.cols(); ++j) out << ',' << j;
  out << '\n';
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < corr.cols(); ++j) out << ',' << format_number(corr(i, j));
    out << '\n';
  }
  write_text(a.out, out.str());
}

// ---------------------------------------------------------------------------

struct MakeMaskArgs {
  std::size_t height = 0, width = 0;
  double density = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

void run_make_mask(const MakeMaskArgs& a) {
  Rng rng(a.seed);
  CodedMask mask{Plane(a.height, a.width)};
  for (double& v : mask.values()) v = rng.uniform() < a.density ? 1.0 : 0.0;
  if (fs::path(a.out).extension() == ".pgm") {
    pgm_write_mask(mask, a.out);
  } else {
    plane_write(mask, a.out);
  }
}

struct GenSceneArgs {
  std::string scene, out;
};

void run_gen_scene(const GenSceneArgs& a) {
  cube_write(generate_scene(load_scene_spec(a.scene)), a.out);
}

// ---------------------------------------------------------------------------

struct InitParamsArgs {
  std::string kind = "spectral";
  std::size_t channels = 0, heads = 1, head_dim = 1, window = 4, hidden = 0;
  std::uint64_t seed = 0;
  bool zero = false;
  std::string out;
};

void run_init_params(const InitParamsArgs& a) {
  if (a.kind == "spectral") {
    const auto p = a.zero ? SpectralAttentionParams::identity(a.channels)
                          : SpectralAttentionParams::random(a.channels, a.heads, a.head_dim, a.seed);
    save_spectral_params(p, a.out);
  } else {
    const std::size_t hidden = a.hidden > 0 ? a.hidden : 2 * a.channels;
    const auto p = a.zero ? SpatialAttentionParams::zeros(a.channels, a.heads, a.window, hidden)
                          : SpatialAttentionParams::random(a.channels, a.heads, a.window, hidden,
                                                           a.seed);
    save_spatial_params(p, a.out);
  }
}

struct AttendArgs {
  std::string kind = "spectral";
  std::string in, params, out;
  std::size_t window = 4;
  std::vector<double> ratios;
  std::vector<double> weights;
  bool shifted = false;
};

FeatureMap cube_to_features(const SpectralCube& cube) {
  FeatureMap f(cube.height(), cube.width(), cube.bands());
  for (std::size_t b = 0; b < cube.bands(); ++b)
    for (std::size_t r = 0; r < cube.height(); ++r)
      for (std::size_t c = 0; c < cube.width(); ++c) f.at(r, c, b) = cube.at(b, r, c);
  return f;
}

SpectralCube features_to_cube(const FeatureMap& f) {
  SpectralCube cube(f.height(), f.width(), f.channels());
  for (std::size_t b = 0; b < f.channels(); ++b)
    for (std::size_t r = 0; r < f.height(); ++r)
      for (std::size_t c = 0; c < f.width(); ++c) cube.at(b, r, c) = f.at(r, c, b);
  return cube;
}

void run_attend(const AttendArgs& a) {
  const FeatureMap f = cube_to_features(cube_read(a.in));
  FeatureMap result;
  if (a.kind == "spectral") {
    const SpectralAttentionParams p = load_spectral_params(a.params);
    const std::vector<double> ratios = a.ratios.empty() ? default_topk_ratios() : a.ratios;
    std::vector<double> weights = a.weights;
    if (weights.empty()) weights.assign(ratios.size(), 1.0 / static_cast<double>(ratios.size()));
    if (weights.size() != ratios.size()) {
      throw ConfigError("--weights must list one value per ratio");
    }
    result = spectral_attention_map(f, p, a.window, ratios, weights);
  } else {
    result = window_msa(f, load_spatial_params(a.params), a.shifted);
  }
  // Attention outputs may be negative; write without the radiance check.
  cube_write(features_to_cube(result), a.out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chromaticity-intensity decomposition tools for dual-camera CASSI", "cidcassi"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel backend")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  const auto axis_check = CLI::IsMember({"h", "v"});

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a scene, measure it, write PAN and truth");
  simulate->add_option("--scene", sim.scene, "Scene spec (JSON)")->required();
  simulate->add_option("--mask", sim.mask, "Coded mask (PGM or cube file)")->required();
  simulate->add_option("--d", sim.d, "Dispersion shift per band in pixels")->required();
  simulate->add_option("--axis", sim.axis, "Dispersion axis")->check(axis_check);
  simulate->add_option("--sigma", sim.sigma, "Measurement noise std")->check(CLI::NonNegativeNumber);
  simulate->add_option("--pan-noise", sim.pan_noise, "PAN noise std")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "Noise seed");
  simulate->add_option("--out-meas", sim.out_meas)->required();
  simulate->add_option("--out-pan", sim.out_pan)->required();
  simulate->add_option("--out-truth", sim.out_truth)->required();

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Solve for chromaticity and recompose");
  reconstruct->add_option("--meas", rec.meas, "Measurement (cube file)")->required();
  auto* pan_opt = reconstruct->add_option("--pan", rec.pan, "PAN intensity guidance");
  auto* rgb_opt = reconstruct->add_option("--rgb", rec.rgb, "3-band RGB guidance");
  auto* unguided_opt = reconstruct->add_flag("--unguided", rec.unguided, "Guidance of ones");
  pan_opt->excludes(rgb_opt)->excludes(unguided_opt);
  rgb_opt->excludes(unguided_opt);
  auto* centers_opt = reconstruct->add_option("--band-centers", rec.band_centers)->delimiter(',');
  auto* anchors_opt = reconstruct->add_option("--anchors", rec.anchors)->delimiter(',');
  rgb_opt->needs(centers_opt)->needs(anchors_opt);
  reconstruct->add_option("--mask", rec.mask)->required();
  reconstruct->add_option("--d", rec.d)->required();
  reconstruct->add_option("--axis", rec.axis)->check(axis_check);
  reconstruct->add_option("--bands", rec.bands, "Band count (inferred when --d > 0)");
  reconstruct->add_option("--solver", rec.solver)
      ->check(CLI::IsMember({"cid-tv", "cid-identity"}));
  reconstruct->add_option("--noise-estimator", rec.estimator)
      ->check(CLI::IsMember({"residual", "fixed"}));
  reconstruct->add_option("--sigma", rec.sigma, "Noise std for the fixed estimator")
      ->check(CLI::NonNegativeNumber);
  reconstruct->add_option("--stages", rec.stages);
  reconstruct->add_option("--tv-iterations", rec.tv_iterations);
  reconstruct->add_option("--tau", rec.tau);
  reconstruct->add_option("--mu", rec.mu);
  reconstruct->add_option("--out", rec.out)->required();
  reconstruct->add_option("--out-chroma", rec.out_chroma);
  reconstruct->add_option("--trace", rec.trace, "Per-stage trace (CSV)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Per-band PSNR and SSIM");
  evaluate->add_option("--ref", ev.ref)->required();
  evaluate->add_option("--rec", ev.rec)->required();
  evaluate->add_option("--range", ev.range, "Data range")->check(CLI::PositiveNumber);
  evaluate->add_option("--out", ev.out)->required();

  DecomposeArgs dec;
  auto* decomp = app.add_subcommand("decompose", "Split a cube into intensity and chromaticity");
  decomp->add_option("--in", dec.in)->required();
  decomp->add_option("--eps", dec.eps)->check(CLI::NonNegativeNumber);
  decomp->add_option("--out-chroma", dec.out_chroma)->required();
  decomp->add_option("--out-intensity", dec.out_intensity)->required();
  decomp->add_option("--out-csv", dec.out_csv, "Per-band chromaticity summary");

  SpectraArgs spec;
  auto* spectra = app.add_subcommand("spectra", "Mean spectrum of a region");
  spectra->add_option("--in", spec.in)->required();
  spectra->add_option("--roi", spec.roi, "x,y,w,h")->delimiter(',')->expected(4)->required();
  spectra->add_flag("--chroma", spec.chroma, "Use the chromaticity instead of radiance");
  spectra->add_option("--eps", spec.eps)->check(CLI::NonNegativeNumber);
  spectra->add_option("--out", spec.out)->required();

  CorrArgs corr;
  auto* corr_cmd = app.add_subcommand("corr", "Band-to-band correlation matrix");
  corr_cmd->add_option("--in", corr.in)->required();
  corr_cmd->add_flag("--chroma", corr.chroma);
  corr_cmd->add_option("--eps", corr.eps)->check(CLI::NonNegativeNumber);
  corr_cmd->add_option("--out", corr.out)->required();

  MakeMaskArgs mm;
  auto* make_mask = app.add_subcommand("make-mask", "Random binary coded mask");
  make_mask->add_option("--height", mm.height)->required()->check(CLI::PositiveNumber);
  make_mask->add_option("--width", mm.width)->required()->check(CLI::PositiveNumber);
  make_mask->add_option("--density", mm.density)->check(CLI::Range(0.0, 1.0));
  make_mask->add_option("--seed", mm.seed);
  make_mask->add_option("--out", mm.out, "Output (.pgm or cube file)")->required();

  GenSceneArgs gs;
  auto* gen_scene = app.add_subcommand("gen-scene", "Render a synthetic scene");
  gen_scene->add_option("--scene", gs.scene)->required();
  gen_scene->add_option("--out", gs.out)->required();

  InitParamsArgs ip;
  auto* init_params = app.add_subcommand("init-params", "Write an attention parameter bundle");
  init_params->add_option("--kind", ip.kind)->check(CLI::IsMember({"spectral", "spatial"}));
  init_params->add_option("--channels", ip.channels)->required()->check(CLI::PositiveNumber);
  init_params->add_option("--heads", ip.heads)->check(CLI::PositiveNumber);
  init_params->add_option("--head-dim", ip.head_dim)->check(CLI::PositiveNumber);
  init_params->add_option("--window", ip.window)->check(CLI::PositiveNumber);
  init_params->add_option("--hidden", ip.hidden);
  init_params->add_option("--seed", ip.seed);
  init_params->add_flag("--zero", ip.zero, "Identity (spectral) or all-zero (spatial) weights");
  init_params->add_option("--out", ip.out, "Manifest path (JSON)")->required();

  AttendArgs at;
  auto* attend = app.add_subcommand("attend", "Apply an attention block to a cube");
  attend->add_option("--kind", at.kind)->check(CLI::IsMember({"spectral", "spatial"}));
  attend->add_option("--in", at.in)->required();
  attend->add_option("--params", at.params)->required();
  attend->add_option("--window", at.window)->check(CLI::PositiveNumber);
  attend->add_option("--ratios", at.ratios)->delimiter(',');
  attend->add_option("--weights", at.weights)->delimiter(',');
  attend->add_flag("--shifted", at.shifted);
  attend->add_option("--out", at.out)->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simd == "scalar") {
      simd::select_backend(simd::Backend::scalar);
    } else if (simd == "avx2") {
      simd::select_backend(simd::Backend::avx2);
    }
    if (simulate->parsed()) run_simulate(sim);
    else if (reconstruct->parsed()) run_reconstruct(rec);
    else if (evaluate->parsed()) run_evaluate(ev);
    else if (decomp->parsed()) run_decompose(dec);
    else if (spectra->parsed()) run_spectra(spec);
    else if (corr_cmd->parsed()) run_corr(corr);
    else if (make_mask->parsed()) run_make_mask(mm);
    else if (gen_scene->parsed()) run_gen_scene(gs);
    else if (init_params->parsed()) run_init_params(ip);
    else if (attend->parsed()) run_attend(at);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace cidcassi
