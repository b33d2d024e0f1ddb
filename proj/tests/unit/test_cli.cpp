// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cidcassi/cli.hpp"
#include "cidcassi/decomposition.hpp"
#include "cidcassi/io.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace cidcassi;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "cidcassi");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ofstream(dir_.file("scene.json"))
        << R"({"height": 32, "width": 32, "bands": 6, "generator": "blobs", "seed": 4, "blobs": 4})";
    ASSERT_EQ(run({"make-mask", "--height", "32", "--width", "32", "--seed", "2", "--out",
                   f("mask.pgm")})
                  .code,
              0);
  }

  std::string f(const std::string& name) const { return dir_.file(name); }

  CliResult simulate(double sigma = 0.0) {
    return run({"simulate", "--scene", f("scene.json"), "--mask", f("mask.pgm"), "--d", "2",
                "--axis", "h", "--sigma", std::to_string(sigma), "--seed", "7", "--out-meas",
                f("m.cidc"), "--out-pan", f("pan.cidc"), "--out-truth", f("x.cidc")});
  }

  testing_support::TempDir dir_;
};

TEST_F(Cli, UnknownFlagIsAUsageError) {
  const auto r = run({"simulate", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
}

TEST_F(Cli, HelpSucceeds) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("reconstruct"), std::string::npos);
}

TEST_F(Cli, MissingInputIsADataError) {
  const auto r = run({"decompose", "--in", f("absent.cidc"), "--out-chroma", f("c.cidc"),
                      "--out-intensity", f("i.cidc")});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("absent.cidc"), std::string::npos);
}

TEST_F(Cli, SimulateWritesPanAsBandMean) {
  ASSERT_EQ(simulate().code, 0);
  const auto x = cube_read(f("x.cidc"));
  const auto pan = plane_read(f("pan.cidc"));
  const auto mean = band_mean(x);
  for (std::size_t i = 0; i < pan.size(); ++i)
    EXPECT_NEAR(pan.values()[i], mean.values()[i], 1e-7);
  const auto m = plane_read(f("m.cidc"));
  EXPECT_EQ(m.width(), 32u + 2u * 5u);
}

TEST_F(Cli, ReconstructEvaluateAndTrace) {
  ASSERT_EQ(simulate().code, 0);
  const auto r = run({"reconstruct", "--meas", f("m.cidc"), "--pan", f("pan.cidc"), "--mask",
                      f("mask.pgm"), "--d", "2", "--axis", "h", "--solver", "cid-tv", "--stages",
                      "12", "--tau", "0.05", "--out", f("rec.cidc"), "--trace", f("trace.csv"),
                      "--out-chroma", f("chroma.cidc")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto trace = read_lines(f("trace.csv"));
  ASSERT_EQ(trace.size(), 13u);
  EXPECT_EQ(trace[0], "stage,residual_norm,consistency_norm,mean_sigma,omega");
  EXPECT_EQ(trace[1].substr(0, 2), "1,");

  ASSERT_EQ(run({"evaluate", "--ref", f("x.cidc"), "--rec", f("rec.cidc"), "--out", f("r.csv")}).code, 0);
  const auto report = read_lines(f("r.csv"));
  ASSERT_EQ(report.size(), 8u);
  EXPECT_EQ(report[0], "band,psnr_db,ssim");
  EXPECT_EQ(report[7].substr(0, 5), "mean,");
}

TEST_F(Cli, NoiselessReconstructionIsDataConsistent) {
  ASSERT_EQ(simulate().code, 0);
  const auto r = run({"reconstruct", "--meas", f("m.cidc"), "--pan", f("pan.cidc"), "--mask",
                      f("mask.pgm"), "--d", "2", "--stages", "60", "--noise-estimator",
                      "fixed", "--sigma", "0", "--out", f("rec.cidc"), "--trace", f("trace.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto y = plane_read(f("m.cidc"));
  double norm = 0.0;
  for (double v : y.values()) norm += v * v;
  const auto trace = read_lines(f("trace.csv"));
  ASSERT_EQ(trace.size(), 61u);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    std::istringstream row(trace[i]);
    std::string stage, residual, consistency;
    std::getline(row, stage, ',');
    std::getline(row, residual, ',');
    std::getline(row, consistency, ',');
    EXPECT_LT(std::stod(consistency), 1e-10 * std::sqrt(norm)) << trace[i];
  }
}

TEST_F(Cli, UnguidedAndRgbGuidance) {
  ASSERT_EQ(simulate().code, 0);
  EXPECT_EQ(run({"reconstruct", "--meas", f("m.cidc"), "--unguided", "--mask", f("mask.pgm"),
                 "--d", "2", "--stages", "3", "--out", f("u.cidc")})
                .code,
            0);
  cube_write(SpectralCube(32, 32, 3, 0.5), f("rgb.cidc"));
  const auto r = run({"reconstruct", "--meas", f("m.cidc"), "--rgb", f("rgb.cidc"),
                      "--band-centers", "450,490,530,570,610,650", "--anchors", "460,540,620",
                      "--mask", f("mask.pgm"), "--d", "2", "--stages", "3", "--out", f("g.cidc")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"reconstruct", "--meas", f("m.cidc"), "--pan", f("pan.cidc"), "--unguided",
                 "--mask", f("mask.pgm"), "--d", "2", "--out", f("z.cidc")})
                .code,
            kExitUsage);
}

TEST_F(Cli, BandCountMustMatchMeasurement) {
  ASSERT_EQ(simulate().code, 0);
  EXPECT_EQ(run({"reconstruct", "--meas", f("m.cidc"), "--pan", f("pan.cidc"), "--mask",
                 f("mask.pgm"), "--d", "2", "--bands", "5", "--out", f("rec.cidc")})
                .code,
            kExitData);
  EXPECT_EQ(run({"reconstruct", "--meas", f("m.cidc"), "--pan", f("pan.cidc"), "--mask",
                 f("mask.pgm"), "--d", "3", "--out", f("rec.cidc")})
                .code,
            kExitData);
}

TEST_F(Cli, DecomposeSpectraCorr) {
  ASSERT_EQ(run({"gen-scene", "--scene", f("scene.json"), "--out", f("x.cidc")}).code, 0);
  ASSERT_EQ(run({"decompose", "--in", f("x.cidc"), "--out-chroma", f("c.cidc"),
                 "--out-intensity", f("i.cidc"), "--out-csv", f("d.csv")})
                .code,
            0);
  EXPECT_EQ(cube_read(f("c.cidc")).bands(), 6u);
  EXPECT_EQ(read_lines(f("d.csv")).size(), 7u);

  ASSERT_EQ(run({"spectra", "--in", f("x.cidc"), "--roi", "0,0,4,4", "--out", f("s.csv")}).code, 0);
  const auto spectra = read_lines(f("s.csv"));
  ASSERT_EQ(spectra.size(), 7u);
  EXPECT_EQ(spectra[0], "band,mean,std");
  EXPECT_EQ(run({"spectra", "--in", f("x.cidc"), "--roi", "30,30,4,4", "--out", f("s2.csv")}).code,
            kExitData);
  EXPECT_EQ(run({"spectra", "--in", f("x.cidc"), "--roi", "1,2,3", "--out", f("s3.csv")}).code,
            kExitUsage);

  ASSERT_EQ(run({"corr", "--in", f("x.cidc"), "--chroma", "--out", f("k.csv")}).code, 0);
  const auto corr = read_lines(f("k.csv"));
  ASSERT_EQ(corr.size(), 7u);
  EXPECT_EQ(corr[0], "band,0,1,2,3,4,5");
}

TEST_F(Cli, AttentionRoundTrip) {
  cube_write(SpectralCube(8, 8, 5, 0.25), f("feat.cidc"));
  ASSERT_EQ(run({"init-params", "--kind", "spatial", "--channels", "5", "--window", "4", "--zero",
                 "--out", f("sp.json")})
                .code,
            0);
  ASSERT_EQ(run({"attend", "--kind", "spatial", "--in", f("feat.cidc"), "--params", f("sp.json"),
                 "--shifted", "--out", f("o.cidc")})
                .code,
            0);
  EXPECT_EQ(cube_read(f("o.cidc")), cube_read(f("feat.cidc")));

  ASSERT_EQ(run({"init-params", "--kind", "spectral", "--channels", "5", "--heads", "2",
                 "--head-dim", "2", "--seed", "3", "--out", f("se.json")})
                .code,
            0);
  const auto r = run({"attend", "--in", f("feat.cidc"), "--params", f("se.json"), "--window", "4",
                      "--out", f("o2.cidc")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, PipelineIsByteIdenticalAcrossRuns) {
  auto pipeline = [&](const std::string& tag) {
    EXPECT_EQ(simulate(0.01).code, 0);
    for (const char* name : {"m.cidc", "pan.cidc", "x.cidc"})
      std::filesystem::copy_file(f(name), f(tag + name));
    EXPECT_EQ(run({"reconstruct", "--meas", f("m.cidc"), "--pan", f("pan.cidc"), "--mask",
                   f("mask.pgm"), "--d", "2", "--stages", "5", "--out", f(tag + "rec.cidc"),
                   "--trace", f(tag + "trace.csv")})
                  .code,
              0);
    EXPECT_EQ(run({"evaluate", "--ref", f("x.cidc"), "--rec", f(tag + "rec.cidc"), "--out",
                   f(tag + "report.csv")})
                  .code,
              0);
  };
  pipeline("a_");
  pipeline("b_");
  for (const char* name : {"m.cidc", "pan.cidc", "x.cidc", "rec.cidc", "trace.csv", "report.csv"}) {
    EXPECT_EQ(read_file_bytes(f(std::string("a_") + name)), read_file_bytes(f(std::string("b_") + name)))
        << name;
  }
  for (const auto& e : std::filesystem::directory_iterator(dir_.path()))
    EXPECT_NE(e.path().extension(), ".tmp") << e.path();
}

}  // namespace
