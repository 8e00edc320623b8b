#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pathreg/cli/driver.hpp"
#include "pathreg/io/config.hpp"
#include "pathreg/io/formats.hpp"
#include "pathreg/io/hash.hpp"
#include "pathreg/io/manifest.hpp"

using namespace pathreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("pathreg_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST(Hash, Sha256KnownVectors) {
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(io::sha256_hex(std::string(1000, 'a')),
            "41edece42d63e8d9bf515a9ba6932e1c20cbc9f5a5d134645adb5db1b9737ea3");
}

TEST(Formats, PathBinaryRoundTrip) {
  TempDir tmp;
  gauss::GaussianModel m;
  m.kind = gauss::FbmSpec{0.5};
  m.dimension = 2;
  const auto path = gauss::sample(m, 64, 5);
  const std::string file = tmp.file("path.bin");
  io::write_path_binary(path, file);
  const auto back = io::read_path_binary(file);
  EXPECT_EQ(back.dimension, 2);
  EXPECT_EQ(back.grid.steps, 64u);
  EXPECT_EQ(back.values, path.values);  // bit-exact
}

TEST(Formats, CsvQuoting) {
  EXPECT_EQ(io::csv_quote("plain"), "plain");
  EXPECT_EQ(io::csv_quote("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Formats, PathCsvHeaderAndRows) {
  TempDir tmp;
  const auto path = gauss::linear_path(0.0, 1.0, 1.0, 4, 2);
  const std::string file = tmp.file("path.csv");
  io::write_path_csv(path, file);
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,w_1,w_2\r");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(Config, ModelRoundTripAndErrors) {
  gauss::GaussianModel m;
  m.kind = gauss::PLogBmSpec{2.0};
  m.horizon = 0.5;
  const auto j = io::model_to_json(m);
  const auto back = io::model_from_json(j);
  EXPECT_NEAR(back.covariance(0.25, 0.25), m.covariance(0.25, 0.25), 1e-15);
  io::json bad = j;
  bad["horizon"] = 1.0;  // p-log needs T < 1
  EXPECT_THROW(io::model_from_json(bad), io::UsageError);
  io::json missing;
  missing["kind"] = "fbm";
  EXPECT_THROW(io::model_from_json(missing), io::UsageError);
  io::json unknown;
  unknown["kind"] = "telephone";
  EXPECT_THROW(io::model_from_json(unknown), io::UsageError);
}

TEST(Config, UnknownDriftListsRegistry) {
  io::json j;
  j["name"] = "nonsense";
  try {
    io::drift_from_json(j);
    FAIL();
  } catch (const io::UsageError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("dirac"), std::string::npos);
    EXPECT_NE(msg.find("sine"), std::string::npos);
  }
}

TEST(Manifest, TracksOutputsAndWarnings) {
  TempDir tmp;
  io::json cfg;
  cfg["x"] = 1;
  io::RunManifest manifest(cfg);
  manifest.add_warning("something soft");
  const std::string file = tmp.file("data.txt");
  {
    std::ofstream out(file);
    out << "payload";
  }
  manifest.add_output(file);
  manifest.stage_done("stage_one");
  const auto doc = manifest.finalize();
  EXPECT_EQ(doc["warnings"].size(), 1u);
  EXPECT_EQ(doc["outputs"].size(), 1u);
  EXPECT_EQ(doc["outputs"][0]["sha256"], io::sha256_file(file));
  EXPECT_EQ(doc["config_sha256"], io::sha256_hex(cfg.dump()));
}

TEST(Cli, SimulateIsByteIdenticalAcrossReruns) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  cfg["steps"] = 256;
  cfg["paths"] = 3;
  cfg["seed"] = 7;
  cfg["output_dir"] = tmp.file("run_a");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "simulate"}), 0);
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "--set", std::string("output_dir=") + tmp.file("run_b"),
                          "simulate"}),
            0);
  for (int i = 0; i < 3; ++i) {
    const auto a = io::sha256_file(tmp.file("run_a") + "/path_" + std::to_string(i) + ".csv");
    const auto b = io::sha256_file(tmp.file("run_b") + "/path_" + std::to_string(i) + ".csv");
    EXPECT_EQ(a, b);
  }
  // every output is listed in the manifest with its checksum
  const auto manifest = io::load_json(tmp.file("run_a") + "/manifest.json");
  EXPECT_EQ(manifest["outputs"].size(), 3u);
}

TEST(Cli, PlogHorizonRuleEnforced) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "plog"}, {"p", 2.0}, {"horizon", 0.5}};
  cfg["steps"] = 64;
  cfg["paths"] = 1;
  cfg["output_dir"] = tmp.file("ok");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "simulate"}), 0);
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "--set", "model.horizon=1.0", "simulate"}), 2);
}

TEST(Cli, SeriesPositivityRuleEnforced) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm_series"}, {"lambdas", {1.0, -0.5}}, {"hursts", {0.5, 0.3}}};
  cfg["steps"] = 64;
  cfg["output_dir"] = tmp.file("out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "simulate"}), 2);
}

TEST(Cli, RegularityGuardsPathCount) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  cfg["steps"] = 256;
  cfg["paths"] = 1;
  cfg["output_dir"] = tmp.file("out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "regularity"}), 2);
}

TEST(Cli, SolveWritesManifestAndReport) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  cfg["drift"] = {{"name", "sine"}};
  cfg["steps"] = 512;
  cfg["seed"] = 3;
  cfg["x"] = 0.5;
  cfg["jet_order"] = 1;
  cfg["oracle"] = "classical";
  cfg["output_dir"] = tmp.file("solve_out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "solve"}), 0);
  const auto report = io::load_json(tmp.file("solve_out") + "/solve.json");
  EXPECT_EQ(report["status"], "complete");
  EXPECT_LT(report["oracle_max_error"].get<double>(), 1e-3);
  EXPECT_FALSE(report["tau_inverse_profile"].empty());
  const auto manifest = io::load_json(tmp.file("solve_out") + "/manifest.json");
  EXPECT_GE(manifest["outputs"].size(), 2u);
}

TEST(Cli, UnknownDriftIsUsageError) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  cfg["drift"] = {{"name", "bogus"}};
  cfg["x"] = 0.5;
  cfg["output_dir"] = tmp.file("out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "solve"}), 2);
}

TEST(Cli, LndAndSewcheckReports) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.3}};
  cfg["steps"] = 64;
  cfg["zeta"] = {0.3, 0.2};
  cfg["output_dir"] = tmp.file("lnd_out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "lnd"}), 0);
  const auto rep = io::load_json(tmp.file("lnd_out") + "/lnd.json");
  EXPECT_TRUE(rep[0]["is_lnd_strong"].get<bool>());

  io::json scfg;
  scfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  scfg["steps"] = 64;
  scfg["z"] = 8.0;
  scfg["batch"] = 16;
  scfg["output_dir"] = tmp.file("sew_out");
  const std::string scfg_file = tmp.file("scfg.json");
  {
    std::ofstream out(scfg_file);
    out << scfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", scfg_file, "sewcheck"}), 0);
  const auto srep = io::load_json(tmp.file("sew_out") + "/sewcheck.json");
  EXPECT_LE(srep["tower_estimate"].get<double>(), 1e-10);
  EXPECT_TRUE(srep["beta_hat"].is_null());
}

TEST(Cli, LocaltimeRun) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  cfg["steps"] = 1024;
  cfg["grid"] = {{"z_max", 64.0}, {"points", 257}};
  cfg["output_dir"] = tmp.file("lt_out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "localtime"}), 0);
  EXPECT_TRUE(fs::exists(tmp.file("lt_out") + "/local_time.csv"));
  EXPECT_TRUE(fs::exists(tmp.file("lt_out") + "/spectrum.csv"));
}

TEST(Cli, UsageWithoutSubcommand) { EXPECT_EQ(cli::run_cli({}), 2); }

TEST(Cli, NumericalFailureExitsThree) {
  TempDir tmp;
  io::json cfg;
  cfg["model"] = {{"kind", "fbm"}, {"hurst", 0.5}};
  cfg["drift"] = {{"name", "sine"}, {"amplitude", 1e8}};  // no contracting step at this stiffness
  cfg["steps"] = 8;
  cfg["x"] = 1.0;
  cfg["solver"] = {{"max_picard_iters", 8}};
  cfg["output_dir"] = tmp.file("out");
  const std::string cfg_file = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_file);
    out << cfg.dump();
  }
  EXPECT_EQ(cli::run_cli({"--config", cfg_file, "solve"}), 3);
}

TEST(Formats, SewnPathAndPartitionExports) {
  TempDir tmp;
  sewing::Germ germ;
  germ.evaluate = [](double s, double t) {
    Eigen::VectorXd v(1);
    v(0) = (t - s) * s;
    return v;
  };
  const auto sewn = sewing::sew(germ, 0.0, 1.0, 4);
  io::write_sewn_path_csv(sewn, tmp.file("sewn.csv"));
  EXPECT_TRUE(fs::exists(tmp.file("sewn.csv")));

  core::FrequencyGrid grid(1, 16.0, 33);
  const auto part = funcspaces::build_partition(grid);
  io::write_partition_csv(part, tmp.file("partition.csv"));
  std::ifstream in(tmp.file("partition.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "z_1,chi,rho_0,rho_1,rho_2,rho_3\r");
}

TEST(Formats, BesovReportJson) {
  funcspaces::BesovReport rep;
  rep.alpha = 0.5;
  rep.p = std::numeric_limits<double>::infinity();
  rep.q = 2.0;
  rep.block_norms = {1.0, 0.5};
  rep.total = 1.25;
  const auto j = io::besov_report_json(rep);
  EXPECT_EQ(j["p"], "inf");
  EXPECT_EQ(j["q"], 2.0);
  EXPECT_EQ(j["block_norms"].size(), 2u);
}
