#include "mycelogic/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace mycelogic {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("mycelogic_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "mycelogic");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
  }

  static std::map<std::string, std::string> slurp(const fs::path& d) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(d)) {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      files[e.path().filename().string()] = ss.str();
    }
    return files;
  }

  fs::path dir_;
};

const char* kSmallColony =
    "[colony]\n"
    "width = 48\n"
    "height = 48\n"
    "steps = 400\n";

TEST_F(CliTest, MissingConfigFailsWithDiagnostic) {
  const auto r = run({"simulate-fhn", "--config", (dir_ / "absent.toml").string(), "--out", (dir_ / "o").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_NE(r.err.find("absent.toml"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "o" / "manifest.json"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"synth-colony", "--threads", "0"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, UnusedKeyIsRejected) {
  const auto cfg = write_config("c.toml", std::string(kSmallColony) + "[rc]\nensembel = 3\n");
  const auto r = run({"synth-colony", "--config", cfg.string(), "--out", (dir_ / "o").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("rc.ensembel"), std::string::npos) << r.err;
}

TEST_F(CliTest, SynthColonyWritesManifestLast) {
  const auto cfg = write_config("c.toml", kSmallColony);
  const auto out = dir_ / "o";
  ASSERT_EQ(run({"synth-colony", "--config", cfg.string(), "--seed", "7", "--out", out.string()}).code, 0);
  const auto files = slurp(out);
  ASSERT_TRUE(files.contains("colony.pgm"));
  ASSERT_TRUE(files.contains("colony_graph.txt"));
  const auto m = nlohmann::json::parse(files.at("manifest.json"));
  EXPECT_EQ(m["command"], "synth-colony");
  EXPECT_EQ(m["master_seed"], 7);
  EXPECT_EQ(m["config"]["seed"], "7");
  EXPECT_EQ(m["config"]["colony.branch_rate"], "0.050000000000000003");
  EXPECT_NE(m["seed_rule"].get<std::string>().find("splitmix64"), std::string::npos);
  for (const auto& name : m["outputs"]) EXPECT_TRUE(files.contains(name.get<std::string>()));
  for (const auto& [name, content] : files) EXPECT_EQ(name.find(".tmp"), std::string::npos);
  const auto summary = nlohmann::json::parse(files.at("colony_summary.json"));
  EXPECT_EQ(summary["components"], 1);
}

TEST_F(CliTest, SeedFlagOverridesConfigAndChangesOutput) {
  const auto cfg = write_config("c.toml", std::string("seed = 3\n") + kSmallColony);
  ASSERT_EQ(run({"synth-colony", "--config", cfg.string(), "--out", (dir_ / "a").string()}).code, 0);
  ASSERT_EQ(run({"synth-colony", "--config", cfg.string(), "--seed", "4", "--out", (dir_ / "b").string()}).code, 0);
  EXPECT_NE(slurp(dir_ / "a").at("colony.pgm"), slurp(dir_ / "b").at("colony.pgm"));
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "b").at("manifest.json"))["master_seed"], 4);
}

TEST_F(CliTest, SimulateFhnWritesLongTraces) {
  const auto cfg = write_config("c.toml", std::string(kSmallColony) +
                                              "[electrodes]\ncount = 4\n"
                                              "[run]\niterations = 2000\nsample_every = 10\nsnapshot_every = 1000\n");
  const auto out = dir_ / "o";
  const auto r = run({"simulate-fhn", "--config", cfg.string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto files = slurp(out);
  std::istringstream in(files.at("traces.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iteration,electrode_id,p");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4u * 200u);
  EXPECT_TRUE(files.contains("snapshot_000001000.pgm"));
  EXPECT_TRUE(files.contains("snapshot_000002000.pgm"));
}

TEST_F(CliTest, MineSpikesCensusRowsSum) {
  const auto cfg = write_config("c.toml",
                                "[colony]\nwidth = 64\nheight = 64\nsteps = 700\n"
                                "[electrodes]\ncount = 6\n"
                                "[spikes]\npairs = 2\n");
  const auto out = dir_ / "o";
  const auto r = run({"mine-spikes", "--config", cfg.string(), "--threads", "2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto files = slurp(out);
  std::istringstream in(files.at("census_pooled.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "E,x+y,Sy,x^y,Sx,!x.y,x.!y,x.y,Total");
  std::vector<std::uint64_t> column(8, 0), total;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string name, cell;
    std::getline(cells, name, ',');
    std::vector<std::uint64_t> v;
    while (std::getline(cells, cell, ',')) v.push_back(std::stoull(cell));
    ASSERT_EQ(v.size(), 8u);
    EXPECT_EQ(std::accumulate(v.begin(), v.begin() + 7, std::uint64_t{0}), v[7]);
    if (name == "Total") {
      total = v;
    } else {
      for (std::size_t k = 0; k < 8; ++k) column[k] += v[k];
    }
  }
  EXPECT_EQ(total, column);
  EXPECT_GT(total[7], 0u);
  // The events log has one line per counted event.
  const auto& events = files.at("events.csv");
  EXPECT_EQ(static_cast<std::uint64_t>(std::count(events.begin(), events.end(), '\n')) - 1, total[7]);
  const auto ratios = nlohmann::json::parse(files.at("gate_ratios.json"));
  EXPECT_EQ(ratios["total"], total[7]);
  EXPECT_NE(files.at("gate_ratios.svg").find("<polyline"), std::string::npos);
}

TEST_F(CliTest, MineSpikesOverlaysExternalRatios) {
  const auto ext = write_config("physarum.json",
                                R"({"substrate":"Physarum","order":["Sx","Sy","!x.y","x.!y","x+y","x.y","x^y"],)"
                                R"("ratios":[0.3,0.3,0.1,0.1,0.1,0.05,0.05]})");
  const auto cfg = write_config("c.toml", "[colony]\nwidth = 48\nheight = 48\nsteps = 400\n"
                                          "[electrodes]\ncount = 4\n"
                                          "[spikes]\npairs = 1\noverlay = \"" + ext.string() + "\"\n");
  const auto r = run({"mine-spikes", "--config", cfg.string(), "--out", (dir_ / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto svg = slurp(dir_ / "o").at("gate_ratios.svg");
  EXPECT_NE(svg.find("Physarum"), std::string::npos);
  std::size_t lines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
  EXPECT_EQ(lines, 2u);
}

TEST_F(CliTest, MineRcAndExportNetlist) {
  const auto cfg = write_config("c.toml", std::string(kSmallColony) +
                                              "[rc]\nensemble = 3\ntheta_count = 50\nduration = 0.005\n"
                                              "export_netlists = 1\n");
  const auto out = dir_ / "o";
  const auto r = run({"mine-rc", "--config", cfg.string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto files = slurp(out);
  for (const char* f : {"sweep_serial.csv", "sweep_parallel.csv", "fit_serial.json", "fit_parallel.json",
                        "sweep_serial.svg", "netlist_serial_0.cir", "netlist_parallel_0.cir"})
    EXPECT_TRUE(files.contains(f)) << f;
  const auto& csv = files.at("sweep_serial.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "theta,and,or,andnot,select,xor");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 51);

  // The same member exported on its own gives the same deck.
  const auto cfg2 = write_config("n.toml", std::string(kSmallColony) + "[rc]\nmode = \"parallel\"\nduration = 0.005\n");
  ASSERT_EQ(run({"export-netlist", "--config", cfg2.string(), "--out", (dir_ / "n").string()}).code, 0);
  EXPECT_EQ(slurp(dir_ / "n").at("network.cir"), files.at("netlist_parallel_0.cir"));
}

TEST_F(CliTest, MineFunctionsTableCount) {
  const auto cfg = write_config("c.toml", std::string(kSmallColony) +
                                              "[functions]\nrepeats = 2\nchannels = 3\nthresholds = 4\n"
                                              "dwell = 0.0002\ndt = 0.000002\nwrite_traces = true\n");
  const auto out = dir_ / "o";
  const auto r = run({"mine-functions", "--config", cfg.string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto files = slurp(out);
  const auto& tables = files.at("tables.csv");
  EXPECT_EQ(std::count(tables.begin(), tables.end(), '\n'), 1 + 2 * 3 * 4);
  std::istringstream in(files.at("census.csv"));
  std::string line;
  std::getline(in, line);
  std::uint64_t sum = 0;
  while (std::getline(in, line)) sum += std::stoull(line.substr(line.find(',') + 1));
  EXPECT_EQ(sum, 24u);

  // Replaying the recorded traces through the csv source gives the same tables.
  const auto replay = write_config(
      "r.toml", "[functions]\nsource = \"csv\"\nthresholds = 4\ntrace_csv = \"" + (out / "traces_repeat0.csv").string() +
                    "\"\nsidecar = \"" + (out / "traces_repeat0.json").string() + "\"\n");
  ASSERT_EQ(run({"mine-functions", "--config", replay.string(), "--out", (dir_ / "r").string()}).code, 0);
  const auto again = slurp(dir_ / "r").at("tables.csv");
  EXPECT_EQ(again, tables.substr(0, again.size()));
}

TEST_F(CliTest, SameSeedTwiceGivesIdenticalFiles) {
  const std::string colony = kSmallColony;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"synth-colony", colony},
      {"simulate-fhn", colony + "[electrodes]\ncount = 4\n[run]\niterations = 1000\n"},
      {"mine-spikes", colony + "[electrodes]\ncount = 4\n[spikes]\npairs = 1\n"},
      {"mine-rc", colony + "[rc]\nensemble = 2\ntheta_count = 20\nduration = 0.004\n"},
      {"mine-functions", colony + "[functions]\nrepeats = 1\nchannels = 2\nthresholds = 3\n"
                                  "dwell = 0.0002\ndt = 0.000002\n"},
      {"export-netlist", colony},
  };
  for (const auto& [cmd, text] : runs) {
    const auto cfg = write_config(cmd + ".toml", text);
    const auto a = dir_ / (cmd + "_a");
    const auto b = dir_ / (cmd + "_b");
    const auto ra = run({cmd, "--config", cfg.string(), "--seed", "7", "--out", a.string()});
    ASSERT_EQ(ra.code, 0) << cmd << ": " << ra.err;
    ASSERT_EQ(run({cmd, "--config", cfg.string(), "--seed", "7", "--out", b.string(), "--threads", "3"}).code, 0);
    auto fa = slurp(a), fb = slurp(b);
    // Only the echoed thread count differs.
    auto ma = nlohmann::json::parse(fa.at("manifest.json")), mb = nlohmann::json::parse(fb.at("manifest.json"));
    ma.erase("threads");
    mb.erase("threads");
    ma["config"].erase("threads");
    mb["config"].erase("threads");
    EXPECT_EQ(ma, mb) << cmd;
    fa.erase("manifest.json");
    fb.erase("manifest.json");
    EXPECT_EQ(fa, fb) << cmd;
  }
}

TEST_F(CliTest, ManifestReplayReproducesOutputs) {
  const auto cfg = write_config("c.toml", std::string(kSmallColony) + "[rc]\nensemble = 2\ntheta_count = 20\n");
  const auto a = dir_ / "a";
  ASSERT_EQ(run({"mine-rc", "--config", cfg.string(), "--seed", "11", "--out", a.string()}).code, 0);
  const auto b = dir_ / "b";
  const auto r = run({"mine-rc", "--config", (a / "manifest.json").string(), "--out", b.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(a), slurp(b));
  const auto wrong = run({"synth-colony", "--config", (a / "manifest.json").string(), "--out", (dir_ / "c").string()});
  EXPECT_EQ(wrong.code, 1);
  EXPECT_NE(wrong.err.find("manifest is for 'mine-rc'"), std::string::npos) << wrong.err;
}

}  // namespace
}  // namespace mycelogic
