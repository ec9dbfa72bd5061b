// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mycelogic/circuit.hpp"
#include "mycelogic/cli.hpp"
#include "mycelogic/excitable.hpp"
#include "mycelogic/fit.hpp"
#include "mycelogic/funcmine.hpp"
#include "mycelogic/rcnet.hpp"
#include "mycelogic/rng.hpp"
#include "mycelogic/spikegates.hpp"
#include "mycelogic/substrate.hpp"

using namespace mycelogic;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 1;

struct Verdict {
  bool pass;
  std::string detail;
};

unsigned worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- 1 ------------------------------------------------------------------------

Verdict rc_series_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const double r = 1e3, c = 1e-9, tau = r * c;
  Circuit ckt;
  ckt.node_count = 3;
  ckt.resistors = {{1, 2, r}};
  ckt.capacitors = {{2, 0, c}};
  ckt.sources = {{1}};
  const TransientSolver solver(ckt, tau / 1000);
  const auto tr = record_probes(solver, {Waveform::step(0.06)}, 5 * tau + tau / 1000, {2});
  double worst = 0.0;
  for (double m : {1.0, 2.0, 5.0}) {
    const auto k = static_cast<std::size_t>(std::lround(m * 1000)) - 1;  // times[k] = (k + 1) dt
    const double exact = 0.06 * (1.0 - std::exp(-tr.times[k] / tau));
    worst = std::max(worst, std::abs(tr.voltages[0][k] - exact) / exact);
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.005 && secs < 1.0,
          fmt("worst relative error %.4f%% at tau,2tau,5tau (limit 0.5%%); %.3f s (limit 1 s)", 100 * worst, secs)};
}

// --- 2 ------------------------------------------------------------------------

std::int64_t first_above(const PotentialTrace& tr, double level) {
  for (const auto& s : tr.samples)
    if (s.p > level) return s.iteration;
  return -1;
}

Verdict fhn_rest_and_isotropy() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = GridTemplate::uniform(101, 101);
  const FhnParams params;
  const FhnModel model(grid, params);

  FhnState rest = model.resting_state();
  for (int k = 0; k < 5000; ++k) model.step(rest, FhnModel::PreparedStimulus{});
  bool zero = true;
  for (std::size_t i = 0; i < model.size(); ++i) zero &= rest.u[i] == 0.0 && rest.v[i] == 0.0;

  // Centre disc of radius 8; the two-node TRUE disc does not nucleate a
  // circular front on an open sheet.
  const StimulusPlan plan{Stimulus{Electrode{{50, 50}, 8.0}, 0, 300, 0.5}};
  const std::vector<Electrode> probes{{{80, 50}, 2.0}, {{50, 80}, 2.0}, {{71, 71}, 2.0}};
  RunOptions o;
  o.iterations = 13000;
  o.sample_every = 10;
  const auto tr = run(grid, params, plan, probes, o);
  const auto east = first_above(tr[0], 0.1), south = first_above(tr[1], 0.1), diag = first_above(tr[2], 0.1);
  const double ratio = east > 0 && south > 0 ? static_cast<double>(east) / static_cast<double>(south) : 0.0;
  const double secs = seconds_since(t0);
  const bool pass = zero && ratio >= 0.95 && ratio <= 1.05 && secs < 30.0;
  return {pass, fmt("rest %s after 5000 steps; arrivals at distance 30: +x %lld, +y %lld, diagonal %lld; "
                    "axis ratio %.4f (limit [0.95,1.05]); %.1f s (limit 30 s)",
                    zero ? "exactly zero" : "NOT zero", static_cast<long long>(east),
                    static_cast<long long>(south), static_cast<long long>(diag), ratio, secs)};
}

// --- 3 ------------------------------------------------------------------------

Verdict spike_hierarchy() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t colonies = 20, pairs_per_colony = 3, electrodes = 16;
  SpikeMiningOptions o;
  o.threads = worker_threads();
  std::vector<GateEvent> pooled;
  for (std::size_t i = 0; i < colonies; ++i) {
    ColonyParams p;
    p.seed = derive_seed(kMasterSeed, "colony", i);
    p.width = 200;
    p.height = 192;
    p.steps = 1500;
    const auto t = synthesize_colony(p);
    const auto es = spread_electrodes(t, electrodes, derive_seed(kMasterSeed, "electrodes", i));
    const auto pairs = choose_input_pairs(es.size(), pairs_per_colony, derive_seed(kMasterSeed, "pairs", i));
    for (const auto& r : mine_spike_gates(t, es, pairs, o)) pooled.insert(pooled.end(), r.events.begin(), r.events.end());
  }
  const auto c = census(pooled).totals;
  const auto selects = c[Gate::select_x] + c[Gate::select_y];
  const auto or_and = c[Gate::x_or_y] + c[Gate::x_and_y];
  const auto x = c[Gate::x_xor_y];
  bool xor_rarest = x > 0;
  for (Gate g : kTableOrder)
    if (g != Gate::x_xor_y && c[g] > 0 && c[g] < x) xor_rarest = false;
  std::string counts;
  for (Gate g : kRatioOrder) counts += fmt("%s=%llu ", std::string(gate_label(g)).c_str(), static_cast<unsigned long long>(c[g]));
  const double secs = seconds_since(t0);
  return {selects > or_and && xor_rarest && secs < 600.0,
          fmt("%zu colonies x %zu pairs x %zu electrodes: %stotal=%llu; Sx+Sy=%llu vs x+y + x.y=%llu; "
              "x^y non-empty and rarest of the non-empty classes: %s; %.0f s (limit 600 s)",
              colonies, pairs_per_colony, electrodes, counts.c_str(), static_cast<unsigned long long>(c.total()),
              static_cast<unsigned long long>(selects), static_cast<unsigned long long>(or_and),
              xor_rarest ? "yes" : "no", secs)};
}

// --- 4 ------------------------------------------------------------------------

Verdict rc_realizability() {
  const auto t0 = std::chrono::steady_clock::now();
  ColonyParams p;
  p.seed = derive_seed(kMasterSeed, "colony", 0);
  const auto t = synthesize_colony(p);
  GraphExtraction gx;
  gx.z_jitter = 2.0;
  gx.seed = derive_seed(kMasterSeed, "graph", 0);
  const auto g = graph_from_template(t, gx);

  RcMiningOptions o;
  o.ensemble = 100;
  o.threads = worker_threads();
  std::map<RcMode, RcMiningReport> reports;
  for (auto mode : {RcMode::serial, RcMode::parallel}) {
    o.build.mode = mode;
    o.seed = derive_seed(kMasterSeed, "rc-" + std::string(mode_name(mode)));
    reports[mode] = mine_gates(g, o);
  }
  const auto& s = reports[RcMode::serial].sweep;
  const auto& q = reports[RcMode::parallel].sweep;
  const bool serial_or = s.total(RcGate::or_gate) == 0;
  const bool parallel_andnot = q.total(RcGate::and_not) == 0;
  const bool xor_none = s.total(RcGate::xor_gate) == 0 && q.total(RcGate::xor_gate) == 0;
  const double secs = seconds_since(t0);
  auto line = [](const SweepResult& r) {
    std::string out;
    for (auto gate : kRcGates)
      out += fmt("%s=%llu ", std::string(rc_gate_name(gate)).c_str(), static_cast<unsigned long long>(r.total(gate)));
    return out;
  };
  return {serial_or && parallel_andnot && xor_none && secs < 600.0,
          fmt("graph %zu nodes, 100 networks/mode, 500 thresholds; serial: %s| parallel: %s| "
              "serial OR zero: %s; parallel AND-NOT zero: %s; XOR zero in both: %s; %.0f s (limit 600 s)",
              g.nodes().size(), line(s).c_str(), line(q).c_str(), serial_or ? "yes" : "NO",
              parallel_andnot ? "yes" : "NO", xor_none ? "yes" : "NO", secs)};
}

// --- 5 ------------------------------------------------------------------------

Verdict fit_recovery() {
  const auto grid = theta_grid();
  double worst_k = 0.0, worst_a = 0.0;
  for (auto [a, k] : {std::pair{72.0, -0.98}, std::pair{2203.0, -0.48}, std::pair{0.02, -1.6}}) {
    std::vector<double> n;
    for (double x : grid) n.push_back(a * std::pow(x, k));
    const auto f = fit_power_law(grid, n);
    worst_k = std::max(worst_k, std::abs(f.exponent - k));
    worst_a = std::max(worst_a, std::abs(f.coefficient - a) / a);
  }
  return {worst_k <= 0.01 && worst_a <= 0.01,
          fmt("worst exponent error %.2e (limit 0.01); worst coefficient error %.2e%% (limit 1%%)", worst_k,
              100 * worst_a)};
}

// --- 6 ------------------------------------------------------------------------

Verdict sop_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0;
  for (std::uint32_t table = 0; table < 65536; ++table) {
    const auto e = sop(static_cast<std::uint16_t>(table));
    for (int s = 0; s < kStates; ++s) mismatches += e.evaluate(s) != (((table >> s) & 1) != 0);
  }
  const auto nand = sop(0x7FFF).str();
  const auto and4 = sop(0x8000).str();
  const double secs = seconds_since(t0);
  const bool pass = mismatches == 0 && nand == "A' + B' + C' + D'" && and4 == "ABCD" && secs < 60.0;
  return {pass, fmt("65536 tables, %zu row mismatches; NAND -> %s; AND -> %s; %.2f s (limit 60 s)", mismatches,
                    nand.c_str(), and4.c_str(), secs)};
}

// --- 7 ------------------------------------------------------------------------

Verdict census_arithmetic() {
  ColonyParams p;
  p.seed = derive_seed(kMasterSeed, "colony", 0);
  const auto g = graph_from_template(synthesize_colony(p));
  RcDriverOptions d;
  d.build.mode = RcMode::parallel;
  d.channels = 7;
  std::vector<std::vector<ChannelRecording>> repeats;
  for (std::size_t k = 0; k < 14; ++k) {
    d.build.seed = derive_seed(kMasterSeed, "functions-repeat", k);
    repeats.push_back(synth_rc_recordings(g, StateSchedule{}, d));
  }
  const auto tables = mine_tables(repeats, 32, {}, worker_threads());
  const auto c = census_functions(tables);
  std::uint64_t sum = 0;
  for (const auto& [bits, n] : c.histogram) sum += n;
  return {tables.size() == 3136 && sum == 3136 && c.total == 3136,
          fmt("14 repeats x 7 channels x 32 thresholds -> %zu tables; histogram sum %llu; %zu unique functions",
              tables.size(), static_cast<unsigned long long>(sum), c.unique())};
}

// --- 8 ------------------------------------------------------------------------

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::map<std::string, std::uint64_t> hash_dir(const fs::path& d) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& e : fs::directory_iterator(d)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = fnv1a(ss.str());
  }
  return out;
}

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"mycelogic"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Verdict manifest_determinism() {
  const auto root = fs::temp_directory_path() / "mycelogic_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string colony = "[colony]\nwidth = 64\nheight = 64\nsteps = 700\n";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"synth-colony", colony},
      {"simulate-fhn", colony + "[electrodes]\ncount = 4\n[run]\niterations = 3000\nsnapshot_every = 1000\n"},
      {"mine-spikes", colony + "[electrodes]\ncount = 6\n[spikes]\npairs = 2\n"},
      {"mine-rc", colony + "[rc]\nensemble = 4\nexport_netlists = 1\n"},
      {"mine-functions", colony + "[functions]\nrepeats = 2\nchannels = 3\ndwell = 0.001\n"},
      {"export-netlist", colony + "[rc]\nmember = 3\n"},
  };
  std::size_t files = 0, identical_runs = 0;
  std::string failed;
  for (const auto& [cmd, text] : runs) {
    const auto cfg = root / (cmd + ".toml");
    std::ofstream(cfg) << text;
    const auto a = root / (cmd + "_a"), b = root / (cmd + "_b");
    const bool ok = cli({cmd, "--config", cfg.string(), "--seed", "7", "--out", a.string()}) == 0 &&
                    cli({cmd, "--config", (a / "manifest.json").string(), "--out", b.string()}) == 0;
    if (ok && hash_dir(a) == hash_dir(b)) {
      ++identical_runs;
      files += hash_dir(a).size();
    } else {
      failed += cmd + " ";
    }
  }
  fs::remove_all(root);
  return {identical_runs == runs.size(),
          fmt("%zu of %zu commands replayed from their manifest with hash-identical outputs (%zu files)%s%s",
              identical_runs, runs.size(), files, failed.empty() ? "" : "; differing: ", failed.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"transient solver RC-series oracle", rc_series_oracle},
      {"FHN resting invariance and isotropy", fhn_rest_and_isotropy},
      {"spike-gate hierarchy on synthetic colonies", spike_hierarchy},
      {"RC realizability (serial no OR, parallel no AND-NOT, no XOR)", rc_realizability},
      {"power-law fit recovery", fit_recovery},
      {"SOP round trip over all 4-input tables", sop_round_trip},
      {"function census arithmetic", census_arithmetic},
      {"manifest replay determinism", manifest_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v{false, ""};
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s  criterion %zu: %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
