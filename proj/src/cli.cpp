#include "mycelogic/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mycelogic/config.hpp"
#include "mycelogic/error.hpp"
#include "mycelogic/excitable.hpp"
#include "mycelogic/fit.hpp"
#include "mycelogic/funcmine.hpp"
#include "mycelogic/rcnet.hpp"
#include "mycelogic/report.hpp"
#include "mycelogic/rng.hpp"
#include "mycelogic/spikegates.hpp"
#include "mycelogic/substrate.hpp"

namespace mycelogic {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

struct Run {
  std::string command;
  Config cfg;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::map<std::string, std::string> files;

  void emit(const std::string& name, std::string content) { files[name] = std::move(content); }
  void emit(const std::string& name, const std::vector<std::uint8_t>& bytes) {
    files[name] = std::string(bytes.begin(), bytes.end());
  }
};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string s = read_file(path);
  return {s.begin(), s.end()};
}

std::size_t to_size(std::int64_t v, const char* what) {
  if (v < 0) throw ConfigError(std::string(what) + " must be >= 0");
  return static_cast<std::size_t>(v);
}

FhnParams read_fhn(Config& c) {
  FhnParams p;
  p.a = c.get_double("fhn.a", p.a);
  p.b = c.get_double("fhn.b", p.b);
  p.c1 = c.get_double("fhn.c1", p.c1);
  p.c2 = c.get_double("fhn.c2", p.c2);
  p.du = c.get_double("fhn.du", p.du);
  p.dt = c.get_double("fhn.dt", p.dt);
  p.dx = c.get_double("fhn.dx", p.dx);
  p.validate();
  return p;
}

GridTemplate substrate_template(Run& r, std::size_t index) {
  const auto source = r.cfg.get_string("substrate.source", "synthetic");
  if (source == "synthetic") {
    ColonyParams p;
    p.seed = derive_seed(r.seed, "colony", index);
    p.width = static_cast<int>(r.cfg.get_int("colony.width", p.width));
    p.height = static_cast<int>(r.cfg.get_int("colony.height", p.height));
    p.branch_rate = r.cfg.get_double("colony.branch_rate", p.branch_rate);
    p.steps = static_cast<int>(r.cfg.get_int("colony.steps", p.steps));
    return synthesize_colony(p);
  }
  if (source == "image") {
    const auto path = r.cfg.get_string("substrate.image", "");
    if (path.empty()) throw ConfigError("substrate.image must name a PGM file");
    return load_template(read_bytes(path), r.cfg.get_double("substrate.threshold", 0.5));
  }
  throw ConfigError("substrate.source must be synthetic or image for this command, got '" + source + "'");
}

ColonyGraph substrate_graph(Run& r, std::size_t index) {
  if (r.cfg.get_string("substrate.graph", "") != "") {
    return load_colony_graph(read_file(r.cfg.get_string("substrate.graph", "")));
  }
  const GridTemplate t = substrate_template(r, index);
  GraphExtraction g;
  g.z_jitter = r.cfg.get_double("graph.z_jitter", 2.0);
  g.um_per_node = r.cfg.get_double("graph.um_per_node", 1.0);
  g.contract_chains = r.cfg.get_bool("graph.contract", true);
  g.seed = derive_seed(r.seed, "graph", index);
  return graph_from_template(t, g);
}

std::vector<Electrode> read_electrodes(Run& r, const GridTemplate& t, std::size_t index) {
  const auto count = to_size(r.cfg.get_int("electrodes.count", 16), "electrodes.count");
  const double radius = r.cfg.get_double("electrodes.radius", 2.0);
  return spread_electrodes(t, count, derive_seed(r.seed, "electrodes", index), radius);
}

std::string electrodes_csv(const std::vector<Electrode>& es) {
  std::string out = "index,x,y,radius\n";
  for (std::size_t i = 0; i < es.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(es[i].center.x) + "," +
           std::to_string(es[i].center.y) + "," + g17(es[i].radius) + "\n";
  return out;
}

PulseSpec read_pulse(Config& c) {
  PulseSpec p;
  p.amplitude = c.get_double("pulse.amplitude", p.amplitude);
  p.delay = c.get_double("pulse.delay", p.delay);
  p.rise = c.get_double("pulse.rise", p.rise);
  p.fall = c.get_double("pulse.fall", p.fall);
  p.width = c.get_double("pulse.width", p.width);
  p.period = c.get_double("pulse.period", p.period);
  p.count = static_cast<int>(c.get_int("pulse.count", p.count));
  p.validate();
  return p;
}

RcBuildOptions read_build(Config& c) {
  RcBuildOptions b;
  b.ohms_per_um = c.get_double("rc.ohms_per_um", b.ohms_per_um);
  b.farads_per_um = c.get_double("rc.farads_per_um", b.farads_per_um);
  b.p_resistor = c.get_double("rc.p_resistor", b.p_resistor);
  b.bleed_ohms = c.get_double("rc.bleed_ohms", b.bleed_ohms);
  b.max_retries = static_cast<int>(c.get_int("rc.max_retries", b.max_retries));
  b.validate();
  return b;
}

TransientSettings read_transient(Config& c) {
  TransientSettings t;
  t.dt = c.get_double("rc.dt", t.dt);
  t.duration = c.get_double("rc.duration", t.duration);
  return t;
}

std::vector<RcMode> read_modes(Config& c) {
  const auto m = c.get_string("rc.mode", "both");
  if (m == "both") return {RcMode::serial, RcMode::parallel};
  return {parse_mode(m)};
}

// --- commands ------------------------------------------------------------------

void cmd_synth_colony(Run& r) {
  const GridTemplate t = substrate_template(r, 0);
  r.emit("colony.pgm", save_template(t));
  GraphExtraction g;
  g.z_jitter = r.cfg.get_double("graph.z_jitter", 2.0);
  g.um_per_node = r.cfg.get_double("graph.um_per_node", 1.0);
  g.contract_chains = r.cfg.get_bool("graph.contract", true);
  g.seed = derive_seed(r.seed, "graph", 0);
  const auto graph = graph_from_template(t, g);
  r.emit("colony_graph.txt", format_colony_graph(graph));
  nlohmann::ordered_json s;
  s["width"] = t.width();
  s["height"] = t.height();
  s["conductive_nodes"] = t.conductive_count();
  s["components"] = count_components(t);
  s["graph_nodes"] = graph.nodes().size();
  s["graph_edges"] = graph.edges().size();
  r.emit("colony_summary.json", s.dump(2) + "\n");
}

void cmd_simulate_fhn(Run& r) {
  const GridTemplate t = substrate_template(r, 0);
  const FhnParams params = read_fhn(r.cfg);
  const auto electrodes = read_electrodes(r, t, 0);
  const auto stimulated = r.cfg.get_int_list("stimulus.electrodes", {0});
  const auto start = r.cfg.get_int("stimulus.start", 0);
  const auto duration = r.cfg.get_int("stimulus.duration", 100);
  const double amplitude = r.cfg.get_double("stimulus.amplitude", 0.5);
  StimulusPlan plan;
  for (auto e : stimulated) {
    if (e < 0 || static_cast<std::size_t>(e) >= electrodes.size())
      throw ConfigError("stimulus.electrodes names electrode " + std::to_string(e) +
                        " but only " + std::to_string(electrodes.size()) + " exist");
    plan.push_back(Stimulus{electrodes[static_cast<std::size_t>(e)], start, duration, amplitude});
  }
  const auto iterations = r.cfg.get_int("run.iterations", 60000);
  const auto sample_every = r.cfg.get_int("run.sample_every", 10);
  const auto snapshot_every = r.cfg.get_int("run.snapshot_every", 0);
  if (iterations <= 0) throw ConfigError("run.iterations must be > 0");
  if (snapshot_every < 0) throw ConfigError("run.snapshot_every must be >= 0");

  const FhnModel model(t, params);
  FhnState state = model.resting_state();
  std::vector<PotentialTrace> traces(electrodes.size());
  const auto chunk = snapshot_every > 0 ? snapshot_every : iterations;
  while (state.t < iterations) {
    RunOptions o;
    o.iterations = std::min<std::int64_t>(chunk, iterations - state.t);
    o.sample_every = sample_every;
    auto part = run(model, state, plan, electrodes, o);
    for (std::size_t e = 0; e < part.size(); ++e) {
      traces[e].electrode = e;
      traces[e].samples.insert(traces[e].samples.end(), part[e].samples.begin(), part[e].samples.end());
    }
    if (snapshot_every > 0) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%09lld.pgm", static_cast<long long>(state.t));
      r.emit(name, snapshot_pgm(model, state));
    }
  }
  // Long format, ordered by iteration then electrode.
  std::string csv = "iteration,electrode_id,p\n";
  const std::size_t rows = traces.empty() ? 0 : traces.front().samples.size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (const auto& tr : traces)
      csv += std::to_string(tr.samples[i].iteration) + "," + std::to_string(tr.electrode) + "," +
             g17(tr.samples[i].p) + "\n";
  }
  r.emit("template.pgm", save_template(t));
  r.emit("electrodes.csv", electrodes_csv(electrodes));
  r.emit("traces.csv", csv);
}

void cmd_mine_spikes(Run& r) {
  const auto colonies = to_size(r.cfg.get_int("spikes.colonies", 1), "spikes.colonies");
  const auto pair_count = to_size(r.cfg.get_int("spikes.pairs", 3), "spikes.pairs");
  SpikeMiningOptions o;
  o.params = read_fhn(r.cfg);
  o.windows.coincidence = r.cfg.get_int("spikes.coincidence", o.windows.coincidence);
  o.windows.separation = r.cfg.get_int("spikes.separation", o.windows.separation);
  o.amplitude_threshold = r.cfg.get_double("spikes.amplitude", o.amplitude_threshold);
  o.max_iterations = r.cfg.get_int("spikes.max_iterations", o.max_iterations);
  o.sample_every = r.cfg.get_int("spikes.sample_every", o.sample_every);
  o.quiescence_tolerance = r.cfg.get_double("spikes.quiescence", o.quiescence_tolerance);
  o.threads = r.threads;
  if (colonies < 1) throw ConfigError("spikes.colonies must be >= 1");

  std::vector<GateEvent> pooled;
  std::size_t electrode_count = 0;
  std::string events = "colony,x,y,electrode,iteration,o01,o10,o11,gate\n";
  for (std::size_t c = 0; c < colonies; ++c) {
    const GridTemplate t = substrate_template(r, c);
    const auto electrodes = read_electrodes(r, t, c);
    electrode_count = std::max(electrode_count, electrodes.size());
    const auto pairs = choose_input_pairs(electrodes.size(), pair_count, derive_seed(r.seed, "pairs", c));
    const auto results = mine_spike_gates(t, electrodes, pairs, o);
    const std::string tag = "colony" + std::to_string(c);
    r.emit(tag + "_template.pgm", save_template(t));
    r.emit(tag + "_electrodes.csv", electrodes_csv(electrodes));
    for (const auto& res : results) {
      const auto cen = census(res.events);
      r.emit(tag + "_pair" + std::to_string(res.pair.x) + "-" + std::to_string(res.pair.y) + "_census.csv",
             census_csv(cen, electrodes.size()));
      for (const auto& e : res.events) {
        events += std::to_string(c) + "," + std::to_string(res.pair.x) + "," + std::to_string(res.pair.y) +
                  "," + std::to_string(e.electrode) + "," + std::to_string(e.time) + "," +
                  (e.o01 ? "1" : "0") + "," + (e.o10 ? "1" : "0") + "," + (e.o11 ? "1" : "0") + "," +
                  std::string(gate_label(e.gate)) + "\n";
      }
      pooled.insert(pooled.end(), res.events.begin(), res.events.end());
    }
  }
  const auto total = census(pooled);
  r.emit("events.csv", events);
  r.emit("census_pooled.csv", census_csv(total, electrode_count));
  r.emit("gate_ratios.json", ratio_report_json(total, "synthetic colony"));
  std::vector<RatioSeries> series(1);
  series[0].substrate = "synthetic colony";
  if (const auto rr = total.ratios()) series[0].ratios = *rr;
  // Extra ratio reports (other substrates) drawn alongside, comma-separated paths.
  const std::string overlay = r.cfg.get_string("spikes.overlay", "");
  std::string_view rest = overlay;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string path(rest.substr(0, comma));
    rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
    if (path.empty()) continue;
    try {
      series.push_back(parse_ratio_report(read_file(path)));
    } catch (const ParseError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  r.emit("gate_ratios.svg", gate_ratio_svg(series));
}

void cmd_mine_rc(Run& r) {
  const ColonyGraph g = substrate_graph(r, 0);
  RcMiningOptions o;
  o.build = read_build(r.cfg);
  o.ensemble = to_size(r.cfg.get_int("rc.ensemble", 100), "rc.ensemble");
  o.theta = theta_grid(r.cfg.get_double("rc.theta_step", 1e-4),
                       to_size(r.cfg.get_int("rc.theta_count", 500), "rc.theta_count"));
  o.pulse = read_pulse(r.cfg);
  o.transient = read_transient(r.cfg);
  o.threads = r.threads;
  const auto netlists = to_size(r.cfg.get_int("rc.export_netlists", 0), "rc.export_netlists");
  for (auto mode : read_modes(r.cfg)) {
    const std::string m(mode_name(mode));
    o.build.mode = mode;
    o.seed = derive_seed(r.seed, "rc-" + m);
    const auto report = mine_gates(g, o);
    if (!(report.max_kcl_residual < 1e-9))
      throw InvariantError("KCL residual " + g17(report.max_kcl_residual) + " exceeds 1e-9 in " + m + " mode");
    r.emit("sweep_" + m + ".csv", sweep_csv(report.sweep));
    r.emit("fit_" + m + ".json", fit_report_json(report.sweep, m));
    r.emit("sweep_" + m + ".svg", sweep_svg(report.sweep, m + " RC networks"));
    for (std::size_t i = 0; i < std::min(netlists, o.ensemble); ++i) {
      RcBuildOptions b = o.build;
      b.seed = derive_seed(o.seed, "rc-network", i);
      r.emit("netlist_" + m + "_" + std::to_string(i) + ".cir",
             spice_netlist(build_rc(g, b), o.pulse, o.transient));
    }
  }
}

void cmd_export_netlist(Run& r) {
  const ColonyGraph g = substrate_graph(r, 0);
  RcBuildOptions b = read_build(r.cfg);
  b.mode = parse_mode(r.cfg.get_string("rc.mode", "serial"));
  const auto member = r.cfg.get_u64("rc.member", 0);
  b.seed = derive_seed(derive_seed(r.seed, "rc-" + std::string(mode_name(b.mode))), "rc-network", member);
  const auto net = build_rc(g, b);
  r.emit("network.cir", spice_netlist(net, read_pulse(r.cfg), read_transient(r.cfg)));
  r.emit("colony_graph.txt", format_colony_graph(g));
}

void cmd_mine_functions(Run& r) {
  const auto source = r.cfg.get_string("functions.source", "rc");
  const auto thresholds = to_size(r.cfg.get_int("functions.thresholds", 32), "functions.thresholds");
  const double lo = r.cfg.get_double("functions.band_lo", 0.05);
  const double hi = r.cfg.get_double("functions.band_hi", 1.0);
  const auto top = to_size(r.cfg.get_int("functions.top", 20), "functions.top");
  const bool write_traces = r.cfg.get_bool("functions.write_traces", false);
  const BandBuilder bands = [lo, hi](const ChannelRecording& rec, std::size_t n) {
    return linear_bands(rec, n, lo, hi);
  };

  std::vector<std::vector<ChannelRecording>> repeats;
  if (source == "csv") {
    const auto traces = r.cfg.get_string("functions.trace_csv", "");
    const auto sidecar = r.cfg.get_string("functions.sidecar", "");
    if (traces.empty() || sidecar.empty())
      throw ConfigError("functions.trace_csv and functions.sidecar must name files");
    repeats.push_back(load_recordings(read_file(traces), read_file(sidecar)));
  } else if (source == "rc" || source == "fhn") {
    const auto count = to_size(r.cfg.get_int("functions.repeats", 14), "functions.repeats");
    const auto channels = to_size(r.cfg.get_int("functions.channels", 7), "functions.channels");
    if (source == "rc") {
      const ColonyGraph g = substrate_graph(r, 0);
      StateSchedule sched;
      sched.dwell = r.cfg.get_double("functions.dwell", sched.dwell);
      sched.low = r.cfg.get_double("functions.low", sched.low);
      sched.high = r.cfg.get_double("functions.high", sched.high);
      RcDriverOptions d;
      d.build = read_build(r.cfg);
      d.build.mode = parse_mode(r.cfg.get_string("rc.mode", "parallel"));
      d.channels = channels;
      d.ramp = r.cfg.get_double("functions.ramp", d.ramp);
      d.transient.dt = r.cfg.get_double("functions.dt", d.transient.dt);
      for (std::size_t k = 0; k < count; ++k) {
        d.build.seed = derive_seed(r.seed, "functions-repeat", k);
        repeats.push_back(synth_rc_recordings(g, sched, d));
      }
    } else {
      const GridTemplate t = substrate_template(r, 0);
      FhnDriverOptions d;
      d.params = read_fhn(r.cfg);
      d.dwell_iterations = r.cfg.get_int("functions.dwell_iterations", d.dwell_iterations);
      d.sample_every = r.cfg.get_int("functions.sample_every", d.sample_every);
      const double radius = r.cfg.get_double("electrodes.radius", 2.0);
      for (std::size_t k = 0; k < count; ++k) {
        const auto sites = spread_electrodes(t, 4 + channels, derive_seed(r.seed, "functions-repeat", k), radius);
        repeats.push_back(synth_fhn_recordings(t, std::span(sites).first(4), std::span(sites).subspan(4), d));
      }
    }
  } else {
    throw ConfigError("functions.source must be rc, fhn or csv, got '" + source + "'");
  }
  if (write_traces) {
    for (std::size_t k = 0; k < repeats.size(); ++k) {
      r.emit("traces_repeat" + std::to_string(k) + ".csv", format_trace_csv(repeats[k]));
      r.emit("traces_repeat" + std::to_string(k) + ".json",
             format_boundaries_json(repeats[k].front().boundaries));
    }
  }

  const auto tables = mine_tables(repeats, thresholds, bands, r.threads);
  std::string csv = "repeat,channel,threshold,table_decimal,sop\n";
  for (const auto& t : tables)
    csv += std::to_string(t.from.repeat) + "," + std::to_string(t.from.channel) + "," +
           std::to_string(t.from.threshold) + "," + std::to_string(t.bits) + ",\"" + sop(t.bits).str() + "\"\n";
  const auto c = census_functions(tables);
  r.emit("tables.csv", csv);
  r.emit("census.csv", function_census_csv(c));
  r.emit("top_functions.json", top_functions_json(c, top));
  r.emit("census.svg", function_census_svg(c));
}

// A manifest written by an earlier run replays as a config: its resolved
// keys are exactly the ones the same command looks up.
Config config_from_manifest(const fs::path& path, const std::string& command) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object() || !j.contains("command"))
    throw ConfigError(path.string() + ": not a run manifest");
  if (j["command"] != command)
    throw ConfigError(path.string() + ": manifest is for '" + j["command"].get<std::string>() + "', not '" +
                      command + "'");
  Config c;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw ConfigError(path.string() + ": config value for " + k + " is not a string");
    c.set(k, v.get<std::string>());
  }
  return c;
}

std::string manifest_json(const Run& r) {
  nlohmann::ordered_json j;
  j["tool"] = "mycelogic";
  j["version"] = kVersion;
  j["command"] = r.command;
  j["master_seed"] = r.seed;
  j["seed_rule"] = kSeedRule;
  j["threads"] = r.threads;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.cfg.resolved()) cfg[k] = v;
  auto& files = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& [name, content] : r.files) files.push_back(name);
  return j.dump(2) + "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boolean gate and function mining on simulated mycelium substrates", "mycelogic"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir = "out";
  app.add_option("--config", config_path,
                 "TOML-like key-value config file, or a manifest.json from an earlier run to replay");
  app.add_option("--seed", seed, "master RNG seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);

  using Handler = void (*)(Run&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"synth-colony", "grow a synthetic colony mask and its graph", cmd_synth_colony},
      {"simulate-fhn", "run excitation dynamics and record electrode potentials", cmd_simulate_fhn},
      {"mine-spikes", "mine two-input gates from spike coincidences", cmd_mine_spikes},
      {"mine-rc", "mine gates from randomized RC networks over a threshold sweep", cmd_mine_rc},
      {"mine-functions", "mine four-input functions from multi-channel recordings", cmd_mine_functions},
      {"export-netlist", "write one RC network as a SPICE deck", cmd_export_netlist},
  };
  for (const auto& [name, help, handler] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Run r;
  try {
    Handler handler = nullptr;
    for (const auto& [name, help, h] : commands) {
      if (app.got_subcommand(name)) {
        r.command = name;
        handler = h;
      }
    }
    if (!config_path.empty()) {
      if (fs::path(config_path).extension() == ".json") r.cfg = config_from_manifest(config_path, r.command);
      else r.cfg = Config::load(config_path);
    }
    if (seed) r.cfg.set("seed", std::to_string(*seed));
    if (threads) r.cfg.set("threads", std::to_string(*threads));
    r.seed = r.cfg.get_u64("seed", 1);
    const auto t = r.cfg.get_int("threads", 1);
    if (t < 1) throw ConfigError("threads must be >= 1");
    r.threads = static_cast<unsigned>(t);
    handler(r);
    if (const auto stray = r.cfg.unused(); !stray.empty()) {
      std::string keys;
      for (const auto& k : stray) keys += (keys.empty() ? "" : ", ") + k;
      throw ConfigError("unused config keys for " + r.command + ": " + keys);
    }
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    for (const auto& [name, content] : r.files) write_file_atomic(dir / name, content);
    write_file_atomic(dir / "manifest.json", manifest_json(r));
    out << r.command << ": wrote " << r.files.size() + 1 << " files to " << dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "mycelogic " << (r.command.empty() ? "" : r.command + ": ") << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mycelogic
