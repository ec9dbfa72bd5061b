#include "mycelogic/rcnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mycelogic/error.hpp"
#include "mycelogic/parallel.hpp"
#include "mycelogic/rng.hpp"

namespace mycelogic {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view mode_name(RcMode m) { return m == RcMode::serial ? "serial" : "parallel"; }

RcMode parse_mode(std::string_view s) {
  if (s == "serial") return RcMode::serial;
  if (s == "parallel") return RcMode::parallel;
  throw ConfigError("unknown RC mode '" + std::string(s) + "' (expected serial or parallel)");
}

void RcBuildOptions::validate() const {
  if (!(ohms_per_um > 0.0) || !std::isfinite(ohms_per_um))
    throw ConfigError("resistance scale must be > 0");
  if (!(farads_per_um > 0.0) || !std::isfinite(farads_per_um))
    throw ConfigError("capacitance scale must be > 0");
  if (!(p_resistor >= 0.0 && p_resistor <= 1.0))
    throw ConfigError("resistor probability must lie in [0, 1]");
  if (!(bleed_ohms > 0.0) || !std::isfinite(bleed_ohms))
    throw ConfigError("bleed resistance must be > 0");
  if (max_retries < 1) throw ConfigError("max_retries must be >= 1");
}

std::vector<std::size_t> RcNetwork::probes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < roles.size(); ++i)
    if (roles[i] == NodeRole::probe) out.push_back(i);
  return out;
}

void RcNetwork::validate() const {
  const std::size_t n = node_ids.size();
  if (roles.size() != n) throw InvariantError("RC network roles do not match its nodes");
  if (ground >= n || source_x >= n || source_y >= n)
    throw InvariantError("RC network terminal out of range");
  if (ground == source_x || ground == source_y || source_x == source_y)
    throw InvariantError("RC network terminals must be distinct");
  std::array<std::size_t, 4> seen{};
  for (auto r : roles) ++seen[static_cast<std::size_t>(r)];
  if (seen[static_cast<std::size_t>(NodeRole::ground)] != 1 ||
      seen[static_cast<std::size_t>(NodeRole::source_x)] != 1 ||
      seen[static_cast<std::size_t>(NodeRole::source_y)] != 1)
    throw InvariantError("RC network needs exactly one ground and two sources");
  if (roles[ground] != NodeRole::ground || roles[source_x] != NodeRole::source_x ||
      roles[source_y] != NodeRole::source_y)
    throw InvariantError("RC network terminal roles are inconsistent");
  if (seen[static_cast<std::size_t>(NodeRole::probe)] == 0)
    throw InvariantError("RC network has no probe");
  for (const auto& e : elements) {
    if (e.a >= n || e.b >= n || e.a == e.b) throw InvariantError("RC element endpoints invalid");
    if (!e.ohms && !e.farads) throw InvariantError("RC element has neither R nor C");
    if (mode == RcMode::serial && e.ohms && e.farads)
      throw InvariantError("serial-mode element must be a single R or C");
    if (mode == RcMode::parallel && (!e.ohms || !e.farads))
      throw InvariantError("parallel-mode element must be an R and C pair");
    if ((e.ohms && !(*e.ohms > 0.0)) || (e.farads && !(*e.farads > 0.0)))
      throw InvariantError("RC element values must be > 0");
  }
}

RcNetwork build_rc(const ColonyGraph& g, const RcBuildOptions& options) {
  options.validate();
  const std::size_t n = g.nodes().size();
  if (n < 3)
    throw TopologyError("graph has " + std::to_string(n) +
                        " nodes; an RC network needs ground and two sources on >= 3 nodes");
  const auto labels = g.component_labels();
  std::vector<std::size_t> component_size(n, 0);
  for (auto l : labels) ++component_size[l];

  Rng rng(options.seed);
  std::size_t ground = 0, sx = 0, sy = 0;
  bool found = false;
  for (int attempt = 0; attempt < options.max_retries && !found; ++attempt) {
    ground = rng.index(n);
    do sx = rng.index(n); while (sx == ground);
    do sy = rng.index(n); while (sy == ground || sy == sx);
    found = labels[ground] == labels[sx] && labels[ground] == labels[sy] &&
            component_size[labels[ground]] >= 3;
  }
  if (!found)
    throw TopologyError("no connected terminal triple found after " +
                        std::to_string(options.max_retries) + " draws");

  RcNetwork net;
  net.mode = options.mode;
  net.bleed_ohms = options.bleed_ohms;
  const auto comp = labels[ground];
  std::vector<std::size_t> local(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != comp) continue;
    local[i] = net.node_ids.size();
    net.node_ids.push_back(g.nodes()[i].id);
    net.roles.push_back(NodeRole::probe);
  }
  net.ground = local[ground];
  net.source_x = local[sx];
  net.source_y = local[sy];
  net.roles[net.ground] = NodeRole::ground;
  net.roles[net.source_x] = NodeRole::source_x;
  net.roles[net.source_y] = NodeRole::source_y;

  for (const auto& e : g.edges()) {
    const std::size_t ia = g.node_index(e.a);
    if (labels[ia] != comp) continue;
    RcElement el;
    el.a = local[ia];
    el.b = local[g.node_index(e.b)];
    el.length = e.length;
    const double r = options.ohms_per_um * e.length;
    const double c = options.farads_per_um * e.length;
    if (options.mode == RcMode::parallel) {
      el.ohms = r;
      el.farads = c;
    } else if (rng.bernoulli(options.p_resistor)) {
      el.ohms = r;
    } else {
      el.farads = c;
    }
    net.elements.push_back(el);
  }

  // Resistive components; anything not reaching a terminal floats at DC.
  std::vector<std::size_t> parent(net.node_ids.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : net.elements)
    if (e.ohms) parent[find(e.a)] = find(e.b);
  std::vector<char> anchored(net.node_ids.size(), 0);
  for (auto t : {net.ground, net.source_x, net.source_y}) anchored[find(t)] = 1;
  for (std::size_t i = 0; i < net.node_ids.size(); ++i)
    if (!anchored[find(i)]) net.bleeds.push_back(i);

  net.validate();
  return net;
}

std::size_t circuit_node(const RcNetwork& net, std::size_t node) {
  if (node == net.ground) return 0;
  return node < net.ground ? node + 1 : node;
}

Circuit rc_circuit(const RcNetwork& net) {
  Circuit c;
  c.node_count = net.node_ids.size();
  c.node_names.resize(c.node_count);
  for (std::size_t i = 0; i < net.node_ids.size(); ++i)
    c.node_names[circuit_node(net, i)] = "n" + std::to_string(net.node_ids[i]);
  for (const auto& e : net.elements) {
    const auto a = circuit_node(net, e.a);
    const auto b = circuit_node(net, e.b);
    if (e.ohms) c.resistors.push_back({a, b, *e.ohms});
    if (e.farads) c.capacitors.push_back({a, b, *e.farads});
  }
  for (auto node : net.bleeds) c.resistors.push_back({circuit_node(net, node), 0, net.bleed_ohms});
  c.sources.push_back({circuit_node(net, net.source_x)});
  c.sources.push_back({circuit_node(net, net.source_y)});
  return c;
}

ProbeTraces transient(const RcNetwork& net, const std::optional<PulseSpec>& x_pulse,
                      const std::optional<PulseSpec>& y_pulse, const TransientSettings& settings) {
  const TransientSolver solver(rc_circuit(net), settings.dt);
  std::vector<std::size_t> nodes;
  for (auto p : net.probes()) nodes.push_back(circuit_node(net, p));
  const std::vector<Waveform> sources = {x_pulse ? Waveform::pulse(*x_pulse) : Waveform::zero(),
                                         y_pulse ? Waveform::pulse(*y_pulse) : Waveform::zero()};
  auto traces = record_probes(solver, sources, settings.duration, nodes);
  traces.probes = net.probes();
  return traces;
}

ConditionResponses respond(const RcNetwork& net, const PulseSpec& pulse,
                           const TransientSettings& settings) {
  const TransientSolver solver(rc_circuit(net), settings.dt);
  ConditionResponses out;
  out.probes = net.probes();
  std::vector<std::size_t> nodes;
  for (auto p : out.probes) nodes.push_back(circuit_node(net, p));
  const Waveform on = Waveform::pulse(pulse);
  const Waveform off = Waveform::zero();
  for (int c = 0; c < 4; ++c) {
    const std::vector<Waveform> sources = {(c & 2) ? on : off, (c & 1) ? on : off};
    auto& peak = out.peak[c];
    peak.assign(nodes.size(), 0.0);
    const auto stats = solver.run(sources, settings.duration, [&](const TransientStep& s) {
      for (std::size_t i = 0; i < nodes.size(); ++i)
        peak[i] = std::max(peak[i], std::abs(s.voltages[nodes[i]]));
    });
    out.max_kcl_residual = std::max(out.max_kcl_residual, stats.max_kcl_residual);
  }
  return out;
}

std::string_view rc_gate_name(RcGate g) {
  switch (g) {
    case RcGate::and_gate: return "and";
    case RcGate::or_gate: return "or";
    case RcGate::and_not: return "andnot";
    case RcGate::select: return "select";
    case RcGate::xor_gate: return "xor";
  }
  return "?";
}

std::optional<RcGate> classify(bool f00, bool f01, bool f10, bool f11) {
  if (f00) return std::nullopt;
  const int key = (f01 ? 4 : 0) | (f10 ? 2 : 0) | (f11 ? 1 : 0);
  switch (key) {
    case 0b001: return RcGate::and_gate;
    case 0b111: return RcGate::or_gate;
    case 0b100:
    case 0b010: return RcGate::and_not;
    case 0b101:
    case 0b011: return RcGate::select;
    case 0b110: return RcGate::xor_gate;
    default: return std::nullopt;
  }
}

std::optional<RcGate> classify_responses(const std::array<double, 4>& r, double theta) {
  return classify(r[0] > theta, r[1] > theta, r[2] > theta, r[3] > theta);
}

std::vector<double> theta_grid(double step, std::size_t count) {
  if (!(step > 0.0) || count == 0) throw ConfigError("theta grid needs step > 0 and count >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = step * static_cast<double>(i + 1);
  return out;
}

std::uint64_t SweepResult::total(RcGate g) const {
  std::uint64_t t = 0;
  for (const auto& row : counts) t += row[static_cast<std::size_t>(g)];
  return t;
}

void SweepResult::validate() const {
  if (counts.size() != theta.size()) throw InvariantError("sweep counts do not match theta grid");
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (!(theta[i] > theta[i - 1])) throw InvariantError("theta grid must be strictly increasing");
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = "theta";
  for (auto g : kRcGates) {
    out += ',';
    out += rc_gate_name(g);
  }
  out += '\n';
  for (std::size_t i = 0; i < r.theta.size(); ++i) {
    out += g17(r.theta[i]);
    for (auto c : r.counts[i]) out += "," + std::to_string(c);
    out += '\n';
  }
  return out;
}

RcMiningReport mine_gates(const ColonyGraph& g, const RcMiningOptions& options) {
  if (options.ensemble < 1) throw ConfigError("ensemble must be >= 1");
  options.build.validate();
  options.pulse.validate();
  if (!(options.transient.dt > 0.0) || !(options.transient.duration >= options.transient.dt))
    throw ConfigError("transient needs dt > 0 and length >= dt");
  RcMiningReport report;
  report.sweep.theta = options.theta;
  report.sweep.counts.assign(options.theta.size(), {});
  report.sweep.validate();

  struct Member {
    std::vector<std::array<std::uint64_t, kRcGateCount>> counts;
    std::size_t probes = 0;
    double kcl = 0.0;
  };
  std::vector<Member> members(options.ensemble);
  parallel_for(options.ensemble, options.threads, [&](std::size_t i) {
    RcBuildOptions build = options.build;
    build.seed = derive_seed(options.seed, "rc-network", i);
    const RcNetwork net = build_rc(g, build);
    const auto resp = respond(net, options.pulse, options.transient);
    auto& m = members[i];
    m.counts.assign(options.theta.size(), {});
    m.probes = resp.probes.size();
    m.kcl = resp.max_kcl_residual;
    for (std::size_t p = 0; p < resp.probes.size(); ++p) {
      const std::array<double, 4> r = {resp.peak[0][p], resp.peak[1][p], resp.peak[2][p],
                                       resp.peak[3][p]};
      for (std::size_t t = 0; t < options.theta.size(); ++t)
        if (const auto gate = classify_responses(r, options.theta[t]))
          ++m.counts[t][static_cast<std::size_t>(*gate)];
    }
  });
  for (const auto& m : members) {
    for (std::size_t t = 0; t < options.theta.size(); ++t)
      for (std::size_t k = 0; k < kRcGateCount; ++k) report.sweep.counts[t][k] += m.counts[t][k];
    report.probes += m.probes;
    report.max_kcl_residual = std::max(report.max_kcl_residual, m.kcl);
  }
  report.networks = options.ensemble;
  return report;
}

std::string spice_netlist(const RcNetwork& net, const PulseSpec& pulse,
                          const TransientSettings& settings) {
  pulse.validate();
  auto name = [&](std::size_t node) {
    return node == net.ground ? std::string("0") : "n" + std::to_string(net.node_ids[node]);
  };
  std::string out = "* mycelium RC network (" + std::string(mode_name(net.mode)) + ")\n";
  const std::string wave = "PULSE(0 " + g17(pulse.amplitude) + " " + g17(pulse.delay) + " " +
                           g17(pulse.rise) + " " + g17(pulse.fall) + " " + g17(pulse.width) +
                           " " + g17(pulse.period) + " " + std::to_string(pulse.count) + ")";
  out += "V1 " + name(net.source_x) + " 0 " + wave + "\n";
  out += "V2 " + name(net.source_y) + " 0 " + wave + "\n";
  std::size_t r = 0, c = 0;
  for (const auto& e : net.elements) {
    if (e.ohms) out += "R" + std::to_string(++r) + " " + name(e.a) + " " + name(e.b) + " " + g17(*e.ohms) + "\n";
    if (e.farads) out += "C" + std::to_string(++c) + " " + name(e.a) + " " + name(e.b) + " " + g17(*e.farads) + "\n";
  }
  for (auto node : net.bleeds)
    out += "R" + std::to_string(++r) + " " + name(node) + " 0 " + g17(net.bleed_ohms) + "\n";
  out += ".tran " + g17(settings.dt) + " " + g17(settings.duration) + "\n.end\n";
  return out;
}

}  // namespace mycelogic
