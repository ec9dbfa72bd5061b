#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mycelogic/circuit.hpp"
#include "mycelogic/substrate.hpp"

namespace mycelogic {

enum class RcMode { serial, parallel };

std::string_view mode_name(RcMode m);
// "serial" or "parallel"; ConfigError otherwise.
RcMode parse_mode(std::string_view s);

enum class NodeRole { probe, source_x, source_y, ground };

struct RcElement {
  std::size_t a = 0;  // network node indices
  std::size_t b = 0;
  double length = 0.0;  // micrometres
  // Serial mode sets exactly one of the two; parallel mode sets both.
  std::optional<double> ohms;
  std::optional<double> farads;
};

struct RcBuildOptions {
  RcMode mode = RcMode::serial;
  std::uint64_t seed = 1;
  double ohms_per_um = 1.0e3;
  double farads_per_um = 1.0e-13;
  double p_resistor = 0.5;
  double bleed_ohms = 1.0e9;
  int max_retries = 64;

  void validate() const;
};

struct RcNetwork {
  RcMode mode = RcMode::serial;
  // Nodes of the graph component holding the terminals, in graph order.
  std::vector<std::int64_t> node_ids;
  std::vector<NodeRole> roles;
  std::size_t ground = 0;
  std::size_t source_x = 0;
  std::size_t source_y = 0;
  std::vector<RcElement> elements;
  // Nodes with no resistive path to a terminal; each gets a bleed resistor
  // to ground so the DC operating point stays defined.
  std::vector<std::size_t> bleeds;
  double bleed_ohms = 1.0e9;

  std::vector<std::size_t> probes() const;
  // Throws InvariantError if roles, elements or terminals are inconsistent.
  void validate() const;
};

// Terminals are drawn uniformly (distinct) and redrawn until they share a
// component of >= 3 nodes; after max_retries draws, TopologyError. Graphs
// with fewer than 3 nodes fail immediately.
RcNetwork build_rc(const ColonyGraph& g, const RcBuildOptions& options);

// Network as a circuit: ground is node 0, network node i maps to
// circuit_node(net, i); sources are ordered (x, y).
Circuit rc_circuit(const RcNetwork& net);
std::size_t circuit_node(const RcNetwork& net, std::size_t node);

struct TransientSettings {
  double dt = 2.5e-6;
  double duration = 10e-3;
};

// Probe voltages relative to ground. A disabled pulse holds its source at 0 V.
ProbeTraces transient(const RcNetwork& net, const std::optional<PulseSpec>& x_pulse,
                      const std::optional<PulseSpec>& y_pulse, const TransientSettings& settings);

// Peak |V| per probe for the four input conditions, indexed 2*x + y.
struct ConditionResponses {
  std::vector<std::size_t> probes;
  std::array<std::vector<double>, 4> peak;
  double max_kcl_residual = 0.0;
};

ConditionResponses respond(const RcNetwork& net, const PulseSpec& pulse,
                           const TransientSettings& settings);

enum class RcGate { and_gate, or_gate, and_not, select, xor_gate };
inline constexpr std::size_t kRcGateCount = 5;
inline constexpr std::array<RcGate, kRcGateCount> kRcGates = {
    RcGate::and_gate, RcGate::or_gate, RcGate::and_not, RcGate::select, RcGate::xor_gate};

// "and", "or", "andnot", "select", "xor".
std::string_view rc_gate_name(RcGate g);

// Two-input table (f00, f01, f10, f11) with inputs written (x y). Tables with
// f00 = 1 and constant tables give nullopt.
std::optional<RcGate> classify(bool f00, bool f01, bool f10, bool f11);

// V > theta reads TRUE.
std::optional<RcGate> classify_responses(const std::array<double, 4>& responses, double theta);

// theta_i = step * i for i = 1..count.
std::vector<double> theta_grid(double step = 1.0e-4, std::size_t count = 500);

struct SweepResult {
  std::vector<double> theta;
  std::vector<std::array<std::uint64_t, kRcGateCount>> counts;  // per theta, kRcGates order

  std::uint64_t count(std::size_t theta_index, RcGate g) const {
    return counts[theta_index][static_cast<std::size_t>(g)];
  }
  std::uint64_t total(RcGate g) const;
  void validate() const;
};

// theta,and,or,andnot,select,xor
std::string sweep_csv(const SweepResult& r);

struct RcMiningOptions {
  RcBuildOptions build;  // build.seed is replaced per ensemble member
  std::size_t ensemble = 100;
  std::vector<double> theta = theta_grid();
  PulseSpec pulse;
  TransientSettings transient;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct RcMiningReport {
  SweepResult sweep;
  std::size_t networks = 0;
  std::size_t probes = 0;  // summed over the ensemble
  double max_kcl_residual = 0.0;
};

// Ensemble member i is built with seed derive_seed(seed, "rc-network", i).
RcMiningReport mine_gates(const ColonyGraph& g, const RcMiningOptions& options);

// SPICE deck for one network; both sources carry `pulse`, values are printed
// with 17 significant digits.
std::string spice_netlist(const RcNetwork& net, const PulseSpec& pulse,
                          const TransientSettings& settings);

}  // namespace mycelogic
