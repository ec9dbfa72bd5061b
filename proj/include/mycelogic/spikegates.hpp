#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mycelogic/excitable.hpp"

namespace mycelogic {

// The seven two-input gates with f(0,0) = 0, in census-table column order.
enum class Gate : std::uint8_t {
  x_or_y,
  select_y,
  x_xor_y,
  select_x,
  notx_and_y,
  x_and_noty,
  x_and_y,
};

inline constexpr std::size_t kGateCount = 7;

inline constexpr std::array<Gate, kGateCount> kTableOrder = {
    Gate::x_or_y,     Gate::select_y,   Gate::x_xor_y, Gate::select_x,
    Gate::notx_and_y, Gate::x_and_noty, Gate::x_and_y,
};

// Ordering of the ratio vector (most to least common in natural substrates).
inline constexpr std::array<Gate, kGateCount> kRatioOrder = {
    Gate::select_x,   Gate::select_y, Gate::notx_and_y, Gate::x_and_noty,
    Gate::x_or_y,     Gate::x_and_y,  Gate::x_xor_y,
};

// "x+y", "Sy", "x^y", "Sx", "!x.y", "x.!y", "x.y".
std::string_view gate_label(Gate g);

// (o01, o10, o11) -> gate; nullopt for (0,0,0).
std::optional<Gate> gate_from_outputs(bool o01, bool o10, bool o11);

struct SpikeTrain {
  std::size_t electrode = 0;
  std::vector<std::int64_t> onsets;
};

struct SpikeWindows {
  // Spikes closer than this (iterations) across input conditions coincide.
  std::int64_t coincidence = 200;
  // Excursions separated by no more than this merge into one spike.
  std::int64_t separation = 1000;
};

// Upward crossings of amp_threshold; an excursion starting within
// `separation` iterations of the previous one's last supra-threshold sample
// is merged into it.
SpikeTrain detect_spikes(const PotentialTrace& trace, double amp_threshold,
                         std::int64_t separation);

struct GateEvent {
  std::size_t electrode = 0;
  std::int64_t time = 0;
  bool o01 = false;
  bool o10 = false;
  bool o11 = false;
  Gate gate = Gate::x_or_y;
};

// Greedy earliest-first coincidence matching across the three responses of
// one electrode. Throws ConfigError when coincidence >= separation.
std::vector<GateEvent> classify_events(const SpikeTrain& t01, const SpikeTrain& t10,
                                       const SpikeTrain& t11, const SpikeWindows& windows = {});

struct GateCounts {
  std::array<std::uint64_t, kGateCount> by_gate{};  // indexed by Gate
  std::uint64_t total() const;
  std::uint64_t operator[](Gate g) const { return by_gate[static_cast<std::size_t>(g)]; }
};

struct GateCensus {
  std::map<std::size_t, GateCounts> rows;  // by electrode
  GateCounts totals;
  // Frequencies in kRatioOrder; nullopt when no event was counted.
  std::optional<std::array<double, kGateCount>> ratios() const;
};

GateCensus census(std::span<const GateEvent> events);

// Table-style CSV: one row per electrode 0..electrode_count-1 (zero rows
// included), gates in kTableOrder, then a Total row.
std::string census_csv(const GateCensus& c, std::size_t electrode_count);

// {"order": [...], "ratios": [...] | null, "counts": [...], "total": n}
std::string ratio_report_json(const GateCensus& c, std::string_view substrate);

struct RatioSeries {
  std::string substrate;
  std::array<double, kGateCount> ratios{};
};

// Reads a ratio report (as written above, or hand-made for another substrate)
// for overlay. Needs "substrate", an "order" matching kRatioOrder labels and a
// non-null "ratios" array. Throws ParseError on malformed input.
RatioSeries parse_ratio_report(std::string_view json);

// --- mining driver ---------------------------------------------------------

struct InputPair {
  std::size_t x = 0;
  std::size_t y = 0;
};

struct SpikeMiningOptions {
  FhnParams params;
  SpikeWindows windows;
  double amplitude_threshold = 0.1;
  std::int64_t max_iterations = 400000;
  std::int64_t sample_every = 10;
  double quiescence_tolerance = 1e-3;
  unsigned threads = 1;
};

struct PairResult {
  InputPair pair;
  // Indexed [condition][electrode]; conditions ordered (01), (10), (11).
  std::array<std::vector<SpikeTrain>, 3> trains;
  std::vector<GateEvent> events;
};

// For each pair: three FHN runs with a TRUE pulse on y, on x, and on both;
// spikes on every electrode (inputs included) are classified into gates.
std::vector<PairResult> mine_spike_gates(const GridTemplate& t,
                                         std::span<const Electrode> electrodes,
                                         std::span<const InputPair> pairs,
                                         const SpikeMiningOptions& options);

// `count` electrodes on conductive nodes, spread by farthest-point sampling
// from a seed-chosen first site.
std::vector<Electrode> spread_electrodes(const GridTemplate& t, std::size_t count,
                                         std::uint64_t seed, double radius = 2.0);

// `count` distinct unordered pairs of distinct electrodes.
std::vector<InputPair> choose_input_pairs(std::size_t electrode_count, std::size_t count,
                                          std::uint64_t seed);

}  // namespace mycelogic
