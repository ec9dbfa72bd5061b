#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mycelogic/excitable.hpp"
#include "mycelogic/rcnet.hpp"

namespace mycelogic {

// Inputs A, B, C, D; state index 8A + 4B + 2C + D. Bit s of a table is the
// output in state s.
inline constexpr int kStates = 16;

inline constexpr bool input_bit(int state, int input) {  // input 0 = A
  return ((state >> (3 - input)) & 1) != 0;
}

struct StateSchedule {
  double dwell = 10e-3;  // seconds per state
  double low = -5.0;     // logical 0
  double high = 5.0;     // logical 1
  double start = 0.0;

  void validate() const;
  double state_start(int s) const { return start + dwell * s; }
  double end() const { return state_start(kStates); }
  double level(int state, int input) const { return input_bit(state, input) ? high : low; }
  std::array<double, kStates + 1> boundaries() const;
};

struct ChannelRecording {
  int channel = 1;
  std::vector<double> times;
  std::vector<double> volts;
  // State s spans [boundaries[s], boundaries[s + 1]); the last interval
  // also includes its end point.
  std::array<double, kStates + 1> boundaries{};

  // Throws InvariantError for unsorted times, mismatched lengths, or samples
  // outside the schedule.
  void validate() const;
  double max_abs() const;
};

struct ThresholdBand {
  double low = -1.0;
  double high = 1.0;
};

struct TableProvenance {
  std::size_t repeat = 0;
  int channel = 0;
  std::size_t threshold = 0;
};

struct TruthTable16 {
  std::uint16_t bits = 0;
  TableProvenance from;

  bool operator()(int state) const { return ((bits >> state) & 1) != 0; }
};

// Bit s is 1 iff some sample of state s lies outside [low, high].
// ConfigError for low >= high, IncompleteRecordingError for an empty state.
TruthTable16 extract_table(const ChannelRecording& rec, const ThresholdBand& band);

using BandBuilder = std::function<std::vector<ThresholdBand>(const ChannelRecording&, std::size_t)>;

// n symmetric bands (-w_i, w_i), w_i linear from lo_frac to hi_frac of the
// recording's max |V|. A silent recording gets bands of width 1 V scaled
// the same way.
std::vector<ThresholdBand> linear_bands(const ChannelRecording& rec, std::size_t n,
                                        double lo_frac = 0.05, double hi_frac = 1.0);

std::vector<TruthTable16> threshold_sweep(const ChannelRecording& rec, std::size_t n,
                                          const BandBuilder& bands = {});

// All tables of all repeats: repeats x channels x n, provenance filled in.
std::vector<TruthTable16> mine_tables(std::span<const std::vector<ChannelRecording>> repeats,
                                      std::size_t n, const BandBuilder& bands = {},
                                      unsigned threads = 1);

// --- sum of products ---------------------------------------------------------

// Product of literals; bit 3 = A ... bit 0 = D. `care` selects the literals,
// `value` their polarity (1 = plain, 0 = negated).
struct ProductTerm {
  std::uint8_t care = 0;
  std::uint8_t value = 0;

  bool covers(int state) const { return ((state ^ value) & care) == 0; }
  int literals() const;
  auto operator<=>(const ProductTerm&) const = default;
};

struct SopExpression {
  std::vector<ProductTerm> terms;

  bool evaluate(int state) const;
  std::uint16_t table() const;
  // "A'B + CD'"; "0" for the empty sum, "1" for a single empty product.
  std::string str() const;
};

// Prime implicants, then essential primes plus a greedy cover. Always
// exact; minimal in most cases.
SopExpression sop(std::uint16_t table);

// --- census ------------------------------------------------------------------

struct FunctionCensus {
  std::map<std::uint16_t, std::uint64_t> histogram;
  std::uint64_t total = 0;

  std::size_t unique() const { return histogram.size(); }
};

FunctionCensus census_functions(std::span<const TruthTable16> tables);

// table_decimal,count
std::string function_census_csv(const FunctionCensus& c);

// Top-n functions by count (ties by value) with SOP strings.
std::string top_functions_json(const FunctionCensus& c, std::size_t n);

// --- recordings --------------------------------------------------------------

// time_s,ch1,...,chN. All recordings must share one time base.
std::string format_trace_csv(std::span<const ChannelRecording> channels);
// {"boundaries_s": [17 times]}
std::string format_boundaries_json(const std::array<double, kStates + 1>& b);

// Parses the CSV and the sidecar; channel ids come from the ch<k> headers.
// Throws ParseError or FormatError.
std::vector<ChannelRecording> load_recordings(std::string_view csv, std::string_view sidecar);

// --- synthetic drivers ---------------------------------------------------------

struct RcDriverOptions {
  RcBuildOptions build;
  std::size_t channels = 7;
  double ramp = 10e-6;  // level transition time
  TransientSettings transient{10e-6, 0.0};  // duration comes from the schedule
};

// Inputs A and B sit on the network's x and y sources, C and D on two more
// seed-chosen nodes; channels are further distinct nodes, read against
// ground. The circuit starts at rest and sees the schedule's levels at once.
std::vector<ChannelRecording> synth_rc_recordings(const ColonyGraph& g,
                                                  const StateSchedule& schedule,
                                                  const RcDriverOptions& options);

struct FhnDriverOptions {
  FhnParams params;
  std::int64_t dwell_iterations = 20000;
  std::int64_t sample_every = 10;
};

// Inputs at TRUE in a state receive a TRUE pulse at the start of that state;
// FALSE inputs are left alone. Time is measured in iterations and the
// channel value is the electrode potential.
std::vector<ChannelRecording> synth_fhn_recordings(const GridTemplate& t,
                                                   std::span<const Electrode> inputs,
                                                   std::span<const Electrode> channels,
                                                   const FhnDriverOptions& options);

}  // namespace mycelogic
