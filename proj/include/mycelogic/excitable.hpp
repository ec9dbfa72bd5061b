#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mycelogic/substrate.hpp"

namespace mycelogic {

// FitzHugh-Nagumo constants. Defaults reproduce the colony model:
// dt = 0.015, dx = 2, Du = 1, a = 0.13, b = 0.013, c1 = 0.26, c2 = 0.095.
struct FhnParams {
  double a = 0.13;
  double b = 0.013;
  double c1 = 0.26;
  double c2 = 0.095;
  double du = 1.0;
  double dt = 0.015;
  double dx = 2.0;

  // Throws ConfigError on dt <= 0, dx <= 0, Du < 0 or dt*Du*4/dx^2 >= 1.
  void validate() const;
};

struct Stimulus {
  Electrode electrode;
  std::int64_t start = 0;
  std::int64_t duration = 100;
  double amplitude = 0.5;
};

using StimulusPlan = std::vector<Stimulus>;

// Logical TRUE on a spike input: I = 0.5 for 100 iterations over the disc.
Stimulus true_pulse(const Electrode& e, std::int64_t start = 0);

// State on conductive nodes only, indexed in row-major order of the template.
struct FhnState {
  std::vector<double> u;
  std::vector<double> v;
  std::int64_t t = 0;
  // Scratch for the double-buffered u update; contents are meaningless.
  std::vector<double> u_next;
};

struct PotentialSample {
  std::int64_t iteration = 0;
  double p = 0.0;
};

struct PotentialTrace {
  std::size_t electrode = 0;
  std::vector<PotentialSample> samples;
};

// Compiled form of a template: compact conductive-node numbering and a
// 5-point neighbour table. Missing neighbours point back at the node itself,
// which gives the zero-flux boundary.
class FhnModel {
 public:
  FhnModel(const GridTemplate& t, FhnParams params);

  const GridTemplate& grid() const { return grid_; }
  const FhnParams& params() const { return params_; }
  std::size_t size() const { return cell_of_.size(); }
  // Compact index of a conductive grid node, or -1.
  std::int64_t node_at(int x, int y) const;
  GridPoint position(std::size_t node) const;

  FhnState resting_state() const;

  // Stimulus plan resolved to compact node lists.
  struct PreparedStimulus {
    struct Entry {
      std::int64_t start;
      std::int64_t end;
      double amplitude;
      std::vector<std::size_t> nodes;
    };
    std::vector<Entry> entries;
    std::int64_t last_end = 0;
  };
  PreparedStimulus prepare(const StimulusPlan& stim) const;

  // Advances one forward-Euler step in place. Throws NumericalBlowupError.
  void step(FhnState& s, const PreparedStimulus& stim) const;
  void step(FhnState& s, const StimulusPlan& stim) const { step(s, prepare(stim)); }

  // Σ (u - v) over conductive nodes inside the electrode disc.
  double potential(const FhnState& s, std::span<const std::size_t> disc) const;
  std::vector<std::size_t> disc_nodes(const Electrode& e) const;

 private:
  GridTemplate grid_;
  FhnParams params_;
  std::vector<std::size_t> cell_of_;
  std::vector<std::int64_t> node_of_cell_;
  std::vector<std::uint32_t> nbr_;  // 4 per node
};

// Pure-function form of a single update.
FhnState step(const FhnState& state, const FhnParams& params, const StimulusPlan& stim,
              const GridTemplate& t);

struct RunOptions {
  std::int64_t iterations = 1;
  std::int64_t sample_every = 1;
  // Stop early once every stimulus has ended and max |u| has fallen below
  // this level; traces then end at the last sample taken. 0 disables.
  double quiescence_tolerance = 0.0;
};

// Samples at iterations sample_every, 2*sample_every, ... <= iterations.
std::vector<PotentialTrace> run(const GridTemplate& t, const FhnParams& params,
                                const StimulusPlan& stim, std::span<const Electrode> electrodes,
                                const RunOptions& options);

// Same, on a prepared model and state; lets callers take snapshots between calls.
std::vector<PotentialTrace> run(const FhnModel& model, FhnState& state, const StimulusPlan& stim,
                                std::span<const Electrode> electrodes, const RunOptions& options);

// u mapped linearly from [-0.5, 1.0] onto [0, 255]; non-conductive nodes are 0.
std::vector<std::uint8_t> snapshot_pgm(const FhnModel& model, const FhnState& state);

}  // namespace mycelogic
