#include "mycelogic/excitable.hpp"

#include <algorithm>
#include <cmath>

#include "mycelogic/error.hpp"

namespace mycelogic {

namespace {
constexpr double kFiniteBound = 1.0e300;
}  // namespace

void FhnParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("FHN dt must be > 0");
  if (!(dx > 0.0)) throw ConfigError("FHN dx must be > 0");
  if (!(du >= 0.0)) throw ConfigError("FHN Du must be >= 0");
  if (!(dt * du * 4.0 / (dx * dx) < 1.0))
    throw ConfigError("FHN explicit scheme unstable: dt*Du*4/dx^2 must be < 1");
  for (double c : {a, b, c1, c2}) {
    if (!std::isfinite(c)) throw ConfigError("FHN reaction constants must be finite");
  }
}

Stimulus true_pulse(const Electrode& e, std::int64_t start) {
  return Stimulus{e, start, 100, 0.5};
}

FhnModel::FhnModel(const GridTemplate& t, FhnParams params)
    : grid_(t), params_(params), node_of_cell_(t.mask().size(), -1) {
  params_.validate();
  cell_of_.reserve(t.conductive_count());
  for (std::size_t c = 0; c < t.mask().size(); ++c) {
    if (t.mask()[c]) {
      node_of_cell_[c] = static_cast<std::int64_t>(cell_of_.size());
      cell_of_.push_back(c);
    }
  }
  nbr_.resize(4 * cell_of_.size());
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (std::size_t i = 0; i < cell_of_.size(); ++i) {
    const GridPoint p = position(i);
    for (int d = 0; d < 4; ++d) {
      const std::int64_t n = node_at(p.x + dx[d], p.y + dy[d]);
      nbr_[4 * i + d] = static_cast<std::uint32_t>(n >= 0 ? n : static_cast<std::int64_t>(i));
    }
  }
}

std::int64_t FhnModel::node_at(int x, int y) const {
  if (!grid_.contains(x, y)) return -1;
  return node_of_cell_[grid_.index(x, y)];
}

GridPoint FhnModel::position(std::size_t node) const {
  const std::size_t c = cell_of_[node];
  const auto w = static_cast<std::size_t>(grid_.width());
  return {static_cast<int>(c % w), static_cast<int>(c / w)};
}

FhnState FhnModel::resting_state() const {
  FhnState s;
  s.u.assign(size(), 0.0);
  s.v.assign(size(), 0.0);
  s.u_next.assign(size(), 0.0);
  return s;
}

std::vector<std::size_t> FhnModel::disc_nodes(const Electrode& e) const {
  std::vector<std::size_t> out;
  for (const GridPoint& p : electrode_disc(e, grid_))
    out.push_back(static_cast<std::size_t>(node_at(p.x, p.y)));
  return out;
}

double FhnModel::potential(const FhnState& s, std::span<const std::size_t> disc) const {
  double p = 0.0;
  for (auto i : disc) p += s.u[i] - s.v[i];
  return p;
}

FhnModel::PreparedStimulus FhnModel::prepare(const StimulusPlan& stim) const {
  PreparedStimulus out;
  out.entries.reserve(stim.size());
  for (const auto& s : stim) {
    if (s.duration <= 0) throw ConfigError("stimulus duration must be > 0");
    if (!std::isfinite(s.amplitude)) throw ConfigError("stimulus amplitude must be finite");
    out.entries.push_back({s.start, s.start + s.duration, s.amplitude, disc_nodes(s.electrode)});
    out.last_end = std::max(out.last_end, s.start + s.duration);
  }
  return out;
}

void FhnModel::step(FhnState& s, const PreparedStimulus& stim) const {
  const std::size_t n = size();
  if (s.u.size() != n || s.v.size() != n)
    throw InvariantError("FHN state does not match the template");
  s.u_next.resize(n);

  const double a = params_.a;
  const double b = params_.b;
  const double c1 = params_.c1;
  const double c2 = params_.c2;
  const double dt = params_.dt;
  const double kd = params_.du / (params_.dx * params_.dx);

  const double* u = s.u.data();
  double* v = s.v.data();
  double* un = s.u_next.data();
  const std::uint32_t* nb = nbr_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double vi = v[i];
    const double lap = u[nb[4 * i]] + u[nb[4 * i + 1]] + u[nb[4 * i + 2]] + u[nb[4 * i + 3]] -
                       4.0 * ui;
    const double rate = c1 * ui * (ui - a) * (1.0 - ui) - c2 * ui * vi + kd * lap;
    un[i] = ui + dt * rate;
    v[i] = vi + dt * b * (ui - vi);
  }
  for (const auto& st : stim.entries) {
    if (s.t < st.start || s.t >= st.end) continue;
    for (auto i : st.nodes) un[i] += dt * st.amplitude;
  }
  // NaN fails both comparisons; kept as a separate branch-free pass so the
  // update loop above has no loop-carried dependency.
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i)
    finite &= (std::abs(un[i]) <= kFiniteBound) & (std::abs(v[i]) <= kFiniteBound);
  if (!finite) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(un[i]) || !std::isfinite(v[i]))
        throw NumericalBlowupError(s.t + 1, cell_of_[i]);
    }
  }
  s.u.swap(s.u_next);
  ++s.t;
}

FhnState step(const FhnState& state, const FhnParams& params, const StimulusPlan& stim,
              const GridTemplate& t) {
  const FhnModel model(t, params);
  FhnState next = state;
  model.step(next, stim);
  return next;
}

std::vector<PotentialTrace> run(const FhnModel& model, FhnState& state, const StimulusPlan& stim,
                                std::span<const Electrode> electrodes, const RunOptions& options) {
  if (options.iterations <= 0) throw ConfigError("iterations must be > 0");
  if (options.sample_every <= 0) throw ConfigError("sample-every must be > 0");
  const auto prepared = model.prepare(stim);
  std::vector<std::vector<std::size_t>> discs;
  std::vector<PotentialTrace> traces;
  for (std::size_t e = 0; e < electrodes.size(); ++e) {
    discs.push_back(model.disc_nodes(electrodes[e]));
    traces.push_back({e, {}});
    traces.back().samples.reserve(
        static_cast<std::size_t>(options.iterations / options.sample_every) + 1);
  }
  const std::int64_t stop = state.t + options.iterations;
  while (state.t < stop) {
    model.step(state, prepared);
    if (state.t % options.sample_every != 0) continue;
    for (std::size_t e = 0; e < discs.size(); ++e)
      traces[e].samples.push_back({state.t, model.potential(state, discs[e])});
    if (options.quiescence_tolerance > 0.0 && state.t >= prepared.last_end) {
      double peak = 0.0;
      for (double x : state.u) peak = std::max(peak, std::abs(x));
      if (peak < options.quiescence_tolerance) break;
    }
  }
  return traces;
}

std::vector<PotentialTrace> run(const GridTemplate& t, const FhnParams& params,
                                const StimulusPlan& stim, std::span<const Electrode> electrodes,
                                const RunOptions& options) {
  const FhnModel model(t, params);
  FhnState state = model.resting_state();
  return run(model, state, stim, electrodes, options);
}

std::vector<std::uint8_t> snapshot_pgm(const FhnModel& model, const FhnState& state) {
  GrayImage img;
  img.width = model.grid().width();
  img.height = model.grid().height();
  img.maxval = 255;
  img.pixels.assign(model.grid().mask().size(), 0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const GridPoint p = model.position(i);
    const double scaled = std::clamp((state.u[i] + 0.5) / 1.5, 0.0, 1.0);
    img.pixels[model.grid().index(p.x, p.y)] =
        static_cast<std::uint16_t>(std::lround(scaled * 255.0));
  }
  return encode_pgm(img);
}

}  // namespace mycelogic
