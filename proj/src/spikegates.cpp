#include "mycelogic/spikegates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

#include "mycelogic/error.hpp"
#include "mycelogic/parallel.hpp"
#include "mycelogic/rng.hpp"

namespace mycelogic {

std::string_view gate_label(Gate g) {
  switch (g) {
    case Gate::x_or_y: return "x+y";
    case Gate::select_y: return "Sy";
    case Gate::x_xor_y: return "x^y";
    case Gate::select_x: return "Sx";
    case Gate::notx_and_y: return "!x.y";
    case Gate::x_and_noty: return "x.!y";
    case Gate::x_and_y: return "x.y";
  }
  return "?";
}

std::optional<Gate> gate_from_outputs(bool o01, bool o10, bool o11) {
  const int key = (o01 ? 4 : 0) | (o10 ? 2 : 0) | (o11 ? 1 : 0);
  switch (key) {
    case 0b111: return Gate::x_or_y;
    case 0b101: return Gate::select_y;
    case 0b110: return Gate::x_xor_y;
    case 0b011: return Gate::select_x;
    case 0b100: return Gate::notx_and_y;
    case 0b010: return Gate::x_and_noty;
    case 0b001: return Gate::x_and_y;
    default: return std::nullopt;
  }
}

SpikeTrain detect_spikes(const PotentialTrace& trace, double amp_threshold,
                         std::int64_t separation) {
  if (separation <= 0) throw ConfigError("spike separation window must be > 0");
  SpikeTrain out{trace.electrode, {}};
  bool above = false;
  std::int64_t last_above = 0;
  for (const auto& s : trace.samples) {
    const bool now = s.p >= amp_threshold;
    if (now && !above) {
      if (out.onsets.empty() || s.iteration - last_above > separation)
        out.onsets.push_back(s.iteration);
    }
    if (now) last_above = s.iteration;
    above = now;
  }
  return out;
}

std::vector<GateEvent> classify_events(const SpikeTrain& t01, const SpikeTrain& t10,
                                       const SpikeTrain& t11, const SpikeWindows& windows) {
  if (windows.coincidence >= windows.separation)
    throw ConfigError("coincidence window must be shorter than the separation window");
  const std::array<const std::vector<std::int64_t>*, 3> trains = {&t01.onsets, &t10.onsets,
                                                                   &t11.onsets};
  std::array<std::size_t, 3> cursor{0, 0, 0};
  std::vector<GateEvent> events;
  for (;;) {
    // Earliest unconsumed spike anchors the next event; ties go to the
    // lower condition index, which does not change the resulting triple.
    int anchor = -1;
    for (int c = 0; c < 3; ++c) {
      if (cursor[c] >= trains[c]->size()) continue;
      if (anchor < 0 || (*trains[c])[cursor[c]] < (*trains[anchor])[cursor[anchor]]) anchor = c;
    }
    if (anchor < 0) break;
    const std::int64_t t0 = (*trains[anchor])[cursor[anchor]];
    std::array<bool, 3> hit{false, false, false};
    for (int c = 0; c < 3; ++c) {
      if (cursor[c] >= trains[c]->size()) continue;
      // Every unconsumed spike is >= t0, so within-window candidates are
      // also pairwise within the window.
      if ((*trains[c])[cursor[c]] - t0 < windows.coincidence) {
        hit[c] = true;
        ++cursor[c];
      }
    }
    GateEvent e;
    e.electrode = t11.electrode;
    e.time = t0;
    e.o01 = hit[0];
    e.o10 = hit[1];
    e.o11 = hit[2];
    e.gate = *gate_from_outputs(e.o01, e.o10, e.o11);
    events.push_back(e);
  }
  return events;
}

std::uint64_t GateCounts::total() const {
  std::uint64_t t = 0;
  for (auto c : by_gate) t += c;
  return t;
}

std::optional<std::array<double, kGateCount>> GateCensus::ratios() const {
  const auto total = totals.total();
  if (total == 0) return std::nullopt;
  std::array<double, kGateCount> r{};
  for (std::size_t i = 0; i < kGateCount; ++i)
    r[i] = static_cast<double>(totals[kRatioOrder[i]]) / static_cast<double>(total);
  return r;
}

GateCensus census(std::span<const GateEvent> events) {
  GateCensus c;
  for (const auto& e : events) {
    const auto g = static_cast<std::size_t>(e.gate);
    ++c.rows[e.electrode].by_gate[g];
    ++c.totals.by_gate[g];
  }
  return c;
}

std::string census_csv(const GateCensus& c, std::size_t electrode_count) {
  std::string out = "E";
  for (Gate g : kTableOrder) {
    out += ',';
    out += gate_label(g);
  }
  out += ",Total\n";
  auto row = [&](const std::string& name, const GateCounts& counts) {
    out += name;
    for (Gate g : kTableOrder) out += "," + std::to_string(counts[g]);
    out += "," + std::to_string(counts.total()) + "\n";
  };
  std::size_t rows = electrode_count;
  if (!c.rows.empty()) rows = std::max(rows, c.rows.rbegin()->first + 1);
  for (std::size_t e = 0; e < rows; ++e) {
    const auto it = c.rows.find(e);
    row(std::to_string(e), it == c.rows.end() ? GateCounts{} : it->second);
  }
  row("Total", c.totals);
  return out;
}

std::string ratio_report_json(const GateCensus& c, std::string_view substrate) {
  nlohmann::ordered_json j;
  j["substrate"] = std::string(substrate);
  auto order = nlohmann::ordered_json::array();
  auto counts = nlohmann::ordered_json::array();
  for (Gate g : kRatioOrder) {
    order.push_back(std::string(gate_label(g)));
    counts.push_back(c.totals[g]);
  }
  j["order"] = std::move(order);
  j["counts"] = std::move(counts);
  j["total"] = c.totals.total();
  if (const auto r = c.ratios()) j["ratios"] = *r;
  else j["ratios"] = nullptr;
  return j.dump(2) + "\n";
}

RatioSeries parse_ratio_report(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("ratio report: ") + e.what());
  }
  RatioSeries out;
  try {
    out.substrate = j.at("substrate").get<std::string>();
    const auto& order = j.at("order");
    const auto& ratios = j.at("ratios");
    if (!order.is_array() || order.size() != kGateCount || !ratios.is_array() || ratios.size() != kGateCount)
      throw ParseError(0, "ratio report: order and ratios need " + std::to_string(kGateCount) + " entries");
    for (std::size_t i = 0; i < kGateCount; ++i) {
      if (order[i].get<std::string>() != gate_label(kRatioOrder[i]))
        throw ParseError(0, "ratio report: gate order differs at position " + std::to_string(i));
      out.ratios[i] = ratios[i].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("ratio report: ") + e.what());
  }
  return out;
}

std::vector<PairResult> mine_spike_gates(const GridTemplate& t,
                                         std::span<const Electrode> electrodes,
                                         std::span<const InputPair> pairs,
                                         const SpikeMiningOptions& options) {
  if (options.windows.coincidence >= options.windows.separation)
    throw ConfigError("coincidence window must be shorter than the separation window");
  for (const auto& p : pairs) {
    if (p.x >= electrodes.size() || p.y >= electrodes.size() || p.x == p.y)
      throw ConfigError("input pair must name two distinct electrodes");
  }
  const FhnModel model(t, options.params);
  RunOptions run_options;
  run_options.iterations = options.max_iterations;
  run_options.sample_every = options.sample_every;
  run_options.quiescence_tolerance = options.quiescence_tolerance;

  std::vector<PairResult> results(pairs.size());
  // One job per (pair, condition).
  parallel_for(pairs.size() * 3, options.threads, [&](std::size_t job) {
    const std::size_t p = job / 3;
    const std::size_t condition = job % 3;
    const auto& pair = pairs[p];
    StimulusPlan plan;
    if (condition == 0 || condition == 2) plan.push_back(true_pulse(electrodes[pair.y]));
    if (condition == 1 || condition == 2) plan.push_back(true_pulse(electrodes[pair.x]));
    FhnState state = model.resting_state();
    const auto traces = run(model, state, plan, electrodes, run_options);
    auto& trains = results[p].trains[condition];
    trains.reserve(traces.size());
    for (const auto& tr : traces)
      trains.push_back(detect_spikes(tr, options.amplitude_threshold, options.windows.separation));
  });
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto& r = results[p];
    r.pair = pairs[p];
    for (std::size_t e = 0; e < electrodes.size(); ++e) {
      auto ev = classify_events(r.trains[0][e], r.trains[1][e], r.trains[2][e], options.windows);
      r.events.insert(r.events.end(), ev.begin(), ev.end());
    }
  }
  return results;
}

std::vector<Electrode> spread_electrodes(const GridTemplate& t, std::size_t count,
                                         std::uint64_t seed, double radius) {
  std::vector<GridPoint> sites;
  for (int y = 0; y < t.height(); ++y)
    for (int x = 0; x < t.width(); ++x)
      if (t.conductive(x, y)) sites.push_back({x, y});
  if (count > sites.size())
    throw ConfigError("more electrodes requested than conductive nodes");
  std::vector<Electrode> out;
  if (count == 0) return out;
  Rng rng(seed);
  std::vector<double> nearest(sites.size(), std::numeric_limits<double>::infinity());
  std::size_t pick = rng.index(sites.size());
  for (;;) {
    out.push_back(Electrode{sites[pick], radius});
    if (out.size() == count) break;
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const double dx = sites[i].x - sites[pick].x;
      const double dy = sites[i].y - sites[pick].y;
      nearest[i] = std::min(nearest[i], dx * dx + dy * dy);
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    pick = best;
  }
  return out;
}

std::vector<InputPair> choose_input_pairs(std::size_t electrode_count, std::size_t count,
                                          std::uint64_t seed) {
  const std::size_t possible = electrode_count * (electrode_count - 1) / 2;
  if (electrode_count < 2 || count > possible)
    throw ConfigError("not enough electrodes for the requested input pairs");
  Rng rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> used;
  std::vector<InputPair> out;
  while (out.size() < count) {
    const std::size_t a = rng.index(electrode_count);
    const std::size_t b = rng.index(electrode_count);
    if (a == b || !used.emplace(std::min(a, b), std::max(a, b)).second) continue;
    out.push_back({a, b});
  }
  return out;
}

}  // namespace mycelogic
