#include "mycelogic/funcmine.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"

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

std::string hex16(std::uint16_t v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", static_cast<unsigned>(v));
  return buf;
}

}  // namespace

void StateSchedule::validate() const {
  if (!(dwell > 0.0) || !std::isfinite(dwell)) throw ConfigError("state dwell must be > 0");
  if (!std::isfinite(low) || !std::isfinite(high)) throw ConfigError("logic levels must be finite");
  if (!std::isfinite(start)) throw ConfigError("schedule start must be finite");
}

std::array<double, kStates + 1> StateSchedule::boundaries() const {
  std::array<double, kStates + 1> b{};
  for (int s = 0; s <= kStates; ++s) b[static_cast<std::size_t>(s)] = state_start(s);
  return b;
}

void ChannelRecording::validate() const {
  if (times.size() != volts.size())
    throw InvariantError("channel " + std::to_string(channel) + ": times and voltages differ in length");
  for (std::size_t s = 1; s < boundaries.size(); ++s)
    if (!(boundaries[s] > boundaries[s - 1]))
      throw InvariantError("state boundaries must increase");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw InvariantError("channel " + std::to_string(channel) + ": sample times must increase");
    if (times[i] < boundaries.front() || times[i] > boundaries.back())
      throw InvariantError("channel " + std::to_string(channel) + ": sample at t=" +
                           g17(times[i]) + " lies outside the state schedule");
  }
}

double ChannelRecording::max_abs() const {
  double m = 0.0;
  for (double v : volts) m = std::max(m, std::abs(v));
  return m;
}

TruthTable16 extract_table(const ChannelRecording& rec, const ThresholdBand& band) {
  if (!(band.low < band.high)) throw ConfigError("threshold band needs low < high");
  rec.validate();
  TruthTable16 t;
  std::array<std::size_t, kStates> seen{};
  std::size_t s = 0;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    while (s + 1 < kStates && rec.times[i] >= rec.boundaries[s + 1]) ++s;
    ++seen[s];
    const double v = rec.volts[i];
    if (v < band.low || v > band.high) t.bits |= static_cast<std::uint16_t>(1u << s);
  }
  for (std::size_t k = 0; k < kStates; ++k)
    if (seen[k] == 0)
      throw IncompleteRecordingError("channel " + std::to_string(rec.channel) + ": state " +
                                     std::to_string(k) + " has no samples");
  return t;
}

std::vector<ThresholdBand> linear_bands(const ChannelRecording& rec, std::size_t n, double lo_frac,
                                        double hi_frac) {
  if (n == 0) throw ConfigError("threshold count must be >= 1");
  if (!(lo_frac > 0.0) || !(hi_frac >= lo_frac)) throw ConfigError("band fractions must satisfy 0 < lo <= hi");
  const double peak = rec.max_abs();
  const double scale = peak > 0.0 ? peak : 1.0;
  std::vector<ThresholdBand> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? lo_frac
                            : lo_frac + (hi_frac - lo_frac) * static_cast<double>(i) /
                                            static_cast<double>(n - 1);
    out[i] = {-f * scale, f * scale};
  }
  return out;
}

std::vector<TruthTable16> threshold_sweep(const ChannelRecording& rec, std::size_t n,
                                          const BandBuilder& bands) {
  if (n == 0) throw ConfigError("threshold count must be >= 1");
  const auto widths = bands ? bands(rec, n) : linear_bands(rec, n);
  if (widths.size() != n) throw InvariantError("band builder returned the wrong number of bands");
  std::vector<TruthTable16> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto t = extract_table(rec, widths[i]);
    t.from.channel = rec.channel;
    t.from.threshold = i;
    out.push_back(t);
  }
  return out;
}

std::vector<TruthTable16> mine_tables(std::span<const std::vector<ChannelRecording>> repeats,
                                      std::size_t n, const BandBuilder& bands, unsigned threads) {
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t r = 0; r < repeats.size(); ++r)
    for (std::size_t c = 0; c < repeats[r].size(); ++c) jobs.emplace_back(r, c);
  std::vector<std::vector<TruthTable16>> parts(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto [r, c] = jobs[j];
    parts[j] = threshold_sweep(repeats[r][c], n, bands);
    for (auto& t : parts[j]) t.from.repeat = r;
  });
  std::vector<TruthTable16> out;
  out.reserve(jobs.size() * n);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// --- sum of products -----------------------------------------------------------

int ProductTerm::literals() const { return std::popcount(static_cast<unsigned>(care)); }

bool SopExpression::evaluate(int state) const {
  return std::any_of(terms.begin(), terms.end(), [&](const ProductTerm& t) { return t.covers(state); });
}

std::uint16_t SopExpression::table() const {
  std::uint16_t bits = 0;
  for (int s = 0; s < kStates; ++s)
    if (evaluate(s)) bits |= static_cast<std::uint16_t>(1u << s);
  return bits;
}

std::string SopExpression::str() const {
  if (terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += " + ";
    const auto& t = terms[i];
    if (t.care == 0) {
      out += "1";
      continue;
    }
    for (int v = 0; v < 4; ++v) {
      const int bit = 3 - v;
      if (!((t.care >> bit) & 1)) continue;
      out += static_cast<char>('A' + v);
      if (!((t.value >> bit) & 1)) out += '\'';
    }
  }
  return out;
}

namespace {

std::uint16_t cube_mask(const ProductTerm& t) {
  std::uint16_t m = 0;
  for (int s = 0; s < kStates; ++s)
    if (t.covers(s)) m |= static_cast<std::uint16_t>(1u << s);
  return m;
}

// Canonical output order: fewer literals first, then A-heavy terms, plain
// before negated.
bool term_order(const ProductTerm& a, const ProductTerm& b) {
  if (a.literals() != b.literals()) return a.literals() < b.literals();
  if (a.care != b.care) return a.care > b.care;
  return a.value > b.value;
}

}  // namespace

SopExpression sop(std::uint16_t table) {
  SopExpression out;
  if (table == 0) return out;
  if (table == 0xFFFF) {
    out.terms.push_back({0, 0});
    return out;
  }
  // Every implicant over four variables: 3^4 cubes, kept if inside the ON set.
  struct Cube {
    ProductTerm term;
    std::uint16_t mask;
  };
  std::vector<Cube> implicants;
  for (unsigned care = 0; care < 16; ++care) {
    for (unsigned value = 0; value < 16; ++value) {
      if (value & ~care) continue;
      const ProductTerm t{static_cast<std::uint8_t>(care), static_cast<std::uint8_t>(value)};
      const auto m = cube_mask(t);
      if ((m & ~table) == 0) implicants.push_back({t, m});
    }
  }
  // Prime: not strictly contained in another implicant.
  std::vector<Cube> primes;
  for (const auto& c : implicants) {
    const bool contained = std::any_of(implicants.begin(), implicants.end(), [&](const Cube& o) {
      return o.mask != c.mask && (c.mask & ~o.mask) == 0;
    });
    if (!contained) primes.push_back(c);
  }
  std::sort(primes.begin(), primes.end(),
            [](const Cube& a, const Cube& b) { return term_order(a.term, b.term); });

  std::uint16_t uncovered = table;
  std::vector<char> chosen(primes.size(), 0);
  for (int s = 0; s < kStates; ++s) {
    if (!((table >> s) & 1)) continue;
    std::size_t count = 0, last = 0;
    for (std::size_t p = 0; p < primes.size(); ++p)
      if ((primes[p].mask >> s) & 1) {
        ++count;
        last = p;
      }
    if (count == 1 && !chosen[last]) {
      chosen[last] = 1;
      uncovered &= static_cast<std::uint16_t>(~primes[last].mask);
    }
  }
  while (uncovered) {
    std::size_t best = primes.size();
    int best_gain = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      if (chosen[p]) continue;
      const int gain = std::popcount(static_cast<unsigned>(primes[p].mask & uncovered));
      // primes are in term_order, so the first maximal gain is also the
      // cheapest among equals.
      if (gain > best_gain) {
        best_gain = gain;
        best = p;
      }
    }
    if (best == primes.size()) throw InvariantError("prime implicants fail to cover the table");
    chosen[best] = 1;
    uncovered &= static_cast<std::uint16_t>(~primes[best].mask);
  }
  for (std::size_t p = 0; p < primes.size(); ++p)
    if (chosen[p]) out.terms.push_back(primes[p].term);
  std::sort(out.terms.begin(), out.terms.end(), term_order);
  return out;
}

// --- census ------------------------------------------------------------------

FunctionCensus census_functions(std::span<const TruthTable16> tables) {
  FunctionCensus c;
  for (const auto& t : tables) ++c.histogram[t.bits];
  c.total = tables.size();
  return c;
}

std::string function_census_csv(const FunctionCensus& c) {
  std::string out = "table_decimal,count\n";
  for (const auto& [bits, n] : c.histogram) out += std::to_string(bits) + "," + std::to_string(n) + "\n";
  return out;
}

std::string top_functions_json(const FunctionCensus& c, std::size_t n) {
  std::vector<std::pair<std::uint16_t, std::uint64_t>> rows(c.histogram.begin(), c.histogram.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (rows.size() > n) rows.resize(n);
  nlohmann::ordered_json j;
  j["total_tables"] = c.total;
  j["unique_functions"] = c.unique();
  auto& top = j["top"] = nlohmann::ordered_json::array();
  for (const auto& [bits, count] : rows) {
    nlohmann::ordered_json e;
    e["table_decimal"] = bits;
    e["table_hex"] = hex16(bits);
    e["count"] = count;
    e["sop"] = sop(bits).str();
    e["trivial"] = bits == 0 || bits == 0xFFFF;
    top.push_back(e);
  }
  return j.dump(2) + "\n";
}

// --- recordings --------------------------------------------------------------

std::string format_trace_csv(std::span<const ChannelRecording> channels) {
  std::string out = "time_s";
  for (const auto& ch : channels) out += ",ch" + std::to_string(ch.channel);
  out += '\n';
  if (channels.empty()) return out;
  const auto& base = channels.front().times;
  for (const auto& ch : channels)
    if (ch.times != base || ch.volts.size() != base.size())
      throw InvariantError("channels must share one time base");
  for (std::size_t i = 0; i < base.size(); ++i) {
    out += g17(base[i]);
    for (const auto& ch : channels) out += "," + g17(ch.volts[i]);
    out += '\n';
  }
  return out;
}

std::string format_boundaries_json(const std::array<double, kStates + 1>& b) {
  nlohmann::ordered_json j;
  j["boundaries_s"] = b;
  return j.dump(2) + "\n";
}

namespace {

double parse_number(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
    throw ParseError(line, "not a finite number: '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

}  // namespace

std::vector<ChannelRecording> load_recordings(std::string_view csv, std::string_view sidecar) {
  std::array<double, kStates + 1> bounds{};
  try {
    const auto j = nlohmann::json::parse(sidecar);
    const auto& b = j.at("boundaries_s");
    if (!b.is_array() || b.size() != kStates + 1)
      throw FormatError("sidecar boundaries_s must list 17 times");
    for (std::size_t i = 0; i < bounds.size(); ++i) bounds[i] = b[i].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("sidecar JSON: ") + e.what());
  }

  std::vector<ChannelRecording> out;
  std::size_t line_no = 0;
  bool header = true;
  for (auto line : split(csv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (header) {
      if (fields.size() < 2 || fields[0] != "time_s")
        throw ParseError(line_no, "header must be time_s,ch1,...");
      for (std::size_t k = 1; k < fields.size(); ++k) {
        const auto f = fields[k];
        int id = 0;
        const auto [ptr, ec] = std::from_chars(f.data() + std::min<std::size_t>(2, f.size()),
                                               f.data() + f.size(), id);
        if (f.substr(0, 2) != "ch" || f.size() <= 2 || ec != std::errc() ||
            ptr != f.data() + f.size() || id < 1)
          throw ParseError(line_no, "bad channel header '" + std::string(f) + "'");
        ChannelRecording r;
        r.channel = id;
        r.boundaries = bounds;
        out.push_back(std::move(r));
      }
      header = false;
      continue;
    }
    if (fields.size() != out.size() + 1)
      throw ParseError(line_no, "expected " + std::to_string(out.size() + 1) + " fields");
    const double t = parse_number(fields[0], line_no);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k].times.push_back(t);
      out[k].volts.push_back(parse_number(fields[k + 1], line_no));
    }
  }
  if (header) throw FormatError("trace CSV is empty");
  for (const auto& r : out) r.validate();
  return out;
}

// --- synthetic drivers ---------------------------------------------------------

std::vector<ChannelRecording> synth_rc_recordings(const ColonyGraph& g,
                                                  const StateSchedule& schedule,
                                                  const RcDriverOptions& options) {
  schedule.validate();
  if (options.channels < 1) throw ConfigError("need at least one channel");
  if (!(options.ramp > 0.0) || !(options.ramp < schedule.dwell))
    throw ConfigError("level ramp must be > 0 and shorter than the dwell");
  const RcNetwork net = build_rc(g, options.build);
  auto probes = net.probes();
  if (probes.size() < 2 + options.channels)
    throw TopologyError("network too small for 4 inputs and " + std::to_string(options.channels) +
                        " channels");
  // Partial Fisher-Yates for the extra inputs and the channels.
  Rng rng(derive_seed(options.build.seed, "rc-driver"));
  const std::size_t need = 2 + options.channels;
  for (std::size_t i = 0; i < need; ++i) std::swap(probes[i], probes[i + rng.index(probes.size() - i)]);

  Circuit c = rc_circuit(net);
  c.sources.push_back({circuit_node(net, probes[0])});
  c.sources.push_back({circuit_node(net, probes[1])});
  std::vector<Waveform> waves;
  for (int input = 0; input < 4; ++input) {
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(schedule.state_start(0), schedule.level(0, input));
    for (int s = 1; s < kStates; ++s) {
      const double prev = schedule.level(s - 1, input);
      const double next = schedule.level(s, input);
      if (prev == next) continue;
      pts.emplace_back(schedule.state_start(s), prev);
      pts.emplace_back(schedule.state_start(s) + options.ramp, next);
    }
    waves.push_back(Waveform::piecewise(std::move(pts)));
  }
  const TransientSolver solver(std::move(c), options.transient.dt);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < options.channels; ++k) nodes.push_back(circuit_node(net, probes[2 + k]));
  const double span = schedule.end() - schedule.start;
  auto traces = record_probes(solver, waves, span, nodes);

  std::vector<ChannelRecording> out(options.channels);
  const auto bounds = schedule.boundaries();
  for (std::size_t k = 0; k < options.channels; ++k) {
    auto& r = out[k];
    r.channel = static_cast<int>(k + 1);
    r.boundaries = bounds;
    for (std::size_t i = 0; i < traces.times.size(); ++i) {
      const double t = schedule.start + traces.times[i];
      if (t > bounds.back()) break;
      r.times.push_back(t);
      r.volts.push_back(traces.voltages[k][i]);
    }
  }
  return out;
}

std::vector<ChannelRecording> synth_fhn_recordings(const GridTemplate& t,
                                                   std::span<const Electrode> inputs,
                                                   std::span<const Electrode> channels,
                                                   const FhnDriverOptions& options) {
  if (inputs.size() != 4) throw ConfigError("the FHN driver needs exactly 4 input electrodes");
  if (channels.empty()) throw ConfigError("need at least one channel");
  if (options.dwell_iterations <= 0 || options.sample_every <= 0 ||
      options.dwell_iterations % options.sample_every != 0)
    throw ConfigError("dwell must be a positive multiple of the sampling interval");
  StimulusPlan plan;
  for (int s = 0; s < kStates; ++s)
    for (int input = 0; input < 4; ++input)
      if (input_bit(s, input)) plan.push_back(true_pulse(inputs[static_cast<std::size_t>(input)], s * options.dwell_iterations));
  RunOptions run_options;
  run_options.iterations = kStates * options.dwell_iterations;
  run_options.sample_every = options.sample_every;
  run_options.quiescence_tolerance = 0.0;
  const auto traces = run(t, options.params, plan, channels, run_options);

  std::vector<ChannelRecording> out(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    auto& r = out[k];
    r.channel = static_cast<int>(k + 1);
    for (int s = 0; s <= kStates; ++s)
      r.boundaries[static_cast<std::size_t>(s)] = static_cast<double>(s * options.dwell_iterations);
    for (const auto& sample : traces[k].samples) {
      r.times.push_back(static_cast<double>(sample.iteration));
      r.volts.push_back(sample.p);
    }
  }
  return out;
}

}  // namespace mycelogic
