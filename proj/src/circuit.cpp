#include "mycelogic/circuit.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mycelogic/error.hpp"

namespace mycelogic {

void PulseSpec::validate() const {
  if (!std::isfinite(amplitude)) throw ConfigError("pulse amplitude must be finite");
  if (!(width > 0.0)) throw ConfigError("pulse width must be > 0");
  if (!(rise >= 0.0) || !(fall >= 0.0)) throw ConfigError("pulse rise/fall must be >= 0");
  if (!(delay >= 0.0)) throw ConfigError("pulse delay must be >= 0");
  if (count < 1) throw ConfigError("pulse count must be >= 1");
  if (!(period >= rise + width + fall))
    throw ConfigError("pulse period must cover rise + width + fall");
}

double PulseSpec::at(double t) const {
  const double local = t - delay;
  if (local < 0.0) return 0.0;
  const double k = std::floor(local / period);
  if (k >= count) return 0.0;
  const double tau = local - k * period;
  if (tau < rise) return amplitude * tau / rise;
  if (tau <= rise + width) return amplitude;
  if (tau < rise + width + fall) return amplitude * (1.0 - (tau - rise - width) / fall);
  return 0.0;
}

Waveform Waveform::zero() { return {}; }

Waveform Waveform::pulse(const PulseSpec& p) {
  p.validate();
  Waveform w;
  w.kind_ = Kind::pulse;
  w.pulse_ = p;
  return w;
}

Waveform Waveform::step(double amplitude, double at) {
  if (!std::isfinite(amplitude) || !std::isfinite(at))
    throw ConfigError("step amplitude and time must be finite");
  Waveform w;
  w.kind_ = Kind::step;
  w.step_amplitude_ = amplitude;
  w.step_at_ = at;
  return w;
}

Waveform Waveform::piecewise(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw ConfigError("piecewise waveform needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
      throw ConfigError("piecewise waveform points must be finite");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw ConfigError("piecewise waveform times must increase");
  }
  Waveform w;
  w.kind_ = Kind::piecewise;
  w.points_ = std::move(points);
  return w;
}

double Waveform::at(double t) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::pulse: return pulse_.at(t);
    case Kind::step: return t >= step_at_ ? step_amplitude_ : 0.0;
    case Kind::piecewise: {
      if (t <= points_.front().first) return points_.front().second;
      if (t >= points_.back().first) return points_.back().second;
      const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                       [](double v, const auto& p) { return v < p.first; });
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

std::string Circuit::name_of(std::size_t node) const {
  if (node < node_names.size() && !node_names[node].empty()) return node_names[node];
  return std::to_string(node);
}

struct TransientSolver::Factorization {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  std::vector<std::ptrdiff_t> unknown;  // node -> unknown index, -1 if known
  std::vector<std::size_t> free_nodes;  // unknown index -> node
};

namespace {

void check_circuit(const Circuit& c) {
  if (c.node_count < 1) throw TopologyError("circuit needs a reference node");
  auto check_node = [&](std::size_t n) {
    if (n >= c.node_count) throw TopologyError("element references unknown node " + std::to_string(n));
  };
  for (const auto& r : c.resistors) {
    check_node(r.a);
    check_node(r.b);
    if (!(r.ohms > 0.0) || !std::isfinite(r.ohms))
      throw TopologyError("resistor between " + c.name_of(r.a) + " and " + c.name_of(r.b) +
                          " must have positive finite resistance");
  }
  for (const auto& cap : c.capacitors) {
    check_node(cap.a);
    check_node(cap.b);
    if (!(cap.farads > 0.0) || !std::isfinite(cap.farads))
      throw TopologyError("capacitor between " + c.name_of(cap.a) + " and " + c.name_of(cap.b) +
                          " must have positive finite capacitance");
  }
  std::vector<char> driven(c.node_count, 0);
  for (const auto& s : c.sources) {
    check_node(s.node);
    if (s.node == 0) throw TopologyError("source cannot drive the reference node");
    if (driven[s.node]) throw TopologyError("two sources drive node " + c.name_of(s.node));
    driven[s.node] = 1;
  }
}

// Nodes with no element path to the reference or a source node.
std::vector<std::size_t> floating_nodes(const Circuit& c) {
  std::vector<std::size_t> parent(c.node_count);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
  for (const auto& r : c.resistors) join(r.a, r.b);
  for (const auto& cap : c.capacitors) join(cap.a, cap.b);
  std::vector<char> anchored(c.node_count, 0);
  anchored[find(0)] = 1;
  for (const auto& s : c.sources) anchored[find(s.node)] = 1;
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < c.node_count; ++n)
    if (!anchored[find(n)]) out.push_back(n);
  return out;
}

}  // namespace

TransientSolver::TransientSolver(Circuit circuit, double dt)
    : circuit_(std::move(circuit)), dt_(dt), lu_(std::make_unique<Factorization>()) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw ConfigError("transient dt must be > 0");
  check_circuit(circuit_);
  if (const auto lost = floating_nodes(circuit_); !lost.empty()) {
    std::string names;
    for (std::size_t i = 0; i < lost.size(); ++i) {
      if (i == 8) {
        names += ", ... (" + std::to_string(lost.size()) + " total)";
        break;
      }
      names += (i ? ", " : "") + circuit_.name_of(lost[i]);
    }
    throw TopologyError("floating subnetwork, no path to ground or a source: " + names);
  }

  auto& f = *lu_;
  f.unknown.assign(circuit_.node_count, -1);
  std::vector<char> known(circuit_.node_count, 0);
  known[0] = 1;
  for (const auto& s : circuit_.sources) known[s.node] = 1;
  for (std::size_t n = 0; n < circuit_.node_count; ++n) {
    if (known[n]) continue;
    f.unknown[n] = static_cast<std::ptrdiff_t>(f.free_nodes.size());
    f.free_nodes.push_back(n);
  }
  const auto m = static_cast<Eigen::Index>(f.free_nodes.size());
  if (m == 0) return;

  std::vector<Eigen::Triplet<double>> triplets;
  auto stamp = [&](std::size_t a, std::size_t b, double g) {
    const auto ia = f.unknown[a];
    const auto ib = f.unknown[b];
    if (ia >= 0) triplets.emplace_back(ia, ia, g);
    if (ib >= 0) triplets.emplace_back(ib, ib, g);
    if (ia >= 0 && ib >= 0) {
      triplets.emplace_back(ia, ib, -g);
      triplets.emplace_back(ib, ia, -g);
    }
  };
  for (const auto& r : circuit_.resistors) stamp(r.a, r.b, 1.0 / r.ohms);
  for (const auto& c : circuit_.capacitors) stamp(c.a, c.b, c.farads / dt_);
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(triplets.begin(), triplets.end());
  f.ldlt.compute(a);
  if (f.ldlt.info() != Eigen::Success)
    throw TopologyError("circuit matrix is singular; check for isolated subnetworks");
}

TransientSolver::~TransientSolver() = default;
TransientSolver::TransientSolver(TransientSolver&&) noexcept = default;
TransientSolver& TransientSolver::operator=(TransientSolver&&) noexcept = default;

TransientStats TransientSolver::run(const std::vector<Waveform>& sources, double duration,
                                    const std::function<void(const TransientStep&)>& visit,
                                    bool check_kcl) const {
  if (sources.size() != circuit_.sources.size())
    throw ConfigError("expected " + std::to_string(circuit_.sources.size()) +
                      " source waveforms, got " + std::to_string(sources.size()));
  if (!(duration >= dt_)) throw ConfigError("transient length must be >= dt");
  const auto& f = *lu_;
  const std::size_t n = circuit_.node_count;
  const auto m = static_cast<Eigen::Index>(f.free_nodes.size());
  std::vector<double> v(n, 0.0);
  std::vector<double> prev(n, 0.0);
  std::vector<double> residual(check_kcl ? n : 0, 0.0);
  Eigen::VectorXd rhs(m);
  Eigen::VectorXd x(m);
  const double inv_dt = 1.0 / dt_;

  TransientStats stats;
  double worst_residual = 0.0;
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt_ - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt_;
    prev.swap(v);
    for (std::size_t s = 0; s < sources.size(); ++s) v[circuit_.sources[s].node] = sources[s].at(t);

    if (m > 0) {
      rhs.setZero();
      // Known-voltage neighbours move to the right-hand side; capacitors add
      // their companion current from the previous step.
      for (const auto& r : circuit_.resistors) {
        const double g = 1.0 / r.ohms;
        const auto ia = f.unknown[r.a];
        const auto ib = f.unknown[r.b];
        if (ia >= 0 && ib < 0) rhs[ia] += g * v[r.b];
        if (ib >= 0 && ia < 0) rhs[ib] += g * v[r.a];
      }
      for (const auto& c : circuit_.capacitors) {
        const double g = c.farads * inv_dt;
        const auto ia = f.unknown[c.a];
        const auto ib = f.unknown[c.b];
        const double hist = g * (prev[c.a] - prev[c.b]);
        if (ia >= 0) {
          rhs[ia] += hist;
          if (ib < 0) rhs[ia] += g * v[c.b];
        }
        if (ib >= 0) {
          rhs[ib] -= hist;
          if (ia < 0) rhs[ib] += g * v[c.a];
        }
      }
      x = f.ldlt.solve(rhs);
      for (Eigen::Index i = 0; i < m; ++i) v[f.free_nodes[static_cast<std::size_t>(i)]] = x[i];
    }

    if (check_kcl) {
      std::fill(residual.begin(), residual.end(), 0.0);
      double peak = 0.0;
      for (const auto& r : circuit_.resistors) {
        const double i = (v[r.a] - v[r.b]) / r.ohms;
        residual[r.a] -= i;
        residual[r.b] += i;
        peak = std::max(peak, std::abs(i));
      }
      for (const auto& c : circuit_.capacitors) {
        const double i = c.farads * inv_dt * ((v[c.a] - v[c.b]) - (prev[c.a] - prev[c.b]));
        residual[c.a] -= i;
        residual[c.b] += i;
        peak = std::max(peak, std::abs(i));
      }
      stats.max_branch_current = std::max(stats.max_branch_current, peak);
      for (auto node : f.free_nodes) worst_residual = std::max(worst_residual, std::abs(residual[node]));
    }
    ++stats.steps;
    if (visit) visit(TransientStep{t, v});
  }
  // Decaying tails reach subnormal magnitudes where a per-step ratio is pure
  // rounding noise, so the scale is the largest current of the whole run.
  if (stats.max_branch_current > 0.0) stats.max_kcl_residual = worst_residual / stats.max_branch_current;
  return stats;
}

ProbeTraces record_probes(const TransientSolver& solver, const std::vector<Waveform>& sources,
                          double duration, const std::vector<std::size_t>& probes) {
  for (auto p : probes)
    if (p >= solver.circuit().node_count) throw ConfigError("probe node out of range");
  ProbeTraces out;
  out.probes = probes;
  out.voltages.resize(probes.size());
  out.stats = solver.run(sources, duration, [&](const TransientStep& s) {
    out.times.push_back(s.time);
    for (std::size_t i = 0; i < probes.size(); ++i) out.voltages[i].push_back(s.voltages[probes[i]]);
  });
  return out;
}

}  // namespace mycelogic
