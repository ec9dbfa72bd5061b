#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mycelogic {

// SPICE-style trapezoid pulse. Before `delay` and after `count` periods the
// level is 0; each period rises over `rise`, holds `width`, falls over `fall`.
struct PulseSpec {
  double amplitude = 0.06;
  double delay = 0.0;
  double rise = 10e-6;
  double fall = 10e-6;
  double width = 1e-3;
  double period = 2e-3;
  int count = 2;

  void validate() const;
  double at(double t) const;
};

// Source waveform: constant zero, a pulse train, an ideal step, or
// piecewise-linear breakpoints (time, value) held flat after the last one.
class Waveform {
 public:
  static Waveform zero();
  static Waveform pulse(const PulseSpec& p);
  static Waveform step(double amplitude, double at = 0.0);
  static Waveform piecewise(std::vector<std::pair<double, double>> points);

  double at(double t) const;
  bool is_zero() const { return kind_ == Kind::zero; }

 private:
  enum class Kind { zero, pulse, step, piecewise };
  Kind kind_ = Kind::zero;
  PulseSpec pulse_{};
  double step_amplitude_ = 0.0;
  double step_at_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

// Linear circuit over nodes 0..node_count-1; node 0 is the reference.
struct Circuit {
  struct Resistor {
    std::size_t a, b;
    double ohms;
  };
  struct Capacitor {
    std::size_t a, b;
    double farads;
  };
  // Ideal source from `node` to the reference.
  struct Source {
    std::size_t node;
  };

  std::size_t node_count = 1;
  std::vector<Resistor> resistors;
  std::vector<Capacitor> capacitors;
  std::vector<Source> sources;
  std::vector<std::string> node_names;  // optional, for diagnostics

  std::string name_of(std::size_t node) const;
};

struct TransientStep {
  double time;
  const std::vector<double>& voltages;  // all nodes, reference included
};

struct TransientStats {
  std::size_t steps = 0;
  double max_branch_current = 0.0;
  // Largest |sum of currents into a non-source node| over all steps, divided
  // by max_branch_current.
  double max_kcl_residual = 0.0;
};

// Modified nodal analysis with backward-Euler capacitor companions. Source
// nodes have known voltages and are eliminated, leaving a symmetric positive
// definite system over the remaining nodes. The matrix depends only on dt, so
// it is factored once at construction and reused for every run and every
// input condition.
class TransientSolver {
 public:
  // Throws TopologyError naming nodes with no element path to the reference
  // or to a source, or when factorization fails.
  TransientSolver(Circuit circuit, double dt);
  ~TransientSolver();
  TransientSolver(TransientSolver&&) noexcept;
  TransientSolver& operator=(TransientSolver&&) noexcept;

  const Circuit& circuit() const { return circuit_; }
  double dt() const { return dt_; }

  // Steps from the all-zero state at t = 0 up to t >= duration. `sources`
  // holds one waveform per circuit source. The visitor sees every accepted
  // step (t = dt, 2 dt, ...).
  TransientStats run(const std::vector<Waveform>& sources, double duration,
                     const std::function<void(const TransientStep&)>& visit,
                     bool check_kcl = true) const;

 private:
  struct Factorization;
  Circuit circuit_;
  double dt_;
  std::unique_ptr<Factorization> lu_;
};

struct ProbeTraces {
  std::vector<double> times;
  std::vector<std::size_t> probes;
  std::vector<std::vector<double>> voltages;  // [probe][step]
  TransientStats stats;
};

ProbeTraces record_probes(const TransientSolver& solver, const std::vector<Waveform>& sources,
                          double duration, const std::vector<std::size_t>& probes);

}  // namespace mycelogic
