#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vct {

class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// a state coordinate left the representable range mid-integration
class NumericalBlowupError : public SimulationError {
public:
  NumericalBlowupError(double t, std::size_t state_index)
      : SimulationError("non-finite state coordinate " +
                        std::to_string(state_index) + " at t = " +
                        std::to_string(t) + " min"),
        t_(t), state_index_(state_index) {}

  double time() const { return t_; }
  std::size_t state_index() const { return state_index_; }

private:
  double t_;
  std::size_t state_index_;
};

// basal root finding failed (no sign change / residual too large)
class SteadyStateError : public SimulationError {
public:
  using SimulationError::SimulationError;
};

// derived parameters are infeasible for the sampled raw values
class DerivationError : public SimulationError {
public:
  using SimulationError::SimulationError;
};

// rejection sampling hit the attempt cap without an accepted draw
class ExhaustionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vct
