#pragma once

#include <stdexcept>
#include <string>

namespace flock {

// Error taxonomy used across the library.  The kind decides the CLI exit
// code: validation -> 2, model -> 3, io -> 4.
enum class ErrorKind { validation, model, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad argument values, malformed configs, violated preconditions.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg)
      : Error(ErrorKind::validation, msg) {}
};

// Failures arising while evaluating or integrating a model.
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& msg)
      : Error(ErrorKind::model, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

// Two agents closer than the admissible minimum for a model whose right-hand
// side divides by their distance.  step >= 0 marks the integrator step at
// which the collision surfaced.
class CollisionError : public ModelError {
 public:
  CollisionError(int i, int j, double distance, long step = -1)
      : ModelError("collision: agents " + std::to_string(i) + " and " +
                   std::to_string(j) + " at distance " +
                   std::to_string(distance) +
                   (step >= 0 ? " (step " + std::to_string(step) + ")" : "")),
        i_(i), j_(j), distance_(distance), step_(step) {}
  int i() const { return i_; }
  int j() const { return j_; }
  double distance() const { return distance_; }
  long step() const { return step_; }

 private:
  int i_, j_;
  double distance_;
  long step_;
};

// Discrete step size too large for the current interaction degrees.
class StabilityError : public ModelError {
 public:
  StabilityError(int agent, double degree_sum, double h, long step = -1)
      : ModelError("unstable step: agent " + std::to_string(agent) +
                   " has h*degree = " + std::to_string(h * degree_sum) +
                   " >= 1 (degree sum " + std::to_string(degree_sum) + ")" +
                   (step >= 0 ? " (step " + std::to_string(step) + ")" : "")),
        agent_(agent), degree_sum_(degree_sum), step_(step) {}
  int agent() const { return agent_; }
  double degree_sum() const { return degree_sum_; }
  long step() const { return step_; }

 private:
  int agent_;
  double degree_sum_;
  long step_;
};

// Tabulated kernel whose tail cannot be bounded from the samples alone.
class IndeterminateTailError : public ValidationError {
 public:
  explicit IndeterminateTailError(const std::string& msg)
      : ValidationError(msg) {}
};

}  // namespace flock
