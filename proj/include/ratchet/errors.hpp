#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ratchet {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

// Raised when an operation sees an axis in the wrong representation.
class RepresentationError : public Error {
 public:
  using Error::Error;
};

class GridConventionError : public Error {
 public:
  using Error::Error;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

class SeriesTooShort : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Probability leaked into the outermost momentum band above the guard level.
class TruncationError : public Error {
 public:
  TruncationError(std::size_t sample, std::size_t step, double population)
      : Error("truncation guard tripped: sample " + std::to_string(sample) +
              ", step " + std::to_string(step) + ", edge population " +
              std::to_string(population)),
        sample_(sample),
        step_(step),
        population_(population) {}

  std::size_t sample() const { return sample_; }
  std::size_t step() const { return step_; }
  double population() const { return population_; }

 private:
  std::size_t sample_;
  std::size_t step_;
  double population_;
};

}  // namespace ratchet
