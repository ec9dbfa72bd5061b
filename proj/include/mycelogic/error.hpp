#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mycelogic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Undecodable raster or malformed trace/sidecar file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class DegenerateTemplateError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A parsed or constructed value violates a domain invariant.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalBlowupError : public Error {
 public:
  NumericalBlowupError(std::int64_t iteration, std::size_t node)
      : Error("non-finite state at iteration " + std::to_string(iteration) +
              ", node " + std::to_string(node)),
        iteration_(iteration),
        node_(node) {}
  std::int64_t iteration() const { return iteration_; }
  std::size_t node() const { return node_; }

 private:
  std::int64_t iteration_;
  std::size_t node_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class IncompleteRecordingError : public Error {
 public:
  using Error::Error;
};

}  // namespace mycelogic
