#pragma once

#include <stdexcept>
#include <string>

namespace influence {

// Unknown event or chain identifier.
class IdentifierError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Arguments outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An edge insertion that would close a directed cycle.
class CycleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An interval endpoint has no projection onto the requested chain.
class ProjectionIncompleteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integration requested at or through proper time zero.
class SingularTimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Receipt probability per emission exceeded one.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (poset files, CSV, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace influence
