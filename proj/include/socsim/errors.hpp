#pragma once

#include <stdexcept>
#include <string>

namespace socsim {

/// Scenario fails schema or range validation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario references an entity that does not exist (e.g. MVNO with an
/// unknown host operator).
class TopologyError : public ConfigError {
 public:
  explicit TopologyError(const std::string& what) : ConfigError(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Price series shorter than the requested stability window.
class SeriesTooShort : public std::runtime_error {
 public:
  explicit SeriesTooShort(const std::string& what) : std::runtime_error(what) {}
};

/// No active MVNO is offering society access (access must be universal).
class NoSocietyOffer : public std::runtime_error {
 public:
  explicit NoSocietyOffer(const std::string& what) : std::runtime_error(what) {}
};

/// Slice purchase exceeds the host's uncommitted exclusive capacity.
class InsufficientCapacity : public std::runtime_error {
 public:
  explicit InsufficientCapacity(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace socsim
