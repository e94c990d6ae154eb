#pragma once

#include <stdexcept>
#include <string>

namespace pwl {

// Thrown when an exact-oracle routine is asked for a scale beyond its stated
// validity bounds (it refuses rather than silently degrading).
struct ScaleExceeded : std::runtime_error {
  explicit ScaleExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a conditional estimator has too few conditioning events to
// report anything meaningful.
struct InsufficientSamples : std::runtime_error {
  explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by regression helpers when fewer than the minimum number of usable
// points remain after filtering.
struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a functional of a sampled path is requested beyond the path's
// simulated horizon.
struct HorizonExceeded : std::runtime_error {
  explicit HorizonExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on mathematical-domain violations (e.g. cdf arguments outside [0,1]).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an event detector is asked about an excursion that has not been
// completed by the simulated path.
struct IncompleteExcursion : std::runtime_error {
  explicit IncompleteExcursion(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the experiment layer on malformed configuration values; the
// message names the offending field.
struct ConfigInvalid : std::runtime_error {
  explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the experiment dispatcher for unrecognized experiment names.
struct UnknownExperiment : std::runtime_error {
  explicit UnknownExperiment(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pwl
