#pragma once

#include <stdexcept>
#include <string>

namespace potsim {

// Base of every library failure.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A parameter lies outside its mathematical domain (negative dispersion,
// zero distance, roll-off outside (0, 1], ...).
class ParameterDomainError : public Error {
  public:
    using Error::Error;
};

// Inputs are individually valid but inconsistent with each other
// (mismatched sample rates, missing table, malformed config file).
class ConfigurationError : public Error {
  public:
    using Error::Error;
};

class NumericalDegeneracyError : public Error {
  public:
    using Error::Error;
};

// The FO policy has no entry for a requested aggressor count.
class UnavailablePolicyError : public Error {
  public:
    using Error::Error;
};

// A required artifact (Q-table file) is absent.
class MissingArtifactError : public Error {
  public:
    using Error::Error;
};

} // namespace potsim
