#pragma once

#include <stdexcept>
#include <string>

namespace fracspec {

/// Base class of every error thrown by the library.
///
/// exit_code() is the process exit status the CLI maps the error to:
/// 2 for configuration or usage problems, 3 for numerical failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
    virtual int exit_code() const noexcept { return 3; }
};

/// Malformed input: bad files, bad flags, bad parameter combinations.
class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// A computation that should have succeeded did not (solver breakdown,
/// arithmetic overflow, failed mathematical identity).
class NumericalError : public Error {
public:
    using Error::Error;
};

// graph construction
class LoopEdge : public ConfigError { public: using ConfigError::ConfigError; };
class DuplicateEdge : public ConfigError { public: using ConfigError::ConfigError; };
class NonPositiveWeight : public ConfigError { public: using ConfigError::ConfigError; };

// eigensolvers
class SolverFailure : public NumericalError { public: using NumericalError::NumericalError; };

// fractal systems
class UnknownPreset : public ConfigError { public: using ConfigError::ConfigError; };
class InconsistentGluing : public ConfigError { public: using ConfigError::ConfigError; };
class SingularSystem : public NumericalError { public: using NumericalError::NumericalError; };
class CompatibilityViolation : public NumericalError { public: using NumericalError::NumericalError; };

// metric graphs and scaling plans
class InvalidRatio : public ConfigError { public: using ConfigError::ConfigError; };
class BadPartition : public ConfigError { public: using ConfigError::ConfigError; };
class LengthMismatch : public ConfigError { public: using ConfigError::ConfigError; };

// identification operators
class IncompatibleWeights : public ConfigError { public: using ConfigError::ConfigError; };
class DimensionMismatch : public ConfigError { public: using ConfigError::ConfigError; };

// closed-form error calculators
class DomainError : public ConfigError { public: using ConfigError::ConfigError; };
class OutOfRange : public ConfigError { public: using ConfigError::ConfigError; };
class OutOfWindow : public ConfigError { public: using ConfigError::ConfigError; };

// exact arithmetic
class Overflow : public NumericalError { public: using NumericalError::NumericalError; };

} // namespace fracspec
