// Copyright 2026 The imqed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMQED_ERRORS_HPP
#define IMQED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace imqed {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical errors (CLI exit code 3).
struct NumericalError : Error {
    using Error::Error;
};

struct PoleProximityError : NumericalError {
    PoleProximityError(double omega, double pole)
        : NumericalError("evaluation frequency " + std::to_string(omega) +
                         " rad/s is inside the guard band of pole at " +
                         std::to_string(pole) + " rad/s"),
          omega(omega), pole(pole) {}
    double omega, pole;
};

struct NonFiniteError : NumericalError {
    using NumericalError::NumericalError;
};

struct NotAPoleError : NumericalError {
    using NumericalError::NumericalError;
};

struct HigherOrderPoleError : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularConversionError : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularAtFrequencyError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegeneratePoleError : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularDcResidueError : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateResidueError : NumericalError {
    using NumericalError::NumericalError;
};

struct ResonantPairError : NumericalError {
    ResonantPairError(int a, int b, double theta)
        : NumericalError("resonant pair (" + std::to_string(a) + "," +
                         std::to_string(b) + "): squared-frequency gap " +
                         std::to_string(theta) + " below tolerance"),
          index_a(a), index_b(b) {}
    int index_a, index_b;
};

struct NotBlockStructuredError : NumericalError {
    using NumericalError::NumericalError;
};

struct UnstableSystemError : NumericalError {
    using NumericalError::NumericalError;
};

struct TruncationInsufficientError : NumericalError {
    using NumericalError::NumericalError;
};

struct NonphysicalError : NumericalError {
    using NumericalError::NumericalError;
};

struct StiffnessFailureError : NumericalError {
    using NumericalError::NumericalError;
};

struct ZeroDenominatorError : NumericalError {
    using NumericalError::NumericalError;
};

struct InvalidRouteError : NumericalError {
    using NumericalError::NumericalError;
};

// Configuration / input errors (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

struct SyntaxError : ConfigError {
    SyntaxError(int line, int col, const std::string& what)
        : ConfigError("syntax error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + what),
          line(line), col(col) {}
    int line, col;
};

struct SemanticError : ConfigError {
    using ConfigError::ConfigError;
};

struct MissingParamError : ConfigError {
    explicit MissingParamError(const std::string& name)
        : ConfigError("missing parameter: " + name) {}
};

}  // namespace imqed

#endif
