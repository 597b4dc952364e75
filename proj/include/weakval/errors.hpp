// Copyright 2026 The weakval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weakval {

enum class ErrorCode {
    DimensionMismatch,
    InvalidDimension,
    NotNormalized,
    HermiticityViolation,
    NegativeVariance,
    ConvergenceFailure,
    OrthogonalPostSelection,
    IncompleteBasis,
    NonOrthonormalBasis,
    PhaseUndefined,
    ConfigInvalid,
    ZeroSelectionProbability,
    GuardViolated,
    ParseError,
    ValidationError,
    InequalityViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::HermiticityViolation: return "HermiticityViolation";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::OrthogonalPostSelection: return "OrthogonalPostSelection";
    case ErrorCode::IncompleteBasis: return "IncompleteBasis";
    case ErrorCode::NonOrthonormalBasis: return "NonOrthonormalBasis";
    case ErrorCode::PhaseUndefined: return "PhaseUndefined";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ZeroSelectionProbability: return "ZeroSelectionProbability";
    case ErrorCode::GuardViolated: return "GuardViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InequalityViolation: return "InequalityViolation";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` tells callers which
/// invariant or precondition was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace weakval
