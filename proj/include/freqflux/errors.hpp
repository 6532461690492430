/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace freqflux {

/// Broad classes of failure. The CLI maps each class onto an exit code.
enum class ErrorClass { input, numerical, io };

enum class ErrorKind {
    // input
    invalid_network,
    disconnected_network,
    invalid_branch,
    invalid_argument,
    dimension_mismatch,
    insufficient_sources,
    missing_distribution,
    too_few_samples,
    degenerate_sample,
    // numerical
    singular_matrix,
    no_convergence,
    unstable_step,
    step_rejected,
    // io
    io_failure,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_network: return "InvalidNetwork";
        case ErrorKind::disconnected_network: return "DisconnectedNetwork";
        case ErrorKind::invalid_branch: return "InvalidBranch";
        case ErrorKind::invalid_argument: return "InvalidArgument";
        case ErrorKind::dimension_mismatch: return "DimensionMismatch";
        case ErrorKind::insufficient_sources: return "InsufficientSources";
        case ErrorKind::missing_distribution: return "MissingDistribution";
        case ErrorKind::too_few_samples: return "TooFewSamples";
        case ErrorKind::degenerate_sample: return "DegenerateSample";
        case ErrorKind::singular_matrix: return "SingularMatrix";
        case ErrorKind::no_convergence: return "NoConvergence";
        case ErrorKind::unstable_step: return "UnstableStep";
        case ErrorKind::step_rejected: return "StepRejected";
        case ErrorKind::io_failure: return "IOFailure";
    }
    return "Unknown";
}

inline ErrorClass classify(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::singular_matrix:
        case ErrorKind::no_convergence:
        case ErrorKind::unstable_step:
        case ErrorKind::step_rejected:
            return ErrorClass::numerical;
        case ErrorKind::io_failure:
            return ErrorClass::io;
        default:
            return ErrorClass::input;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    ErrorClass error_class() const noexcept { return classify(kind_); }

private:
    ErrorKind kind_;
};

/// Raised when a factorization is rank deficient or too ill-conditioned to
/// trust. Carries the reciprocal condition estimate that triggered it.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(std::string matrix, double rcond, const std::string& hint = {})
        : Error(ErrorKind::singular_matrix,
                matrix + " (rcond estimate " + std::to_string(rcond) + ")" +
                    (hint.empty() ? std::string{} : "; " + hint)),
          matrix_(std::move(matrix)),
          rcond_(rcond) {}

    const std::string& matrix() const noexcept { return matrix_; }
    double rcond() const noexcept { return rcond_; }

private:
    std::string matrix_;
    double rcond_;
};

}  // namespace freqflux
