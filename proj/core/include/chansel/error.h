// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHANSEL_ERROR_H_
#define CHANSEL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace chansel {

// Every failure raised by the library carries one of these codes.
enum class ErrorCode {
  // core-model
  kEmptySubset,
  kIndexOutOfRange,
  kAllZeroMask,
  kInvalidMontage,
  kInvalidTrialSet,
  // dataio
  kIoError,
  kBadMagic,
  kHeaderParse,
  kPayloadLengthMismatch,
  kNonFiniteSample,
  kRaggedRows,
  kBadLabel,
  kBadNumber,
  kSpecInvalid,
  // evaluator
  kConfigInvalid,
  kClassTooSmall,
  kSingularCovariance,
  kProtocolTimeout,
  kProtocolMalformed,
  kEvaluatorError,
  kAccuracyOutOfRange,
  kProcessExited,
  // selectors
  kTooManyChannels,
  kDegenerateSampling,
  kLengthMismatch,
  kWidthMismatch,
  kEmptyRegion,
  kUnknownName,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chansel

#endif  // CHANSEL_ERROR_H_
