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

#include "chansel/error.h"

namespace chansel {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySubset: return "EmptySubset";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kAllZeroMask: return "AllZeroMask";
    case ErrorCode::kInvalidMontage: return "InvalidMontage";
    case ErrorCode::kInvalidTrialSet: return "InvalidTrialSet";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kHeaderParse: return "HeaderParse";
    case ErrorCode::kPayloadLengthMismatch: return "PayloadLengthMismatch";
    case ErrorCode::kNonFiniteSample: return "NonFiniteSample";
    case ErrorCode::kRaggedRows: return "RaggedRows";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kBadNumber: return "BadNumber";
    case ErrorCode::kSpecInvalid: return "SpecInvalid";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kProtocolTimeout: return "ProtocolTimeout";
    case ErrorCode::kProtocolMalformed: return "ProtocolMalformed";
    case ErrorCode::kEvaluatorError: return "EvaluatorError";
    case ErrorCode::kAccuracyOutOfRange: return "AccuracyOutOfRange";
    case ErrorCode::kProcessExited: return "ProcessExited";
    case ErrorCode::kTooManyChannels: return "TooManyChannels";
    case ErrorCode::kDegenerateSampling: return "DegenerateSampling";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kWidthMismatch: return "WidthMismatch";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kUnknownName: return "UnknownName";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

}  // namespace chansel
