// include/ctcd/error.h

// Copyright 2026  ctcdistill authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CTCD_ERROR_H_
#define CTCD_ERROR_H_

#include <stdexcept>
#include <string>

namespace ctcd {

// Exit codes used by the CLI; library code throws, tools translate.
enum ExitCode {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitNumericError = 3,
  kExitIoError = 4,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid shapes, specs, config files, mismatched components.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// API misuse: non-scalar backward root, enumeration budget exceeded.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced by a forward op.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed checkpoint or dataset file (bad magic, version, truncation).
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

// A (features, target) pair the CTC loss cannot express: T is shorter than
// the label count plus the blanks required between repeated labels.
class InfeasibleTargetError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace ctcd

#endif  // CTCD_ERROR_H_
