// include/ctcd/harness/cli.h

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

#ifndef CTCD_HARNESS_CLI_H_
#define CTCD_HARNESS_CLI_H_

#include <string>
#include <vector>

namespace ctcd {

// Full CLI entry point (subcommands: gen-data, train-baseline, train-kd,
// eval, nbest, matrix, report). Args exclude argv[0]. Returns the process
// exit code: 0 ok, 2 config error, 3 numeric error, 4 I/O error.
int run_cli(const std::vector<std::string>& args);

// Maps an in-flight exception to the documented exit codes.
int exit_code_for_current_exception();

}  // namespace ctcd

#endif  // CTCD_HARNESS_CLI_H_
