/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stmask/masking.hpp"
#include "stmask/relevance.hpp"
#include "stmask/synthetic.hpp"

namespace stmask::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,  // invariant or self-check failure
  kUsage = 2,
  kDataError = 3,
  kDomainError = 4,
};

enum class ReportFormat { kText, kJsonLines };

inline constexpr int kReportSchemaVersion = 1;

/// Everything a subcommand needs, filled from flags.
struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string text_input;
  std::string output;
  std::string text_output;
  MaskStrategy strategy = MaskStrategy::kClusterST;
  MaskConfig mask;
  WindowSpec window;
  std::string pool = "mean";
  double temperature = 1.0;
  unsigned threads = 0;
  ReportFormat format = ReportFormat::kText;
  SyntheticSpec synthetic;
  std::size_t repeats = 5;
};

int cmd_mask(const RunConfig& cfg, std::ostream& out);
int cmd_density(const RunConfig& cfg, std::ostream& out);
int cmd_relevance(const RunConfig& cfg, std::ostream& out);
int cmd_heatmap(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);
int cmd_gen_synthetic(const RunConfig& cfg, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);

/// Parses `args` (without the program name) and runs the subcommand. Library
/// errors are caught and mapped to exit codes; the diagnostic goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stmask::cli
