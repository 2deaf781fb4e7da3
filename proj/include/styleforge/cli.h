/* Copyright 2026 The StyleForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef STYLEFORGE_CLI_H_
#define STYLEFORGE_CLI_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "styleforge/engine.h"
#include "styleforge/errors.h"
#include "styleforge/imageio.h"

namespace styleforge::cli {

// Bad command line; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct StyleArg {
  std::filesystem::path path;
  std::optional<double> weight;
};

// "s.png" -> {s.png, none}; "s.png:0.7" -> {s.png, 0.7}. The text after the
// last ':' must be a finite positive decimal.
StyleArg parse_style_arg(std::string_view text);

struct CliInvocation {
  std::filesystem::path content_path;
  std::vector<StyleArg> styles;
  // Blend weight per style, normalized to sum to 1. Styles given without a
  // weight count as 1 before normalization.
  std::vector<double> blend;
  std::filesystem::path weights_path;
  std::filesystem::path out_path = "stylized.png";
  std::filesystem::path loss_csv;
  std::filesystem::path snapshot_dir;
  RunConfig run;
  NormalizationSpec norm;
  bool check_grad = false;
};

// Parses argv (argv[0] is the program name). Throws UsageError for unknown
// flags, missing required flags, or invalid values. Throws HelpRequested
// for --help.
CliInvocation parse_invocation(const std::vector<std::string>& args);

class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

// One line listing every effective setting as flags, so the run can be
// repeated verbatim.
std::string effective_config_line(const CliInvocation& inv);

std::filesystem::path snapshot_path(const CliInvocation& inv,
                                    std::optional<std::size_t> stage,
                                    std::size_t step);

// Full program: returns 0 on success, 2 on usage errors, 1 on runtime
// errors (with the failing stage named on `err`).
int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace styleforge::cli

#endif  // STYLEFORGE_CLI_H_
