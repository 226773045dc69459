#pragma once

#include <string>
#include <vector>

namespace linresp {

// One cross-check with its observed values.  `seconds` is wall time; the
// stated runtime budget is part of the pass condition.
struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct CheckContext {
  int threads = 1;
  // Needed only by the artifact-determinism check: the CLI binary to spawn
  // and the directory holding the experiment configs.  Empty strings make
  // that check fail with a diagnostic instead of crashing.
  std::string cli_path;
  std::string config_dir;
};

// The full cross-check suite, in fixed order, never throwing: an exception
// inside a check is converted into a failed result carrying the message.
std::vector<CheckResult> run_standard_checks(const CheckContext& ctx);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace linresp
