// Copyright 2026 The ppkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ppkit::cli {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "PPKIT_CONFIG";

/// Runs one `ppkit` invocation. `args` excludes the program name. Returns
/// the process exit code: 0 when every item succeeded, 1 when any item
/// failed, 2 for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppkit::cli
