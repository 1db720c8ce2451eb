#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace scssim::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kIoError = 2,
  kDegenerate = 3,
  kTooSmall = 4,
  kBadFlags = 5,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Kodak cache: $SCSSIM_CACHE/kodak, or ~/.cache/scssim/kodak.
std::filesystem::path kodak_dir();

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double value);

}  // namespace scssim::cli
