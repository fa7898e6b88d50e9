#pragma once

// The `hasr` command line: translate, simulate, encode, eval, selftest and
// replay. Every subcommand reads files or standard input and writes files or
// standard output; a key=value manifest records what was run.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hasr::cli {

inline constexpr std::string_view tool_version = "0.1.0";

enum ExitCode : int { Success = 0, DomainError = 1, UsageError = 2 };

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(std::string_view data);
std::string digest_hex(std::string_view data);

/// Manifest format, one key=value per line:
///   tool=hasr
///   version=0.1.0
///   subcommand=simulate
///   arg.0=--horizon          (repeated, in order)
///   input.<name>=<digest>    (name is a path, or - for standard input)
///   output.<name>=<digest>
///   seeds=<seed list>        (simulate only)
struct RunManifest {
  std::string version{tool_version};
  std::string subcommand;
  std::vector<std::string> args;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;
  std::string seeds;

  void write(std::ostream& out) const;
  static RunManifest read(std::istream& in);
  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// Entry point; `argv[0]` is the program name.
int run(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hasr::cli
