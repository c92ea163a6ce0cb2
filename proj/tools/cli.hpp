#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ozawa/group.hpp"
#include "ozawa/kernel.hpp"
#include "ozawa/rational.hpp"
#include "ozawa/verifier.hpp"

namespace ozawa::cli {

enum class OutputFormat { text, json, csv };

struct RunConfig {
  std::string command;                // ball | kernel | defect | verify
  std::string group;                  // canonical group descriptor
  std::string kernel;                 // tree | folner:<strategy>; defect: the strategy alone
  std::vector<std::string> elements;  // kernel: x y; defect: g
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
  bool list_elements = false;         // ball --elements
  std::string E = "ball:1";           // ball:r | list:e1,e2,...
  Rational eps = make_rational(1, 10);
  std::size_t n_max = 64;
  SampleSpec sample;
  OutputFormat format = OutputFormat::text;
  std::size_t budget = kDefaultElementBudget;
  std::string out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Canonical argv (without the program name); parse(to_args()) == *this.
  std::vector<std::string> to_args() const;
};

/// Thrown for malformed command lines; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses argv (without the program name). Throws UsageError. Returns a
/// config with an empty command for --help.
RunConfig parse_args(const std::vector<std::string>& args, std::ostream& out);

std::unique_ptr<OzawaKernel> make_kernel(std::shared_ptr<const GroupModel> group, std::string_view tag);

/// Resolves "ball:r" or "list:e1,e2,..." against a group.
std::vector<Element> resolve_E(const GroupModel& group, std::string_view spec);

/// Executes a parsed config. Exit codes: 0 ok/PASS, 1 FAIL, 2 usage error.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + execute, with all error reporting.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ozawa::cli
