#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmod::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ExitCode code, const std::string& reason) : std::runtime_error(reason), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

/// Quadrature and solver tolerances. Named profiles: "default", "fast",
/// "strict"; QMOD_TOLERANCE_PROFILE picks the profile when the config does not.
struct ToleranceProfile {
  std::string name = "default";
  double volume_rel_tol = 1e-8;
  double radial_rel_tol = 1e-8;
  double energy_rel_tol = 1e-9;

  static ToleranceProfile named(const std::string& name);
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> jobs;
  bool verbose = false;
};

struct RunResult {
  ExitCode code = kExitOk;
  std::string reason;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;  // data files, manifest excluded
};

/// Parses and validates without computing. Throws ScenarioError.
void validate_scenario(const std::filesystem::path& config);

/// Validates, runs, and writes data files plus manifest.txt. Validation
/// failures leave the output directory untouched.
RunResult run_scenario(const std::filesystem::path& config, const RunOptions& opt = {});

/// One line: "error code=<n> kind=<kind> reason=<text>".
std::string format_error(ExitCode code, const std::string& reason);

}  // namespace qmod::cli
