#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vml/json_io.hpp"

namespace vml {

struct RunRecord {
  std::string config_hash;  // hex
  std::uint64_t seed = 0;
  std::string version;
  std::string created;  // wall clock; lives in the cache envelope only
  Json payload;         // deterministic given (config, seed, version)
  bool from_cache = false;
};

// FNV-1a over the canonical config dump.
std::string config_hash(const Json& config);

// $VML_CACHE_DIR when set, .vml-cache otherwise.
std::string default_cache_dir();

// Validates the config, dispatches to the module operation, writes through
// the cache (atomic write-then-rename), and serves cached payloads on
// re-run. Throws ConfigError for schema problems and ModuleError for
// numerical failures; the CLI maps these to exit codes 2 and 3.
RunRecord run(const Json& config, const std::string& cache_dir = "");

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass = true;
};

std::vector<std::string> suite_names();

// Runs every check of the named suite. "acceptance" is the full criteria
// battery (including the mutation checks); "trivial" covers the identity
// cases; "mutation" runs the two mutation checks alone. Unknown suite names
// throw ConfigError.
SuiteResult verify_suite(const std::string& suite, std::uint64_t seed);

}  // namespace vml
