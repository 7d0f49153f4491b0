#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hamwave/errors.hpp"
#include "json.hpp"

namespace hamwave::cli {

using json = nlohmann::json;

enum class Kind { Number, Integer, Text, Sweep, IntSweep };

struct ParamSpec {
  std::string name;
  Kind kind;
  json def;
  std::string help;
};

/// Every configuration key the CLI knows, with generic defaults.
const std::vector<ParamSpec>& param_table();
const ParamSpec& param_spec(const std::string& name);
/// The table entry with a subcommand-specific default.
ParamSpec param(const std::string& name, json def);
/// The same key accepting a range or list (integer-valued when the base key is).
ParamSpec sweep_param(const std::string& name, json def);

/// "start:stop:step" (stop included when hit to rounding), "a,b,c", or a single number.
/// Throws InvalidParameter.
std::vector<double> parse_sweep(const std::string& text);

/// Coerces a file or flag value to the key's kind; sweeps become arrays.
json coerce(const ParamSpec& spec, const json& value);

/// Defaults, then `file`, then `flags`. Keys outside `specs` are rejected, except a
/// "subcommand" entry in the file that must equal `subcommand`.
json effective_config(const std::string& subcommand, const std::vector<ParamSpec>& specs, const json& file,
                      const std::map<std::string, std::string>& flags);

std::vector<double> sweep_values(const json& config, const std::string& key);

std::uint64_t fnv1a64(std::string_view bytes);
/// FNV-1a of the compact dump, as 16 hex digits.
std::string config_hash(const json& config);

/// splitmix64 of master + index + 1; run i of a sweep gets its own stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

int exit_code(ErrorKind k);

/// min(jobs, HAMWAVE_THREADS or hardware concurrency), at least 1.
unsigned worker_count(std::size_t jobs);

/// Runs job(i) for i in [0, n) on worker_count(n) threads. Job exceptions are
/// rethrown after all workers finish, lowest index first.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job);

struct Provenance {
  std::string subcommand;
  json config;
  json versions() const;
  /// {subcommand, config, config_hash, versions} plus "seed" when given. The hash
  /// leaves out the output directory.
  json to_json(const json& seed = nullptr) const;
};

/// Writes `<path>.meta.json` describing `path`.
void write_sidecar(const std::string& path, const Provenance& prov, const json& seed = nullptr);
void write_json(const std::string& path, const json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace hamwave::cli
