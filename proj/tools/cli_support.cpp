#include "cli_support.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <thread>

#ifndef HAMWAVE_VERSION
#define HAMWAVE_VERSION "0.0.0"
#endif

namespace hamwave::cli {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); }

double parse_number(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    invalid(key + ": not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) invalid(key + ": not a number: '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// Grid values such as 0.4 + 3 * 0.2 should print as 1, not 1.0000000000000002.
double tidy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

const std::vector<ParamSpec>& param_table() {
  static const std::vector<ParamSpec> table = {
      {"alpha", Kind::Number, 2.0, "dispersion order alpha in (1/3, 2]"},
      {"p", Kind::Integer, 2, "nonlinearity power"},
      {"c", Kind::Number, 1.0, "wave speed"},
      {"eps", Kind::Number, 1e-2, "vortex strength"},
      {"a", Kind::Number, 1.0, "vortex depth"},
      {"g", Kind::Number, 1.0, "gravity"},
      {"b", Kind::Number, 1.0, "surface tension"},
      {"L", Kind::Number, 50.0, "half-length of the periodic box [-L, L)"},
      {"N", Kind::Integer, 1024, "grid points (even)"},
      {"M", Kind::Integer, 4, "Dirichlet-Neumann expansion order"},
      {"dt", Kind::Number, 0.0, "time step (0 selects the default)"},
      {"T", Kind::Number, 50.0, "final time"},
      {"stride", Kind::Integer, 100, "steps between trajectory samples"},
      {"delta", Kind::Sweep, json::array({1e-3}), "perturbation size(s)"},
      {"seed", Kind::Integer, 42, "master seed"},
      {"tol", Kind::Number, 1e-12, "solver tolerance"},
      {"max_iter", Kind::Integer, 2000, "solver iteration budget"},
      {"diff_step", Kind::Number, 1e-3, "difference step in c (fKdV) or relative step in a (point vortex) for d''"},
      {"keep", Kind::Integer, 8, "eigenvalues to report"},
      {"zero_tol", Kind::Number, 1e-6, "near-zero eigenvalue tolerance"},
      {"direction", Kind::Text, "random-even", "perturbation direction: random-even or negative-mode"},
      {"integrator", Kind::Text, "etdrk4", "time integrator: etdrk4 or rk4"},
      {"exclusion", Kind::Number, 0.2, "abort when surface-vortex separation < exclusion * depth"},
      {"out", Kind::Text, "out", "output directory"},
  };
  return table;
}

const ParamSpec& param_spec(const std::string& name) {
  for (const auto& s : param_table())
    if (s.name == name) return s;
  invalid("unknown key '" + name + "'");
}

ParamSpec param(const std::string& name, json def) {
  ParamSpec s = param_spec(name);
  s.def = coerce(s, def);
  return s;
}

ParamSpec sweep_param(const std::string& name, json def) {
  ParamSpec s = param_spec(name);
  if (s.kind == Kind::Integer) s.kind = Kind::IntSweep;
  else if (s.kind == Kind::Number) s.kind = Kind::Sweep;
  s.def = coerce(s, def);
  return s;
}

std::vector<double> parse_sweep(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) invalid("empty sweep");
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      auto q = text.find(':', pos);
      parts.push_back(trim(text.substr(pos, q - pos)));
      if (q == std::string::npos) break;
      pos = q + 1;
    }
    if (parts.size() != 3) invalid("range must be start:stop:step, got '" + text + "'");
    double start = parse_number(parts[0], "range"), stop = parse_number(parts[1], "range"),
           step = parse_number(parts[2], "range");
    if (step == 0.0 || (stop - start) * step < 0.0) invalid("range step does not reach stop in '" + text + "'");
    double span = (stop - start) / step;
    auto n = static_cast<long>(std::floor(span + 1e-9)) + 1;
    if (n > 100000) invalid("range too long: '" + text + "'");
    for (long i = 0; i < n; ++i) out.push_back(tidy(start + static_cast<double>(i) * step));
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    auto q = text.find(',', pos);
    out.push_back(parse_number(trim(text.substr(pos, q - pos)), "list"));
    if (q == std::string::npos) break;
    pos = q + 1;
  }
  return out;
}

json coerce(const ParamSpec& spec, const json& value) {
  const std::string& key = spec.name;
  auto as_number = [&](const json& v) -> double {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_number(trim(v.get<std::string>()), key);
    invalid(key + ": expected a number");
  };
  auto as_integer = [&](double d) -> json {
    if (d != std::floor(d) || std::abs(d) > 9.0e15) invalid(key + ": expected an integer");
    if (d < 0) return static_cast<std::int64_t>(d);
    return static_cast<std::uint64_t>(d);
  };
  switch (spec.kind) {
    case Kind::Number: return as_number(value);
    case Kind::Integer: return as_integer(as_number(value));
    case Kind::Text:
      if (!value.is_string()) invalid(key + ": expected a string");
      return value;
    case Kind::Sweep:
    case Kind::IntSweep: {
      std::vector<double> vals;
      if (value.is_string()) {
        vals = parse_sweep(value.get<std::string>());
      } else if (value.is_array()) {
        for (const auto& v : value) vals.push_back(as_number(v));
      } else {
        vals.push_back(as_number(value));
      }
      if (vals.empty()) invalid(key + ": empty sweep");
      json arr = json::array();
      for (double v : vals) arr.push_back(spec.kind == Kind::IntSweep ? as_integer(v) : json(v));
      return arr;
    }
  }
  invalid(key + ": unsupported kind");
}

json effective_config(const std::string& subcommand, const std::vector<ParamSpec>& specs, const json& file,
                      const std::map<std::string, std::string>& flags) {
  auto find = [&](const std::string& k) -> const ParamSpec& {
    for (const auto& s : specs)
      if (s.name == k) return s;
    invalid("unknown key '" + k + "' for " + subcommand);
  };
  json cfg = json::object();
  for (const auto& s : specs) cfg[s.name] = s.def;
  if (!file.is_null()) {
    if (!file.is_object()) invalid("config file must hold a JSON object");
    if (file.contains("subcommand") && file["subcommand"] != subcommand)
      invalid("config file is for " + file["subcommand"].dump() + ", not '" + subcommand + "'");
    for (const auto& [k, v] : file.items())
      if (k != "subcommand") cfg[k] = coerce(find(k), v);
  }
  for (const auto& [k, v] : flags) {
    cfg[k] = coerce(find(k), json(v));
  }
  return cfg;
}

std::vector<double> sweep_values(const json& config, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : config.at(key)) out.push_back(v.get<double>());
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NoConvergence:
    case ErrorKind::CollapseToZero:
    case ErrorKind::JacobianSingular:
    case ErrorKind::BlowupDetected:
    case ErrorKind::ResolutionLoss:
    case ErrorKind::AdmissibilityLost:
    case ErrorKind::ExpansionDiverging:
    case ErrorKind::DegenerateConstraints:
      return 2;
    case ErrorKind::SpectralConfigViolation:
    case ErrorKind::SymmetryDefect:
      return 4;
    case ErrorKind::InvalidParameter:
    case ErrorKind::UnderResolved:
    case ErrorKind::ZeroField:
    case ErrorKind::NonZeroMean:
    case ErrorKind::SingularEvaluation:
    case ErrorKind::ZeroModeRejected:
    case ErrorKind::IoError:
      return 3;
  }
  return 3;
}

unsigned worker_count(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HAMWAVE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) invalid("HAMWAVE_THREADS must be a positive integer");
    cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(cap, jobs)));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned k = worker_count(n);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < k; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

json Provenance::versions() const {
  return {{"hamwave", HAMWAVE_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}};
}

json Provenance::to_json(const json& seed) const {
  json physics = config;
  physics.erase("out");  // where results go does not change them
  json j = {{"subcommand", subcommand}, {"config", config}, {"config_hash", config_hash(physics)},
            {"versions", versions()}};
  if (!seed.is_null()) j["seed"] = seed;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_sidecar(const std::string& path, const Provenance& prov, const json& seed) {
  json j = prov.to_json(seed);
  auto slash = path.find_last_of('/');
  j["file"] = slash == std::string::npos ? path : path.substr(slash + 1);
  write_json(path + ".meta.json", j);
}

}  // namespace hamwave::cli
