#pragma once

// Experiment commands, persistence and the hyplab command line.

#include "hyplab/common.hpp"
#include "hyplab/porosity.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyplab::lab {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kPass = 0, kUsage = 1, kCounterexample = 2, kInconclusive = 3 };

// Bad flags, malformed configs, out-of-range parameters: exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 17 significant digits, shortest form that round-trips.
std::string fmt17(double v);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& bytes);

// Parses JSON text; errors carry line and column.
json parse_json(const std::string& text, const std::string& origin);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& cell(const std::string& s);
  Csv& cell(double v);
  Csv& cell(long long v);
  Csv& cell(int v) { return cell(static_cast<long long>(v)); }
  Csv& cell(bool v) { return cell(std::string(v ? "1" : "0")); }
  void end_row();
  void footer(const std::string& line);  // written as "# line" after the rows
  std::string str() const;

 private:
  std::size_t width_;
  std::vector<std::string> pending_;
  std::string body_;
  std::string foot_;
};

struct RunOptions {
  std::uint64_t seed = 1;
  std::filesystem::path out = "hyplab-out";
  int workers = 1;
  std::optional<double> tol;
};

struct CommandOutput {
  int exit_code = kPass;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::vector<std::string> summary;
};

using CommandFn = CommandOutput (*)(const json& cfg, const RunOptions& opt);

struct CommandInfo {
  std::string name;
  std::string help;
  json defaults;
  CommandFn fn;
};

const std::vector<CommandInfo>& commands();
const CommandInfo& find_command(const std::string& name);

// Defaults merged with the user object.  Unknown fields and type mismatches throw UsageError.
// Object-valued fields merge recursively under the same rules; null defaults accept any value.  A global tolerance replaces every numeric field whose name starts with "tol".
json resolve_config(const CommandInfo& cmd, const json& user, const std::optional<double>& tol);

struct RunRecord {
  int exit_code = kPass;
  bool reproduced = true;  // rerun only: every output digest matched
  json manifest;
  std::vector<std::string> summary;
};

// Runs a command, writes its files and manifest.json into opt.out.
RunRecord execute(const std::string& command, const json& user_cfg, const RunOptions& opt,
                  const std::vector<std::filesystem::path>& inputs = {});
// Re-runs the command recorded in a manifest into out_dir (config, seed, workers and tolerance from the
// manifest) and compares output digests.  A digest mismatch sets exit code 2.
RunRecord rerun(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

int run_cli(int argc, char** argv);

// Set-spec document: {"cantor": {base, kept_digits, depth, dims}}, {"boxes": [[lo, hi], ...],
// "resolution": m, "dims": n}, {"empty": {dims, resolution}} or {"full": {dims, resolution}}.
BoxSet boxset_from_json(const json& spec);

// ---- suites shared with the acceptance runner ----

struct SuiteRow {
  int n = 0;
  std::string suite;
  std::string name;
  double residual = 0;
  double tol = 0;
  bool pass = true;
};

// Commutator table in exact integer arithmetic and in double precision.
std::vector<SuiteRow> commutator_suite(int n, bool inject_sign_flip, double tol_float);
// Closed-form geodesic flow against the matrix exponential of the frame.
SuiteRow flow_compat_suite(int n, int samples, double t_max, double tol, Rng& rng);
// exp(sU) a(-t) = a(-t) exp(s e^{+-t} U), both signs.
SuiteRow horocyclic_suite(int n, int samples, double t_max, double tol, Rng& rng);

}  // namespace hyplab::lab
