#include "hyplab/lab.hpp"

#include <chrono>
#include <map>
#include <ctime>

namespace hyplab::lab {

namespace {

std::string type_name(const json& v) {
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  return v.type_name();
}

bool compatible(const json& def, const json& val) {
  if (def.is_null()) return true;
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_number()) return val.is_number();
  return def.type() == val.type();
}

void merge(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw UsageError("config" + (path.empty() ? "" : " field '" + path + "'") + ": expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw UsageError("unknown config field '" + key + "'");
    json& slot = base[it.key()];
    if (!compatible(slot, it.value()))
      throw UsageError("config field '" + key + "': expected " + type_name(slot) + ", got " + type_name(it.value()));
    if (slot.is_object() && !slot.empty())
      merge(slot, it.value(), key);
    else
      slot = it.value();
  }
}

void apply_tol(json& cfg, double tol) {
  if (!cfg.is_object()) return;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (it.value().is_object())
      apply_tol(it.value(), tol);
    else if (it.key().rfind("tol", 0) == 0 && it.value().is_number())
      it.value() = tol;
  }
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json resolve_config(const CommandInfo& cmd, const json& user, const std::optional<double>& tol) {
  json cfg = cmd.defaults;
  if (!user.is_null()) merge(cfg, user, "");
  if (tol) {
    if (!(*tol > 0)) throw UsageError("--tol must be positive");
    apply_tol(cfg, *tol);
  }
  return cfg;
}

RunRecord execute(const std::string& command, const json& user_cfg, const RunOptions& opt,
                  const std::vector<std::filesystem::path>& inputs) {
  const CommandInfo& info = find_command(command);
  if (opt.workers < 1) throw UsageError("--workers must be at least 1");
  const json cfg = resolve_config(info, user_cfg, opt.tol);
  const std::string started = iso_now();
  CommandOutput out;
  try {
    out = info.fn(cfg, opt);
  } catch (const json::exception& e) {
    throw UsageError(command + ": bad config value: " + e.what());
  }
  std::filesystem::create_directories(opt.out);
  json m;
  m["tool"] = "hyplab";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = cfg;
  m["seed"] = opt.seed;
  m["workers"] = opt.workers;
  m["tol"] = opt.tol ? json(*opt.tol) : json(nullptr);
  m["started"] = started;
  json ins = json::array();
  for (const auto& p : inputs) ins.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  m["inputs"] = ins;
  json outs = json::array();
  for (const auto& [name, body] : out.files) {
    write_file(opt.out / name, body);
    outs.push_back({{"path", name}, {"sha256", sha256_hex(body)}});
  }
  m["outputs"] = outs;
  m["exit_code"] = out.exit_code;
  m["summary"] = out.summary;
  m["finished"] = iso_now();
  write_file(opt.out / "manifest.json", m.dump(2) + "\n");
  RunRecord r;
  r.exit_code = out.exit_code;
  r.manifest = std::move(m);
  r.summary = std::move(out.summary);
  return r;
}

RunRecord rerun(const std::filesystem::path& manifest, const std::filesystem::path& out_dir) {
  const json m = parse_json(read_file(manifest), manifest.string());
  RunOptions opt;
  try {
    if (m.at("tool") != "hyplab") throw UsageError(manifest.string() + ": not a hyplab manifest");
    opt.seed = m.at("seed").get<std::uint64_t>();
    opt.workers = m.at("workers").get<int>();
    // The recorded config already carries the tolerance override.
    opt.out = out_dir;
    RunRecord r = execute(m.at("command").get<std::string>(), m.at("config"), opt);
    std::map<std::string, std::string> fresh;
    for (const auto& o : r.manifest["outputs"]) fresh[o["path"].get<std::string>()] = o["sha256"].get<std::string>();
    for (const auto& o : m.at("outputs")) {
      const std::string name = o.at("path").get<std::string>();
      const auto it = fresh.find(name);
      if (it == fresh.end() || it->second != o.at("sha256").get<std::string>()) {
        r.reproduced = false;
        r.summary.push_back("MISMATCH " + name);
      }
    }
    if (fresh.size() != m.at("outputs").size()) r.reproduced = false;
    r.summary.push_back(r.reproduced ? "all outputs reproduced byte-identically" : "outputs differ from the manifest");
    if (!r.reproduced) r.exit_code = kCounterexample;
    return r;
  } catch (const json::exception& e) {
    throw UsageError(manifest.string() + ": malformed manifest: " + e.what());
  }
}

}  // namespace hyplab::lab
