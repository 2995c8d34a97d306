#include "hyplab/lab.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace hyplab::lab {

namespace {

std::string flag_name(const std::string& key) {
  if (key == "h") return "h-values";  // -h is help
  std::string s = key;
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

// Typed field when it parses as JSON, plain string otherwise.
json parse_value(const std::string& text, const json& def) {
  if (def.is_string()) return text;
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

void set_path(json& root, const std::string& dotted, const json& v) {
  json* cur = &root;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dot - pos);
    if (key.empty()) throw UsageError("-p: empty key in '" + dotted + "'");
    if (dot == std::string::npos) {
      (*cur)[key] = v;
      return;
    }
    cur = &(*cur)[key];
    if (!cur->is_object()) *cur = json::object();
    pos = dot + 1;
  }
}

const json& default_at(const json& defaults, const std::string& dotted) {
  static const json none;
  const json* cur = &defaults;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dot - pos);
    if (!cur->is_object() || !cur->contains(key)) return none;
    cur = &(*cur)[key];
    if (dot == std::string::npos) return *cur;
    pos = dot + 1;
  }
}

struct SubState {
  const CommandInfo* info = nullptr;
  CLI::App* app = nullptr;
  std::string config_file;
  std::vector<std::string> params;
  std::map<std::string, std::string> flags;  // config key -> raw text
  std::string setfile;
  std::string lemma, lemma_mode;
  int trials = -1;
};

void print_summary(const RunRecord& r, const std::filesystem::path& out) {
  for (const auto& s : r.summary) std::cout << s << "\n";
  std::cout << "wrote " << out.string() << "/manifest.json, exit " << r.exit_code << "\n";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"hyplab: numerical laboratory for hyperbolic frame flows, porosity and fractal uncertainty"};
  app.set_version_flag("--version", std::string("hyplab ") + kToolVersion);
  app.require_subcommand(1);
  RunOptions opt;
  std::string out = opt.out.string();
  double tol = 0;
  app.add_option("--seed", opt.seed, "random seed")->capture_default_str();
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--workers", opt.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  auto* tol_opt = app.add_option("--tol", tol, "override every tolerance field");

  std::vector<SubState> subs(commands().size());
  for (std::size_t i = 0; i < commands().size(); ++i) {
    const CommandInfo& c = commands()[i];
    SubState& st = subs[i];
    st.info = &c;
    st.app = app.add_subcommand(c.name, c.help);
    st.app->fallthrough();
    st.app->add_option("--config", st.config_file, "JSON config file");
    st.app->add_option("-p,--param", st.params, "override a config field: key=value (dotted keys for nested fields)");
    for (auto it = c.defaults.begin(); it != c.defaults.end(); ++it) {
      if (it.value().is_object() || it.key() == "set" || it.key() == "lemma") continue;
      st.app->add_option("--" + flag_name(it.key()), st.flags[it.key()], "config field " + it.key());
    }
    if (c.name == "porosity-check") {
      st.app->add_option("setfile", st.setfile, "set spec JSON file");
      st.app->add_option("--lemma", st.lemma, "run randomized lemma trials: affine, neighborhood or bilipschitz");
      st.app->add_option("--lemma-mode", st.lemma_mode, "ball, line or both");
      st.app->add_option("--trials", st.trials, "trials per lemma mode");
    }
  }
  auto* list = app.add_subcommand("list", "list commands and their default configs");
  std::string manifest;
  auto* rr = app.add_subcommand("rerun", "re-run a manifest and compare output digests");
  rr->fallthrough();
  rr->add_option("manifest", manifest, "manifest.json of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  opt.out = out;
  if (*tol_opt) opt.tol = tol;

  try {
    if (*list) {
      for (const auto& c : commands()) std::cout << c.name << "  " << c.help << "\n  " << c.defaults.dump() << "\n";
      return kPass;
    }
    if (*rr) {
      const RunRecord r = rerun(manifest, opt.out);
      print_summary(r, opt.out);
      return r.exit_code;
    }
    for (auto& st : subs) {
      if (!st.app->parsed()) continue;
      json user = json::object();
      std::vector<std::filesystem::path> inputs;
      if (!st.config_file.empty()) {
        user = parse_json(read_file(st.config_file), st.config_file);
        inputs.emplace_back(st.config_file);
      }
      for (const auto& [key, text] : st.flags)
        if (st.app->count("--" + flag_name(key))) user[key] = parse_value(text, st.info->defaults.at(key));
      if (!st.setfile.empty()) {
        user["set"] = parse_json(read_file(st.setfile), st.setfile);
        inputs.emplace_back(st.setfile);
      }
      if (!st.lemma.empty()) {
        json l{{"kind", st.lemma}};
        if (!st.lemma_mode.empty()) l["mode"] = st.lemma_mode;
        if (st.trials >= 0) l["trials"] = st.trials;
        user["lemma"] = l;
      }
      for (const auto& p : st.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("-p expects key=value, got '" + p + "'");
        const std::string key = p.substr(0, eq);
        set_path(user, key, parse_value(p.substr(eq + 1), default_at(st.info->defaults, key)));
      }
      const RunRecord r = execute(st.info->name, user, opt, inputs);
      print_summary(r, opt.out);
      return r.exit_code;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CertificationError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hyplab::lab
