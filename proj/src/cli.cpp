#include "gapforge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "gapforge/appendix.hpp"
#include "gapforge/bounds.hpp"
#include "gapforge/errors.hpp"
#include "gapforge/galerkin.hpp"
#include "gapforge/models.hpp"
#include "gapforge/pool.hpp"
#include "gapforge/rng.hpp"
#include "gapforge/simulate.hpp"
#include "gapforge/topology.hpp"

namespace gapforge {

using Json = nlohmann::ordered_json;

namespace {

// Thrown by commands whose checks ran but failed.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { Double, Int, UInt, String, DoubleList, IntList };

struct Key {
  const char* name;
  Kind kind;
  const char* help;
};

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"model", Kind::String, "kernel: star, kmp, gg2, gg3, stick"},
      {"m", Kind::Double, "rate exponent m"},
      {"gamma", Kind::Double, "Gamma shape of the reversible law"},
      {"E", Kind::Double, "mean energy per site"},
      {"N", Kind::Int, "number of sites"},
      {"topology", Kind::String, "nearest or long-range"},
      {"method", Kind::String, "galerkin or mc"},
      {"degree", Kind::Int, "Galerkin polynomial degree (0: by N)"},
      {"quadrature_level", Kind::Int, "tanh-sinh level for non-polynomial kernels"},
      {"budget", Kind::UInt, "Monte Carlo event budget"},
      {"seed", Kind::UInt, "master seed (default GAPFORGE_SEED or 1)"},
      {"output", Kind::String, "output file, '-' for stdout"},
      {"run_dir", Kind::String, "append results and a manifest to this directory"},
      {"jobs", Kind::Int, "worker threads"},
      {"E_list", Kind::DoubleList, "mean energies"},
      {"N_list", Kind::IntList, "system sizes"},
      {"m_list", Kind::DoubleList, "rate exponents"},
      {"gamma_list", Kind::DoubleList, "Gamma shapes"},
      {"suite", Kind::String, "appendix, theorems or all"},
      {"format", Kind::String, "json or summary"},
      {"i", Kind::Int, "first site (1-based)"},
      {"j", Kind::Int, "second site (1-based)"},
      {"t_max", Kind::Double, "simulated time"},
      {"stride", Kind::Double, "time between snapshots"},
      {"M", Kind::Int, "Nystrom resolution"},
      {"n_max", Kind::Int, "appendix truncation index"},
  };
  return table;
}

const std::map<std::string, std::set<std::string>>& command_keys() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"gap", {"model", "m", "gamma", "E", "N", "topology", "method", "degree", "quadrature_level",
               "budget", "seed", "output", "run_dir"}},
      {"sweep", {"model", "m", "gamma", "E", "N", "topology", "method", "degree", "quadrature_level",
                 "budget", "seed", "output", "run_dir", "jobs", "E_list", "N_list", "m_list",
                 "gamma_list"}},
      {"kappa", {"m", "gamma", "degree", "n_max", "output", "run_dir"}},
      {"two-site", {"model", "m", "gamma", "M", "output", "run_dir"}},
      {"verify", {"suite", "format", "seed", "jobs", "output", "run_dir"}},
      {"simulate", {"model", "m", "gamma", "E", "N", "topology", "t_max", "stride", "seed", "output",
                    "run_dir"}},
      {"path", {"i", "j", "output", "run_dir"}},
  };
  return table;
}

const Key& find_key(const std::string& name) {
  for (const auto& k : keys())
    if (name == k.name) return k;
  throw ConfigError("unknown config key '" + name + "'");
}

template <class T>
T as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void set_key(ExperimentConfig& c, const std::string& key, const Json& v) {
  const Kind kind = find_key(key).kind;
  switch (kind) {
    case Kind::Double:
      if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
      break;
    case Kind::Int:
    case Kind::UInt:
      if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
      if (kind == Kind::UInt && v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw ConfigError("config key '" + key + "' must be nonnegative");
      break;
    case Kind::String:
      if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
      break;
    case Kind::DoubleList:
    case Kind::IntList:
      if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
      for (const auto& e : v)
        if (kind == Kind::IntList ? !e.is_number_integer() : !e.is_number())
          throw ConfigError("config key '" + key + "' has a non-numeric entry");
      break;
  }
  if (key == "model") c.model = as<std::string>(v, key);
  else if (key == "m") c.m = as<double>(v, key);
  else if (key == "gamma") c.gamma = as<double>(v, key);
  else if (key == "E") c.E = as<double>(v, key);
  else if (key == "N") c.N = as<int>(v, key);
  else if (key == "topology") c.topology = as<std::string>(v, key);
  else if (key == "method") c.method = as<std::string>(v, key);
  else if (key == "degree") c.degree = as<int>(v, key);
  else if (key == "quadrature_level") c.quadrature_level = as<int>(v, key);
  else if (key == "budget") c.budget = as<std::uint64_t>(v, key);
  else if (key == "seed") c.seed = as<std::uint64_t>(v, key);
  else if (key == "output") c.output = as<std::string>(v, key);
  else if (key == "run_dir") c.run_dir = as<std::string>(v, key);
  else if (key == "jobs") c.jobs = as<int>(v, key);
  else if (key == "E_list") c.E_list = as<std::vector<double>>(v, key);
  else if (key == "N_list") c.N_list = as<std::vector<int>>(v, key);
  else if (key == "m_list") c.m_list = as<std::vector<double>>(v, key);
  else if (key == "gamma_list") c.gamma_list = as<std::vector<double>>(v, key);
  else if (key == "suite") c.suite = as<std::string>(v, key);
  else if (key == "format") c.format = as<std::string>(v, key);
  else if (key == "i") c.i = as<int>(v, key);
  else if (key == "j") c.j = as<int>(v, key);
  else if (key == "t_max") c.t_max = as<double>(v, key);
  else if (key == "stride") c.stride = as<double>(v, key);
  else if (key == "M") c.M = as<int>(v, key);
  else if (key == "n_max") c.n_max = as<int>(v, key);
}

// Raw command-line text for one key, converted to JSON with the key's type.
Json parse_flag(const Key& key, const std::string& text) {
  auto number = [&](const std::string& s) -> Json {
    std::size_t used = 0;
    try {
      if (key.kind == Kind::Int || key.kind == Kind::IntList) {
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return Json(v);
      } else if (key.kind == Kind::UInt) {
        if (!s.empty() && s[0] != '-') {
          const unsigned long long v = std::stoull(s, &used);
          if (used == s.size()) return Json(v);
        }
      } else {
        const double v = std::stod(s, &used);
        if (used == s.size()) return Json(v);
      }
    } catch (const std::exception&) {
    }
    throw ConfigError("--" + std::string(key.name) + ": cannot parse '" + s + "'");
  };
  switch (key.kind) {
    case Kind::String: return Json(text);
    case Kind::Double:
    case Kind::Int:
    case Kind::UInt: return number(text);
    case Kind::DoubleList:
    case Kind::IntList: {
      Json arr = Json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) arr.push_back(number(item));
      return arr;
    }
  }
  return Json();
}

std::string flag_name(const char* key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double resolved_m(const ExperimentConfig& c) { return c.m ? *c.m : default_m(c.model); }
double resolved_gamma(const ExperimentConfig& c) {
  return c.gamma ? *c.gamma : default_gamma(c.model);
}

Json config_json(const ExperimentConfig& c) {
  const auto& allowed = command_keys().at(c.command);
  Json j;
  j["schema"] = kConfigSchema;
  j["command"] = c.command;
  auto put = [&](const char* k, Json v) {
    if (allowed.count(k)) j[k] = std::move(v);
  };
  put("model", c.model);
  put("m", resolved_m(c));
  put("gamma", resolved_gamma(c));
  put("E", c.E);
  put("N", c.N);
  put("topology", c.topology);
  put("method", c.method);
  put("degree", c.degree);
  put("quadrature_level", c.quadrature_level);
  put("budget", c.budget);
  put("seed", c.seed);
  put("output", c.output);
  put("run_dir", c.run_dir);
  put("jobs", c.jobs);
  put("E_list", c.E_list);
  put("N_list", c.N_list);
  put("m_list", c.m_list);
  put("gamma_list", c.gamma_list);
  put("suite", c.suite);
  put("format", c.format);
  put("i", c.i);
  put("j", c.j);
  put("t_max", c.t_max);
  put("stride", c.stride);
  put("M", c.M);
  put("n_max", c.n_max);
  return j;
}

void validate(const ExperimentConfig& c) {
  if (!(c.E > 0.0)) throw ConfigError("E must be positive");
  if (c.N < 2) throw ConfigError("N must be at least 2");
  if (c.degree < 0) throw ConfigError("degree must be nonnegative");
  if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (c.method != "galerkin" && c.method != "mc")
    throw ConfigError("method must be galerkin or mc");
  if (c.suite != "appendix" && c.suite != "theorems" && c.suite != "all")
    throw ConfigError("suite must be appendix, theorems or all");
  if (c.format != "json" && c.format != "summary") throw ConfigError("format must be json or summary");
  if (c.quadrature_level < 3 || c.quadrature_level > 12)
    throw ConfigError("quadrature_level must be in [3, 12]");
  parse_topology(c.topology);
  for (double E : c.E_list)
    if (!(E > 0.0)) throw ConfigError("E_list entries must be positive");
  for (int N : c.N_list)
    if (N < 2) throw ConfigError("N_list entries must be at least 2");
}

// ---------------------------------------------------------------------------
// Output plumbing

struct Emitted {
  std::string text;
  std::string extension;  // "csv" or "json"
};

void write_output(const ExperimentConfig& c, const Emitted& e, std::ostream& out) {
  if (c.output.empty() || c.output == "-") {
    out << e.text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + c.output + "'");
  f << e.text;
}

void append_manifest(const ExperimentConfig& c, const std::string& result_file, int exit_code,
                     const Json& extra) {
  namespace fs = std::filesystem;
  const fs::path manifest = fs::path(c.run_dir) / "manifest.jsonl";
  Json line;
  line["command"] = c.command;
  line["config"] = config_json(c);
  line["result"] = result_file;
  line["exit_code"] = exit_code;
  for (auto it = extra.begin(); it != extra.end(); ++it) line[it.key()] = it.value();
  std::ofstream f(manifest, std::ios::app | std::ios::binary);
  if (!f) throw ConfigError("cannot append to " + manifest.string());
  f << line.dump() << "\n";
}

int manifest_lines(const std::string& run_dir) {
  std::ifstream f(std::filesystem::path(run_dir) / "manifest.jsonl");
  int n = 0;
  std::string line;
  while (std::getline(f, line)) n += !line.empty();
  return n;
}

// Stores a non-sweep result as run-<seq>-<command>.<ext> and logs it.
void record_run(const ExperimentConfig& c, const Emitted& e, int exit_code) {
  if (c.run_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(c.run_dir);
  const int seq = manifest_lines(c.run_dir);
  char name[96];
  std::snprintf(name, sizeof name, "run-%04d-%s.%s", seq, c.command.c_str(), e.extension.c_str());
  std::ofstream f(fs::path(c.run_dir) / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write into run directory '" + c.run_dir + "'");
  f << e.text;
  append_manifest(c, name, exit_code, Json::object());
}

// ---------------------------------------------------------------------------
// Commands

const char* kSweepHeader = "model,m,gamma,E,N,topology,method,degree_or_budget,gap,err,seed";

struct GapRow {
  std::string model;
  double m = 0, gamma = 0, E = 0;
  int N = 0;
  std::string topology, method;
  std::uint64_t degree_or_budget = 0;
  double gap = 0, err = 0;
  std::uint64_t seed = 0;
  bool flagged = false;

  std::string key() const {
    return model + "," + fmt17(m) + "," + fmt17(gamma) + "," + fmt17(E) + "," + std::to_string(N) +
           "," + topology + "," + method + "," + std::to_string(degree_or_budget) + "," +
           std::to_string(seed);
  }
  std::string csv() const {
    return model + "," + fmt17(m) + "," + fmt17(gamma) + "," + fmt17(E) + "," + std::to_string(N) +
           "," + topology + "," + method + "," + std::to_string(degree_or_budget) + "," +
           fmt17(gap) + "," + fmt17(err) + "," + std::to_string(seed);
  }
};

GapRow compute_gap(const std::string& model, double m, double gamma, double E, int N,
                   const ExperimentConfig& c, std::uint64_t seed) {
  const ExchangeKernel kernel = make_kernel(model, m, gamma);
  const Topology topo(parse_topology(c.topology), N);
  const SimplexLaw law(GammaShape(gamma), E, N);
  GapRow r;
  r.model = model;
  r.m = m;
  r.gamma = gamma;
  r.E = E;
  r.N = N;
  r.topology = topo.name();
  r.method = c.method;
  r.seed = seed;
  if (c.method == "galerkin") {
    const int d = c.degree > 0 ? c.degree : default_degree(N);
    AssemblyOptions opt;
    opt.quadrature_level = c.quadrature_level;
    const auto g = galerkin_gap(kernel, topo, law, d, opt);
    r.degree_or_budget = static_cast<std::uint64_t>(d);
    r.gap = g.value;
    r.err = g.history.size() >= 2 ? std::abs(g.value - g.history[g.history.size() - 2]) : 0.0;
  } else {
    // The slowest Galerkin mode is the observable when the solve succeeds.
    std::vector<Observable> observables;
    try {
      const int d = c.degree > 0 ? c.degree : default_degree(N);
      AssemblyOptions opt;
      opt.quadrature_level = c.quadrature_level;
      observables.push_back(galerkin_observable(galerkin_gap(kernel, topo, law, d, opt), law));
    } catch (const NumericalError&) {
      observables = default_observables(law);
    }
    const auto g = estimate_gap_autocorr(kernel, topo, law, observables, c.budget, seed);
    r.degree_or_budget = c.budget;
    r.gap = g.value;
    r.err = g.stderr_;
    r.flagged = g.flagged;
  }
  return r;
}

int cmd_gap(const ExperimentConfig& c, std::ostream& out) {
  const GapRow r = compute_gap(c.model, resolved_m(c), resolved_gamma(c), c.E, c.N, c, c.seed);
  Emitted e{std::string(kSweepHeader) + "\n" + r.csv() + "\n", "csv"};
  write_output(c, e, out);
  const int code = r.flagged ? kExitNumerical : kExitOk;
  record_run(c, e, code);
  return code;
}

std::map<std::string, std::string> read_sweep_rows(const std::filesystem::path& file) {
  std::map<std::string, std::string> rows;
  std::ifstream f(file);
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (header) {
      header = false;
      if (line != kSweepHeader) throw ConfigError(file.string() + " has an unexpected header");
      continue;
    }
    if (line.empty()) continue;
    // Key: every column except gap and err (the 9th and 10th).
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 11) throw ConfigError(file.string() + " has a malformed row");
    std::string key;
    for (int k : {0, 1, 2, 3, 4, 5, 6, 7, 10}) key += (key.empty() ? "" : ",") + cols[k];
    rows[key] = line;
  }
  return rows;
}

int cmd_sweep(const ExperimentConfig& c, std::ostream& out) {
  const std::vector<double> ms = c.m_list.empty() ? std::vector<double>{resolved_m(c)} : c.m_list;
  const std::vector<double> gs =
      c.gamma_list.empty() ? std::vector<double>{resolved_gamma(c)} : c.gamma_list;
  const std::vector<double> Es = c.E_list.empty() ? std::vector<double>{c.E} : c.E_list;
  const std::vector<int> Ns = c.N_list.empty() ? std::vector<int>{c.N} : c.N_list;

  struct Job {
    double m, gamma, E;
    int N;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double m : ms)
    for (double g : gs)
      for (double E : Es)
        for (int N : Ns) jobs.push_back({m, g, E, N, 0});
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return std::tie(a.m, a.gamma, a.E, a.N) < std::tie(b.m, b.gamma, b.E, b.N);
  });
  // Seeds follow grid position, so they do not depend on --jobs.
  for (std::size_t k = 0; k < jobs.size(); ++k)
    jobs[k].seed = c.method == "mc" ? derive_seed(c.seed, k) : c.seed;

  namespace fs = std::filesystem;
  std::map<std::string, std::string> previous;
  fs::path store;
  if (!c.run_dir.empty()) {
    fs::create_directories(c.run_dir);
    store = fs::path(c.run_dir) / "sweep.csv";
    if (fs::exists(store)) previous = read_sweep_rows(store);
  }

  std::vector<std::size_t> todo;
  std::vector<std::string> lines(jobs.size());
  std::vector<GapRow> probe(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    GapRow key;
    key.model = c.model;
    key.m = jobs[k].m;
    key.gamma = jobs[k].gamma;
    key.E = jobs[k].E;
    key.N = jobs[k].N;
    key.topology = Topology(parse_topology(c.topology), jobs[k].N).name();
    key.method = c.method;
    key.degree_or_budget = c.method == "galerkin"
                               ? static_cast<std::uint64_t>(c.degree > 0 ? c.degree : default_degree(jobs[k].N))
                               : c.budget;
    key.seed = jobs[k].seed;
    auto it = previous.find(key.key());
    if (it != previous.end())
      lines[k] = it->second;
    else
      todo.push_back(k);
  }

  const auto rows = parallel_map<GapRow>(todo.size(), c.jobs, [&](std::size_t t) {
    const Job& j = jobs[todo[t]];
    return compute_gap(c.model, j.m, j.gamma, j.E, j.N, c, j.seed);
  });
  bool flagged = false;
  for (std::size_t t = 0; t < todo.size(); ++t) {
    lines[todo[t]] = rows[t].csv();
    flagged = flagged || rows[t].flagged;
  }

  std::string text = std::string(kSweepHeader) + "\n";
  for (const auto& l : lines) text += l + "\n";
  write_output(c, {text, "csv"}, out);

  const int code = flagged ? kExitNumerical : kExitOk;
  if (!store.empty()) {
    const bool fresh = !fs::exists(store);
    std::ofstream f(store, std::ios::app | std::ios::binary);
    if (!f) throw ConfigError("cannot append to " + store.string());
    if (fresh) f << kSweepHeader << "\n";
    for (std::size_t t = 0; t < todo.size(); ++t) f << rows[t].csv() << "\n";
    Json extra;
    extra["computed"] = todo.size();
    extra["reused"] = jobs.size() - todo.size();
    append_manifest(c, "sweep.csv", code, extra);
  }
  return code;
}

Json bracket_json(const BracketRecord& r) {
  Json j;
  j["gamma"] = r.bracket.gamma;
  j["q_form"] = to_string(r.bracket.form);
  j["lower"] = r.bracket.lower;
  j["upper"] = r.bracket.upper;
  j["width"] = r.bracket.width();
  j["inverted"] = r.inverted;
  j["pass"] = r.pass();
  j["lower_exceeds_third"] = r.bracket.lower > 1.0 / 3.0;
  j["sup_a"] = r.bracket.sup_a.certified_sup_upper;
  j["sup_b"] = r.bracket.sup_b.certified_sup_upper;
  j["tail_method"] = r.bracket.sup_a.tail_method;
  return j;
}

int cmd_kappa(const ExperimentConfig& c, std::ostream& out) {
  const double m = c.m.value_or(1.0);
  const double g = resolved_gamma(c);
  const int d = c.degree > 0 ? c.degree : 8;
  const KappaPair k = kappa(m, GammaShape(g), d);
  Json j;
  j["config"] = config_json(c);
  j["m"] = m;
  j["gamma"] = g;
  j["degree"] = d;
  j["kappa"] = k.kappa;
  j["kappa_tilde"] = k.kappa_tilde;
  j["kappa_provenance"] = "galerkin-upper";
  if (m == 1.0) {
    Json arr = Json::array();
    for (QForm form : {QForm::Consistent, QForm::Printed}) {
      BracketRecord r;
      try {
        r.bracket = kappa_tilde_1_bracket(GammaShape(g), c.n_max, d, form);
      } catch (const BracketInversionError& e) {
        r.bracket = e.bracket;
        r.inverted = true;
      }
      arr.push_back(bracket_json(r));
    }
    j["appendix_brackets"] = arr;
  }
  Emitted e{j.dump(2) + "\n", "json"};
  write_output(c, e, out);
  record_run(c, e, kExitOk);
  return kExitOk;
}

int cmd_two_site(const ExperimentConfig& c, std::ostream& out) {
  const double m = resolved_m(c), g = resolved_gamma(c);
  const auto t = two_site_constant(make_kernel(c.model, m, g), c.M);
  Json j;
  j["config"] = config_json(c);
  j["model"] = c.model;
  j["m"] = m;
  j["gamma"] = g;
  j["M"] = c.M;
  j["value"] = t.value;
  j["half_resolution_value"] = t.half_resolution_value;
  j["plateau"] = t.plateau();
  Emitted e{j.dump(2) + "\n", "json"};
  write_output(c, e, out);
  record_run(c, e, kExitOk);
  return kExitOk;
}

Json params_json(const std::vector<std::pair<std::string, double>>& params) {
  Json j = Json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

Json check_json(const TheoremCheck& t) {
  Json j;
  j["claim"] = t.claim;
  j["model"] = t.model;
  j["params"] = params_json(t.params);
  j["lhs"] = t.lhs;
  j["direction"] = to_string(t.direction);
  j["rhs"] = t.rhs;
  j["margin"] = t.margin();
  j["tolerance"] = t.tolerance;
  j["lhs_provenance"] = to_string(t.lhs_source);
  j["rhs_provenance"] = to_string(t.rhs_source);
  j["status"] = to_string(t.status);
  j["pass"] = t.pass();
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json proposition_json(const PropositionReport& p) {
  Json j;
  j["family"] = to_string(p.family);
  j["gamma"] = p.gamma.value();
  j["q_form"] = to_string(p.form);
  j["regime"] = p.regime;
  j["n_max"] = p.n_max;
  j["max_value"] = p.max_value;
  j["argmax"] = p.argmax;
  j["tail_bound"] = p.tail_bound;
  j["limit_raw"] = p.limit_raw;
  j["limit_estimate"] = p.limit_estimate;
  j["violations"] = p.violations.size();
  j["margin"] = p.margin();
  j["pass"] = p.pass();
  return j;
}

Json appendix_json(const AppendixSuiteReport& r) {
  Json j;
  j["pass"] = r.pass();
  j["failed"] = {{"constants", r.failed_constants()},
                 {"lemmas", r.failed_lemmas()},
                 {"propositions", r.failed_propositions()},
                 {"brackets", r.failed_brackets()}};
  Json consts = Json::array();
  for (const auto& c : r.constants)
    consts.push_back({{"name", c.name}, {"gamma", c.gamma}, {"n", c.n}, {"closed_form", c.closed_form},
                      {"reference", c.reference}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
  j["constants"] = consts;
  Json lem;
  lem["checked"] = r.lemmas.size();
  Json bad = Json::array();
  for (const auto& l : r.lemmas)
    if (!l.pass)
      bad.push_back({{"lemma", l.lemma}, {"gamma", l.gamma}, {"n", l.n}, {"lhs", l.lhs}, {"rhs", l.rhs}});
  lem["violations"] = bad;
  j["lemmas"] = lem;
  Json props = Json::array(), props_c = Json::array();
  for (const auto& p : r.propositions) props.push_back(proposition_json(p));
  for (const auto& p : r.propositions_consistent) props_c.push_back(proposition_json(p));
  j["propositions"] = props;
  j["propositions_consistent_q"] = props_c;
  Json br = Json::array();
  for (const auto& b : r.brackets) br.push_back(bracket_json(b));
  j["brackets"] = br;
  Json tb = Json::array();
  for (std::size_t k = 0; k < r.triple_basis.size(); ++k)
    tb.push_back({{"gamma", r.triple_basis_gammas[k]},
                  {"max_f1", r.triple_basis[k].max_f1},
                  {"max_cross_correlation", r.triple_basis[k].max_cross_correlation}});
  j["triple_basis"] = tb;
  return j;
}

std::string summary_csv(const AppendixSuiteReport* a, const std::vector<TheoremCheck>* t) {
  std::string s = "claim,params,lhs,rhs,margin,pass\n";
  auto row = [&](const std::string& claim, const std::string& params, double lhs, double rhs,
                 double margin, bool pass) {
    s += claim + "," + params + "," + fmt17(lhs) + "," + fmt17(rhs) + "," + fmt17(margin) + "," +
         (pass ? "1" : "0") + "\n";
  };
  if (a) {
    for (const auto& c : a->constants)
      row(c.name, "gamma=" + fmt17(c.gamma) + ";n=" + std::to_string(c.n), c.closed_form, c.reference,
          c.tolerance - std::abs(c.closed_form - c.reference), c.pass());
    row("lemma-suite", "checked=" + std::to_string(a->lemmas.size()), a->failed_lemmas(), 0.0,
        -a->failed_lemmas(), a->failed_lemmas() == 0);
    for (const auto& p : a->propositions)
      row(std::string("proposition-") + to_string(p.family),
          "gamma=" + fmt17(p.gamma.value()) + ";q=" + to_string(p.form), std::max(p.max_value, p.tail_bound),
          1.0, p.margin(), p.pass() && std::abs(p.limit_estimate - 0.5) <= 1e-2);
    for (const auto& b : a->brackets)
      row("kappa-tilde-1-bracket",
          "gamma=" + fmt17(b.bracket.gamma) + ";q=" + to_string(b.bracket.form), b.bracket.lower,
          b.bracket.upper, b.bracket.width(), b.pass());
  }
  if (t) {
    for (const auto& c : *t) {
      std::string params = "model=" + c.model;
      for (const auto& [k, v] : c.params) params += ";" + k + "=" + fmt17(v);
      row(c.claim, params, c.lhs, c.rhs, c.margin(), c.pass());
    }
  }
  return s;
}

int cmd_verify(const ExperimentConfig& c, std::ostream& out) {
  std::optional<AppendixSuiteReport> appendix;
  std::vector<TheoremCheck> theorems;
  const bool do_appendix = c.suite == "appendix" || c.suite == "all";
  const bool do_theorems = c.suite == "theorems" || c.suite == "all";
  if (do_appendix) {
    AppendixSuiteOptions o;
    o.seed = c.seed;
    appendix = run_appendix_suite(o);
  }
  bool theorems_pass = true;
  if (do_theorems) {
    TheoremSuiteOptions o;
    o.jobs = c.jobs;
    o.seed = c.seed;
    theorems = run_theorem_suite(o);
    for (const auto& t : theorems) theorems_pass = theorems_pass && t.pass();
  }
  const bool pass = (!appendix || appendix->pass()) && theorems_pass;

  Emitted e;
  if (c.format == "summary") {
    e = {summary_csv(appendix ? &*appendix : nullptr, do_theorems ? &theorems : nullptr), "csv"};
  } else {
    Json j;
    j["schema"] = kVerifySchema;
    j["config"] = config_json(c);
    j["suite"] = c.suite;
    j["pass"] = pass;
    if (appendix) j["appendix"] = appendix_json(*appendix);
    if (do_theorems) {
      Json arr = Json::array();
      for (const auto& t : theorems) arr.push_back(check_json(t));
      j["theorems"] = {{"pass", theorems_pass}, {"checks", arr}};
    }
    e = {j.dump(2) + "\n", "json"};
  }
  write_output(c, e, out);
  const int code = pass ? kExitOk : kExitVerification;
  record_run(c, e, code);
  return code;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out) {
  const double m = resolved_m(c), g = resolved_gamma(c);
  const ExchangeKernel kernel = make_kernel(c.model, m, g);
  const Topology topo(parse_topology(c.topology), c.N);
  const SimplexLaw law(GammaShape(g), c.E, c.N);
  if (!(c.t_max > 0.0) || !(c.stride > 0.0)) throw ConfigError("t_max and stride must be positive");
  Rng rng = make_stream(c.seed, 0);
  RunOptions opt;
  opt.sample_stride = c.stride;
  opt.record_events = false;
  const Trajectory traj = run(kernel, topo, law, c.t_max, rng, opt);
  std::ostringstream s;
  s.precision(17);
  write_trajectory_csv(traj, s);
  Emitted e{s.str(), "csv"};
  write_output(c, e, out);
  record_run(c, e, kExitOk);
  return kExitOk;
}

int cmd_path(const ExperimentConfig& c, std::ostream& out) {
  const MovingPath p = build_moving_path(c.i, c.j);
  const auto bad = moving_path_violations(p);
  Json j;
  j["i"] = p.i;
  j["j"] = p.j;
  j["K"] = p.K;
  j["sites"] = p.sites;
  Json swaps = Json::array();
  for (const auto& [a, b] : p.swaps()) swaps.push_back({a, b});
  j["swaps"] = swaps;
  j["violations"] = bad;
  Emitted e{j.dump(2) + "\n", "json"};
  write_output(c, e, out);
  const int code = bad.empty() ? kExitOk : kExitVerification;
  record_run(c, e, code);
  return code;
}

}  // namespace

double default_m(const std::string& model) {
  if (model == "gg2" || model == "gg3") return 0.5;
  if (model == "stick") return 1.0;
  return 0.0;
}

double default_gamma(const std::string& model) { return model == "gg3" ? 1.5 : 1.0; }

std::uint64_t seed_from_environment() {
  const char* env = std::getenv("GAPFORGE_SEED");
  if (!env || !*env) return 1;
  const std::string s = env;
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("GAPFORGE_SEED is not a nonnegative integer: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("GAPFORGE_SEED is not a nonnegative integer: '" + s + "'");
  return v;
}

void apply_config_json(ExperimentConfig& config, const std::string& json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schema") || j["schema"] != kConfigSchema)
    throw ConfigError(std::string("config needs \"schema\": \"") + kConfigSchema + "\"");
  if (j.contains("command") && j["command"] != config.command)
    throw ConfigError("config is for command '" + j["command"].dump() + "', not '" + config.command + "'");
  const auto& allowed = command_keys().at(config.command);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "schema" || it.key() == "command") continue;
    find_key(it.key());
    if (!allowed.count(it.key()))
      throw ConfigError("config key '" + it.key() + "' does not apply to '" + config.command + "'");
    set_key(config, it.key(), it.value());
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gapforge: spectral gaps of stochastic energy exchange models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gap", "compute one gap"},
      {"sweep", "grid of gaps over m, gamma, E and N"},
      {"kappa", "three-site constants by Galerkin and the Jacobi reduction"},
      {"two-site", "two-site constant of a kernel"},
      {"verify", "appendix suite, theorem harness, or both"},
      {"simulate", "trajectory dump"},
      {"path", "moving-particle path for sites i < j"},
  };
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::string> config_file;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs[name] = sub;
    sub->add_option("--config", config_file[name], "JSON config file")->check(CLI::ExistingFile);
    for (const auto& k : keys()) {
      if (!command_keys().at(name).count(k.name)) continue;
      opts[name][k.name] = sub->add_option(flag_name(k.name), raw[name][k.name], k.help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    ExperimentConfig c;
    c.command = command;
    c.seed = seed_from_environment();
    if (!config_file[command].empty()) {
      std::ifstream f(config_file[command]);
      std::stringstream ss;
      ss << f.rdbuf();
      apply_config_json(c, ss.str());
    }
    for (const auto& [key, opt] : opts[command])
      if (opt->count() > 0) set_key(c, key, parse_flag(find_key(key), raw[command][key]));
    validate(c);

    if (command == "gap") return cmd_gap(c, out);
    if (command == "sweep") return cmd_sweep(c, out);
    if (command == "kappa") return cmd_kappa(c, out);
    if (command == "two-site") return cmd_two_site(c, out);
    if (command == "verify") return cmd_verify(c, out);
    if (command == "simulate") return cmd_simulate(c, out);
    if (command == "path") return cmd_path(c, out);
    throw ConfigError("no command");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace gapforge
