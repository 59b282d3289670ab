#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nhdeg/finder.hpp"
#include "nhdeg/model.hpp"
#include "nhdeg/report.hpp"
#include "nhdeg/slab.hpp"
#include "nhdeg/spectral.hpp"
#include "nhdeg/symmetry.hpp"

using namespace nhdeg;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---- parsing helpers ----

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Accepts a plain number or a number followed by "pi" (e.g. 0.5pi).
double parse_number(const std::string& raw, const std::string& what) {
  std::string s = trim(raw);
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = kPi;
    s = trim(s.substr(0, s.size() - 2));
    if (s.empty() || s == "+") s = "1";
    if (s == "-") s = "-1";
  }
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v * scale;
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + " '" + raw + "'");
  }
}

// "a,b,c" in units of pi.
Momentum parse_momentum(const std::string& s) {
  const auto parts = split(s, ",");
  if (parts.size() != 3) throw UsageError("malformed momentum '" + s + "' (expected kx,ky,kz in units of pi)");
  Momentum k;
  for (int i = 0; i < 3; ++i) k[i] = parse_number(parts[i], "momentum component") * kPi;
  return k;
}

// zoo:NAME?p=v&q=w, or a path to a model JSON file.
ModelSpec load_model(const std::string& ref) {
  if (ref.rfind("zoo:", 0) == 0) {
    const std::string body = ref.substr(4);
    const auto q = body.find('?');
    const std::string name = body.substr(0, q);
    std::map<std::string, double> params;
    if (q != std::string::npos) {
      for (const std::string& kv : split(body.substr(q + 1), "&")) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("malformed model parameter '" + kv + "'");
        params[kv.substr(0, eq)] = parse_number(kv.substr(eq + 1), "parameter value");
      }
    }
    return zoo(name, params);
  }
  return load_model_file(ref);
}

// Matrix file: JSON array of rows, entries either numbers or [re, im].
CMatrix load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open generator file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("generator file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_array() || j.empty()) throw UsageError("generator file must hold a non-empty array of rows");
  const size_t n = j.size();
  CMatrix m(n, n);
  for (size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw UsageError("generator matrix must be square");
    for (size_t c = 0; c < n; ++c) {
      const json& e = j[r][c];
      if (e.is_number()) m(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        m(r, c) = cd(e[0].get<double>(), e[1].get<double>());
      else throw UsageError("generator entries must be numbers or [re, im] pairs");
    }
  }
  return m;
}

// ---- output ----

std::string csv_num(double x) { return format_double(x); }

struct Output {
  std::string path = "-";
  std::string payload;
  long records = 0;
};

struct Run {
  std::string command;
  std::vector<std::string> argv;
  std::string model_ref;
  ModelSpec model;
  json config = json::object();
  Output out;
};

json manifest_for(const Run& run, double seconds) {
  json params = json::object();
  for (const auto& [k, v] : run.model.params) params[k] = v;
  return {{"command", run.command},
          {"argv", run.argv},
          {"model", {{"ref", run.model_ref}, {"name", run.model.name}, {"bands", run.model.n}, {"params", params}}},
          {"config", run.config},
          {"tool_version", kVersion},
          {"wall_time_s", seconds},
          {"record_count", run.out.records},
          {"output", run.out.path}};
}

// The payload goes to --out (or stdout); the manifest goes next to it so the
// payload itself stays byte-stable.
void emit(const Run& run, double seconds) {
  const std::string manifest = manifest_for(run, seconds).dump(2) + "\n";
  if (run.out.path == "-") {
    std::cout << run.out.payload << std::flush;
    std::cerr << manifest;
    return;
  }
  std::ofstream f(run.out.path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + run.out.path + "'");
  f << run.out.payload;
  std::ofstream m(run.out.path + ".manifest.json", std::ios::binary);
  if (!m) throw UsageError("cannot write '" + run.out.path + ".manifest.json'");
  m << manifest;
}

// ---- commands ----

struct Options {
  std::string model;
  std::string out = "-";
  int threads = 1;
  int grid = 0;  // 0: model default
  long seed = 0;
  double tol = -1;  // negative: command default

  // bands
  std::string path;
  int samples = 100;

  // scan / classify
  int order = 0;
  bool include_defective = false;
  std::string k;

  // surfaces
  std::vector<std::string> fields;
  std::vector<std::string> slices;
  bool joint = false;

  // obc
  std::string axis = "y";
  int sites = kDefaultSlabSites;
  std::string sweep = "z";
  std::string from = "-1", to = "1";
  int steps = 41;
  std::string kperp = "0,0,0";
  int width = kDefaultEdgeWidth;
  double threshold = kDefaultEdgeThreshold;

  // symcheck
  std::string symmetry;
  std::string generator;
  int sym_samples = 1000;
};

ScanConfig scan_config(const Options& o, int bands) {
  ScanConfig cfg = default_scan_config(bands);
  if (o.grid > 0) cfg.grid = o.grid;
  if (o.tol > 0) cfg.refine_tol = o.tol;
  cfg.threads = o.threads;
  cfg.include_defective = o.include_defective;
  cfg.validate();
  return cfg;
}

void cmd_bands(const Options& o, Run& run) {
  std::vector<Momentum> way;
  for (const std::string& w : split(o.path, ";"))
    if (!trim(w).empty()) way.push_back(parse_momentum(w));
  if (way.size() < 2) throw UsageError("--path needs at least two waypoints separated by ';'");
  if (o.samples < 1) throw UsageError("--samples must be positive");
  run.config = {{"path", o.path}, {"samples", o.samples}};

  std::ostringstream csv;
  csv << "arc_index,kx,ky,kz,band_index,re_E,im_E\n";
  long idx = 0;
  for (size_t s = 0; s + 1 < way.size(); ++s) {
    const int last = s + 2 == way.size() ? o.samples : o.samples - 1;
    for (int i = 0; i <= last; ++i) {
      const double t = static_cast<double>(i) / o.samples;
      Momentum k;
      for (int a = 0; a < 3; ++a) k[a] = way[s][a] + t * (way[s + 1][a] - way[s][a]);
      const std::vector<cd> ev = eigenvalues(eval_bloch(run.model, k));
      for (size_t b = 0; b < ev.size(); ++b)
        csv << idx << ',' << csv_num(k[0]) << ',' << csv_num(k[1]) << ',' << csv_num(k[2]) << ',' << b << ','
            << csv_num(ev[b].real()) << ',' << csv_num(ev[b].imag()) << '\n';
      ++idx;
    }
  }
  run.out.payload = csv.str();
  run.out.records = idx;
}

void cmd_scan(const Options& o, Run& run) {
  const ScanConfig cfg = scan_config(o, run.model.n);
  const int order = o.order > 0 ? o.order : run.model.n;
  run.config = to_json(cfg);
  run.config["order"] = order;
  const ScanResult r = scan_degeneracies(run.model, cfg, order);
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  const ParityReport parity = pair_count_check(r.records);
  json doc = {{"records", records},
              {"scan", to_json(r.diagnostics)},
              {"nondefective_count", parity.nondefective_count},
              {"nondefective_even", parity.even}};
  run.out.payload = doc.dump(2) + "\n";
  run.out.records = static_cast<long>(r.records.size());
}

void cmd_classify(const Options& o, Run& run) {
  if (o.k.empty()) throw UsageError("--k is required");
  const ScanConfig cfg = scan_config(o, run.model.n);
  run.config = to_json(cfg);
  run.config["k"] = o.k;
  const DegeneracyRecord rec = classify_degeneracy(run.model, parse_momentum(o.k), cfg);
  run.out.payload = to_json(rec).dump(2) + "\n";
  run.out.records = 1;
}

void cmd_surfaces(const Options& o, Run& run) {
  if (o.fields.empty()) throw UsageError("--field is required");
  for (const std::string& f : o.fields) {
    try {
      validate_field(f, run.model.n);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (o.joint && o.fields.size() != 2) throw UsageError("--joint needs exactly two fields");
  GridSpec grid = GridSpec::full(o.grid > 0 ? o.grid : 61);
  if (grid.axes[0].count < 2) throw UsageError("--grid must be at least 2");
  for (const std::string& s : o.slices) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw UsageError("malformed --slice '" + s + "' (expected axis=value)");
    int axis;
    try {
      axis = axis_index(trim(s.substr(0, eq)));
    } catch (const std::invalid_argument&) {
      throw UsageError("unknown slice axis in '" + s + "'");
    }
    grid.slice(axis, parse_number(s.substr(eq + 1), "slice value") * kPi);
  }
  run.config = {{"fields", o.fields}, {"grid", grid.axes[0].count}, {"slices", o.slices}, {"joint", o.joint}};

  std::ostringstream csv;
  csv << "kx,ky,kz,field\n";
  long rows = 0;
  auto put = [&](const Momentum& p, const std::string& name) {
    csv << csv_num(p[0]) << ',' << csv_num(p[1]) << ',' << csv_num(p[2]) << ',' << name << '\n';
    ++rows;
  };
  if (o.joint) {
    for (const Momentum& p : joint_zero_cells(run.model, o.fields[0], o.fields[1], grid, o.threads))
      put(p, o.fields[0] + "&" + o.fields[1]);
  } else {
    for (const std::string& f : o.fields)
      for (const Momentum& p : zero_set_sample(run.model, f, grid, o.threads)) put(p, f);
  }
  run.out.payload = csv.str();
  run.out.records = rows;
}

int parse_axis(const std::string& s, const char* flag) {
  try {
    return axis_index(s);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string(flag) + " must be x, y or z");
  }
}

void cmd_obc(const Options& o, Run& run) {
  const int open = parse_axis(o.axis, "--axis");
  const int sweep = parse_axis(o.sweep, "--sweep");
  if (sweep == open) throw UsageError("--sweep must differ from the open axis");
  if (o.sites < 2) throw UsageError("--sites must be at least 2");
  if (o.steps < 1) throw UsageError("--steps must be positive");
  if (o.width < 1) throw UsageError("--width must be positive");
  const double from = parse_number(o.from, "--from"), to = parse_number(o.to, "--to");
  Momentum kp = parse_momentum(o.kperp);
  run.config = {{"axis", o.axis},   {"sites", o.sites}, {"sweep", o.sweep},         {"from", o.from},
                {"to", o.to},       {"steps", o.steps}, {"kperp", o.kperp},         {"width", o.width},
                {"threshold", o.threshold}};

  std::ostringstream csv;
  csv << "sweep,state_index,re_E,im_E,edge_weight,boundary\n";
  long rows = 0;
  for (int s = 0; s < o.steps; ++s) {
    const double v = o.steps == 1 ? from : from + (to - from) * s / (o.steps - 1);
    kp[sweep] = v * kPi;
    SlabHamiltonian slab;
    try {
      slab = obc_hamiltonian(run.model, open, o.sites, kp);
    } catch (const UnsupportedError& e) {
      throw UsageError(e.what());
    }
    const std::vector<SlabState> states = slab_spectrum(slab, o.width);
    for (size_t i = 0; i < states.size(); ++i) {
      csv << csv_num(v * kPi) << ',' << i << ',' << csv_num(states[i].energy.real()) << ','
          << csv_num(states[i].energy.imag()) << ',' << csv_num(states[i].edge_weight) << ','
          << (states[i].edge_weight > o.threshold ? 1 : 0) << '\n';
      ++rows;
    }
  }
  run.out.payload = csv.str();
  run.out.records = rows;
}

// Returns false when the check fails.
bool cmd_symcheck(const Options& o, Run& run) {
  if (o.symmetry.empty()) throw UsageError("--symmetry is required");
  if (o.sym_samples < 1) throw UsageError("--samples must be positive");
  SymmetryKind kind;
  try {
    kind = parse_symmetry_kind(o.symmetry);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  SymmetrySpec spec;
  try {
    spec = o.generator.empty() ? default_symmetry(kind, run.model.n)
                               : make_symmetry(kind, load_matrix_file(o.generator));
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (spec.generator.rows() != run.model.n) throw UsageError("generator size does not match the band count");
  const double tol = o.tol > 0 ? o.tol : 1e-10;
  run.config = {{"symmetry", symmetry_kind_name(kind)},
                {"generator", o.generator.empty() ? "default" : o.generator},
                {"samples", o.sym_samples},
                {"tol", tol},
                {"seed", o.seed}};
  const SymmetryCheck check = verify_symmetry(run.model, spec, o.sym_samples, tol, 1 + o.seed);
  json doc = to_json(check);
  doc["symmetry"] = symmetry_kind_name(kind);
  run.out.payload = doc.dump(2) + "\n";
  run.out.records = 1;
  return check.pass;
}

void cmd_zoo_list(Run& run) {
  json list = json::array();
  for (const ZooEntry& e : zoo_entries()) {
    json defaults = json::object();
    for (const auto& [k, v] : e.defaults) defaults[k] = v;
    list.push_back({{"name", e.name},
                    {"bands", e.bands},
                    {"defaults", defaults},
                    {"from_paper", e.from_paper},
                    {"summary", e.summary}});
  }
  run.out.payload = list.dump(2) + "\n";
  run.out.records = static_cast<long>(list.size());
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({std::isfinite(m(r, c).real()) ? json(m(r, c).real()) : json(format_double(m(r, c).real())),
                     std::isfinite(m(r, c).imag()) ? json(m(r, c).imag()) : json(format_double(m(r, c).imag()))});
    rows.push_back(row);
  }
  return rows;
}

int run_cli(std::vector<std::string> args);

int run_replay(const std::string& manifest_path, const std::string& out_override) {
  std::ifstream in(manifest_path);
  if (!in) throw UsageError("cannot open manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw UsageError("manifest has no argv");
  std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args[0] == "replay") throw UsageError("manifest records a replay");
  if (!out_override.empty()) {
    bool replaced = false;
    for (size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--out" || args[i] == "-o") args[i + 1] = out_override, replaced = true;
    if (!replaced) args.insert(args.end(), {"--out", out_override});
  }
  return run_cli(args);
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Degeneracy finder for non-Hermitian Bloch Hamiltonians"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;

  auto common = [&](CLI::App* c, bool grid, bool model = true) {
    if (model) c->add_option("--model,-m", o.model, "zoo:NAME?param=value or a model JSON file")->required();
    c->add_option("--out,-o", o.out, "output file, '-' for stdout");
    c->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));
    if (grid) c->add_option("--grid", o.grid, "grid points per axis");
  };

  auto* bands = app.add_subcommand("bands", "eigenvalues along a momentum path");
  common(bands, false);
  bands->add_option("--path", o.path, "waypoints 'kx,ky,kz;kx,ky,kz;...' in units of pi")->required();
  bands->add_option("--samples", o.samples, "samples per segment");

  auto* scan = app.add_subcommand("scan", "find and classify degeneracies over the Brillouin zone");
  common(scan, true);
  scan->add_option("--order", o.order, "degeneracy order to target (default: band count)");
  scan->add_option("--tol", o.tol, "refinement target for the objective");
  scan->add_flag("--include-defective", o.include_defective, "also report defective landings");

  auto* classify = app.add_subcommand("classify", "classify a given degeneracy");
  common(classify, false);
  classify->add_option("--k", o.k, "momentum 'kx,ky,kz' in units of pi")->required();
  classify->add_option("--tol", o.tol, "refinement tolerance");

  auto* surfaces = app.add_subcommand("surfaces", "zero sets of real scalar fields");
  common(surfaces, true);
  surfaces->add_option("--field", o.fields, "field name (repeatable)")->required();
  surfaces->add_option("--slice", o.slices, "pin an axis, e.g. x=0 (units of pi)");
  surfaces->add_flag("--joint", o.joint, "emit cells where both fields change sign");

  auto* obc = app.add_subcommand("obc", "slab spectrum with open boundaries");
  common(obc, false);
  obc->add_option("--axis", o.axis, "open axis");
  obc->add_option("--sites", o.sites, "slab thickness");
  obc->add_option("--sweep", o.sweep, "swept momentum axis");
  obc->add_option("--from", o.from, "sweep start (units of pi)");
  obc->add_option("--to", o.to, "sweep end (units of pi)");
  obc->add_option("--steps", o.steps, "sweep points");
  obc->add_option("--kperp", o.kperp, "fixed momenta 'kx,ky,kz' (units of pi)");
  obc->add_option("--width", o.width, "boundary layer width in sites");
  obc->add_option("--threshold", o.threshold, "edge weight marking a boundary state");

  auto* symcheck = app.add_subcommand("symcheck", "check a symmetry relation on a low-discrepancy sample");
  common(symcheck, false);
  symcheck->add_option("--symmetry", o.symmetry, "PT, CP, psH or TRSdag")->required();
  symcheck->add_option("--generator", o.generator, "generator matrix JSON file (default: table generator)");
  symcheck->add_option("--samples", o.sym_samples, "sample count");
  symcheck->add_option("--tol", o.tol, "residual tolerance");
  symcheck->add_option("--seed", o.seed, "offset into the sample sequence")->check(CLI::NonNegativeNumber);

  auto* zoo_list = app.add_subcommand("zoo-list", "list built-in models");
  common(zoo_list, false, false);

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest file")->required();
  std::string replay_out;
  replay->add_option("--out,-o", replay_out, "override the recorded output path");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (replay->parsed()) return run_replay(manifest_path, replay_out);

  const auto start = std::chrono::steady_clock::now();
  Run run;
  run.argv = args;
  run.out.path = o.out;
  run.model_ref = o.model;
  int code = 0;
  if (zoo_list->parsed()) {
    run.command = "zoo-list";
    cmd_zoo_list(run);
  } else {
    try {
      run.model = load_model(o.model);
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (bands->parsed()) run.command = "bands", cmd_bands(o, run);
    else if (scan->parsed()) run.command = "scan", cmd_scan(o, run);
    else if (classify->parsed()) run.command = "classify", cmd_classify(o, run);
    else if (surfaces->parsed()) run.command = "surfaces", cmd_surfaces(o, run);
    else if (obc->parsed()) run.command = "obc", cmd_obc(o, run);
    else if (symcheck->parsed()) run.command = "symcheck", code = cmd_symcheck(o, run) ? 0 : 1;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(run, seconds);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const NumericFailure& e) {
    std::cerr << json({{"error", "numeric_failure"}, {"message", e.what()}, {"matrix", matrix_json(e.matrix)}}).dump(2)
              << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
