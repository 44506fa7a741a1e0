// Command-line front end: one subcommand per process, JSON/CSV outputs with
// full config echo. Identical configs produce byte-identical primary output
// regardless of --threads/--kernel, which are execution hints and are not
// echoed.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qclab/covergraph.hpp"
#include "qclab/fuchsian.hpp"
#include "qclab/qdiff.hpp"
#include "qclab/torusmodel.hpp"
#include "qclab/version.hpp"

using nlohmann::json;
using nlohmann::ordered_json;
using namespace qclab;

namespace {

int g_exit_code = 0;

// ---------------------------------------------------------------- plumbing

struct Plumb {
  int threads = 1;
  std::string kernel = "auto";
  std::string out;
};

std::string dtos(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

complexd parse_complex(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
    throw std::invalid_argument("complex value must be 're,im': '" + s + "'");
  return complexd(parse_double(s.substr(0, comma)),
                  parse_double(s.substr(comma + 1)));
}

ordered_json json_complex(complexd z) {
  return ordered_json::array({z.real(), z.imag()});
}

void write_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << text;
  if (!f) throw std::runtime_error("failed writing output file: " + out_path);
}

void emit_envelope(const std::string& sub, const ordered_json& cfg,
                   const char* key, const ordered_json& payload,
                   const Plumb& pl) {
  ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["tool"] = kToolName;
  out["version"] = kVersion;
  out["subcommand"] = sub;
  out["seed"] = cfg.contains("seed") ? cfg.at("seed") : ordered_json(12345);
  out["config"] = cfg;
  out[key] = payload;
  write_text(out.dump(2) + "\n", pl.out);
}

// ------------------------------------------------------------- config table

enum class FieldType { Int, Dbl, Str, Cplx, StrList, JsonVal };

struct FieldSpec {
  const char* key;
  FieldType type;
  ordered_json def;  // null (and required=true) or the default value
  bool required = false;
  const char* help = "";
};

struct FieldHolder {
  const FieldSpec* spec = nullptr;
  std::string raw;                    // scalar field value
  std::vector<std::string> raw_list;  // StrList field values
  CLI::Option* opt = nullptr;
};

ordered_json convert_flag(const FieldHolder& h) {
  switch (h.spec->type) {
    case FieldType::Int:
      return parse_int(h.raw);
    case FieldType::Dbl:
      return parse_double(h.raw);
    case FieldType::Str:
      return h.raw;
    case FieldType::Cplx:
      parse_complex(h.raw);  // validate now, keep the string form
      return h.raw;
    case FieldType::StrList:
      return ordered_json(h.raw_list);
    case FieldType::JsonVal:
      return ordered_json(json::parse(h.raw));
  }
  throw std::logic_error("unreachable");
}

ordered_json convert_config(const FieldSpec& f, const json& v) {
  auto type_error = [&](const char* want) {
    return std::invalid_argument("config key '" + std::string(f.key) +
                                 "' must be " + want);
  };
  switch (f.type) {
    case FieldType::Int:
      if (!v.is_number_integer() && !v.is_number_unsigned())
        throw type_error("an integer");
      return ordered_json(v.get<long long>());
    case FieldType::Dbl:
      if (!v.is_number()) throw type_error("a number");
      return ordered_json(v.get<double>());
    case FieldType::Str:
      if (!v.is_string()) throw type_error("a string");
      return ordered_json(v.get<std::string>());
    case FieldType::Cplx:
      if (!v.is_string()) throw type_error("a 're,im' string");
      parse_complex(v.get<std::string>());
      return ordered_json(v.get<std::string>());
    case FieldType::StrList:
      if (v.is_string()) return ordered_json::array({v.get<std::string>()});
      if (!v.is_array()) throw type_error("a string or array of strings");
      for (const auto& e : v)
        if (!e.is_string()) throw type_error("an array of strings");
      return ordered_json(v);
    case FieldType::JsonVal:
      return ordered_json(v);
  }
  throw std::logic_error("unreachable");
}

/// Merges defaults, an optional config file, and command-line flags into the
/// effective config, enforcing the config-xor-flags rule and the schema.
ordered_json resolve_config(const std::string& sub,
                            const std::vector<FieldSpec>& fields,
                            const std::vector<FieldHolder>& holders,
                            const std::string& config_path) {
  ordered_json cfg;
  for (const auto& f : fields) cfg[f.key] = f.def;

  bool any_flag = false;
  for (const auto& h : holders)
    if (h.opt->count() > 0) any_flag = true;

  if (!config_path.empty()) {
    if (any_flag)
      throw std::invalid_argument(
          "--config and per-parameter flags are mutually exclusive");
    std::ifstream f(config_path);
    if (!f)
      throw std::invalid_argument("cannot read config file: " + config_path);
    json file = json::parse(f);
    if (!file.is_object())
      throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [k, v] : file.items()) {
      const FieldSpec* spec = nullptr;
      for (const auto& fs : fields)
        if (k == fs.key) spec = &fs;
      if (!spec)
        throw std::invalid_argument("unknown config key '" + k + "' for " +
                                    sub);
      cfg[spec->key] = convert_config(*spec, v);
    }
  } else {
    for (const auto& h : holders)
      if (h.opt->count() > 0) cfg[h.spec->key] = convert_flag(h);
  }

  for (const auto& f : fields)
    if (f.required && cfg[f.key].is_null())
      throw std::invalid_argument(std::string("missing required parameter '") +
                                  f.key + "' for " + sub);
  return cfg;
}

// ------------------------------------------------------------ shared pieces

std::size_t to_budget(const ordered_json& v, const char* key) {
  long long n = v.get<long long>();
  if (n < 1) throw std::invalid_argument(std::string(key) + " must be >= 1");
  return static_cast<std::size_t>(n);
}

FuchsianGroup build_group(const std::string& spec) {
  const std::string prefix = "preset:";
  if (spec.rfind(prefix, 0) == 0)
    return FuchsianGroup::preset(spec.substr(prefix.size()));
  std::ifstream f(spec);
  if (!f)
    throw std::invalid_argument(
        "group spec is neither 'preset:<name>' nor a readable file: " + spec);
  json doc = json::parse(f);
  std::string model_name = doc.value("model", "halfplane");
  Model model;
  if (model_name == "halfplane") {
    model = Model::HalfPlane;
  } else if (model_name == "disk") {
    model = Model::Disk;
  } else {
    throw std::invalid_argument("group model must be 'halfplane' or 'disk'");
  }
  if (!doc.contains("generators") || !doc.at("generators").is_array())
    throw std::invalid_argument("group file needs a 'generators' array");
  std::vector<Moebius> gens;
  for (const auto& m : doc.at("generators")) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() ||
        !m[1].is_array() || m[0].size() != 2 || m[1].size() != 2)
      throw std::invalid_argument(
          "each generator must be a 2x2 matrix [[a,b],[c,d]]");
    gens.emplace_back(m[0][0].get<double>(), m[0][1].get<double>(),
                      m[1][0].get<double>(), m[1][1].get<double>());
  }
  std::vector<std::string> names;
  if (doc.contains("names"))
    names = doc.at("names").get<std::vector<std::string>>();
  FuchsianGroup g = FuchsianGroup::from_generators(model, std::move(gens),
                                                   std::move(names));
  ValidationReport rep = validate_schottky(g);
  if (!rep.ok) {
    std::string msg = "group file fails the circle/ping-pong checks:";
    for (const auto& v : rep.violations) msg += "\n  - " + v;
    throw std::invalid_argument(msg);
  }
  return g;
}

kernels::Kind kernel_of(const Plumb& pl) {
  return kernels::parse_kind(pl.kernel);
}

QuadratureSpec grid_of(const ordered_json& cfg) {
  long long n = cfg.at("grid-n").get<long long>();
  if (n < 4 || n > 8192)
    throw std::invalid_argument("grid-n must be in [4, 8192]");
  return QuadratureSpec{static_cast<int>(n), static_cast<int>(n), 1.0 - 1e-4};
}

CoverGraph schreier_from_cfg(const ordered_json& cfg);

CoverGraph build_graph(const ordered_json& cfg) {
  std::string family = cfg.at("family").get<std::string>();
  std::string head = family, arg;
  if (auto colon = family.find(':'); colon != std::string::npos) {
    head = family.substr(0, colon);
    arg = family.substr(colon + 1);
  }
  if (head == "line") {
    if (!arg.empty()) throw std::invalid_argument("line takes no parameter");
    return CoverGraph::line();
  }
  if (head == "tree") {
    long long d = arg.empty() ? cfg.at("degree").get<long long>()
                              : parse_int(arg);
    return CoverGraph::regular_tree(static_cast<int>(d));
  }
  if (head == "cayley") {
    long long k = arg.empty() ? cfg.at("rank").get<long long>()
                              : parse_int(arg);
    return CoverGraph::cayley_free(static_cast<int>(k));
  }
  if (head == "schreier") {
    if (!arg.empty())
      throw std::invalid_argument("use --images for the schreier family");
    if (cfg.at("images").is_null())
      throw std::invalid_argument("the schreier family needs --images");
    return schreier_from_cfg(cfg);
  }
  throw std::invalid_argument(
      "family must be line, tree[:d], cayley[:rank], or schreier");
}

// Builds the Schreier graph from config keys "images" (array of integer
// vectors, or a {"images": ...} object) and "mod" (0 = no reduction).
CoverGraph schreier_from_cfg(const ordered_json& cfg) {
  ordered_json images = cfg.at("images");
  if (images.is_object() && images.contains("images"))
    images = images.at("images");
  if (!images.is_array() || images.empty())
    throw std::invalid_argument(
        "images must be a non-empty array of integer vectors");
  std::vector<std::vector<long long>> im;
  for (const auto& row : images) {
    if (!row.is_array() || row.empty())
      throw std::invalid_argument("each image must be a non-empty array");
    std::vector<long long> r;
    for (const auto& e : row) {
      if (!e.is_number_integer() && !e.is_number_unsigned())
        throw std::invalid_argument("image entries must be integers");
      r.push_back(e.get<long long>());
    }
    im.push_back(std::move(r));
  }
  long long mod = cfg.at("mod").get<long long>();
  std::optional<long long> m;
  if (mod != 0) m = mod;
  int rank = static_cast<int>(im.size());
  return CoverGraph::schreier(rank, std::move(im), m);
}

ordered_json folner_rows_json(const std::vector<FolnerRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row;
    row["n"] = r.n;
    row["ball"] = r.ball_size;
    row["boundary"] = r.boundary_size;
    row["ratio"] = r.ratio;
    arr.push_back(std::move(row));
  }
  return arr;
}

std::string folner_rows_csv(const std::string& sub, const ordered_json& cfg,
                            const std::vector<FolnerRow>& rows) {
  std::string s;
  s += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
  s += std::string("# tool=") + kToolName + " " + kVersion + "\n";
  s += "# subcommand=" + sub + "\n";
  s += "# seed=" + cfg.at("seed").dump() + "\n";
  s += "# config=" + cfg.dump() + "\n";
  s += "n,ball,boundary,ratio\n";
  for (const auto& r : rows) {
    s += std::to_string(r.n) + "," + std::to_string(r.ball_size) + "," +
         std::to_string(r.boundary_size) + "," + dtos(r.ratio) + "\n";
  }
  return s;
}

ordered_json amenability_json(const std::vector<FolnerRow>& rows, int window) {
  std::size_t usable = 0;
  for (const auto& r : rows)
    if (r.n >= 1) ++usable;
  if (usable < 3) return nullptr;
  AmenabilityReport rep = classify_amenability(rows, window);
  ordered_json a;
  a["verdict"] = rep.verdict;
  a["gamma_hat"] = rep.gamma_hat;
  a["fit"] = ordered_json::array({rep.fit_a, rep.fit_b, rep.fit_c});
  a["residual_rms"] = rep.residual_rms;
  a["decreasing"] = rep.decreasing;
  a["flat"] = rep.flat;
  a["window"] = rep.window;
  return a;
}

ordered_json shell_rows_json(const std::vector<ShellReport>& shells) {
  ordered_json arr = ordered_json::array();
  for (const auto& sh : shells) {
    ordered_json row;
    row["n"] = sh.n;
    row["words"] = sh.words;
    row["shell_mass"] = sh.mass;
    row["unfolded_mass"] = sh.unfolded;
    row["quotient_norm"] = sh.quotient;
    arr.push_back(std::move(row));
  }
  return arr;
}

// -------------------------------------------------------------- subcommands

void run_theta_ratio(const ordered_json& cfg, const Plumb& pl) {
  FuchsianGroup g = build_group(cfg.at("group").get<std::string>());
  QuadraticDifferential phi =
      QuadraticDifferential::parse(cfg.at("phi").get<std::string>());
  ThetaOptions opt;
  opt.grid = grid_of(cfg);
  opt.explicit_shells = static_cast<int>(cfg.at("N").get<long long>());
  opt.max_shells = static_cast<int>(cfg.at("max-shells").get<long long>());
  opt.word_budget = to_budget(cfg.at("word-budget"), "word-budget");
  opt.shell_rel_threshold = cfg.at("shell-threshold").get<double>();
  opt.kernel = kernel_of(pl);
  opt.threads = pl.threads;

  try {
    ThetaRatioResult r = theta_ratio(g, phi, opt);
    ordered_json res;
    res["ratio"] = r.ratio;
    res["error_quadrature"] = r.err_quadrature;
    res["error_truncation"] = r.err_truncation;
    res["error_total"] = r.err_total;
    res["N"] = r.shells_used;
    ordered_json masses = ordered_json::array();
    for (const auto& sh : r.shells) masses.push_back(sh.mass[0]);
    res["shell_masses"] = std::move(masses);
    res["quotient_norm"] = r.quotient;
    res["l1_core"] = r.l1_core;
    res["l1_norm"] = r.l1_value;
    res["ratio_half_grid"] = r.ratio_half;
    res["straddle_mass"] = r.straddle_mass;
    res["annulus_bound"] = r.annulus_bound;
    res["words_used"] = r.words_used;
    res["stop_reason"] = r.stop_reason;
    res["shells"] = shell_rows_json(r.shells);
    emit_envelope("theta-ratio", cfg, "result", res, pl);
  } catch (const budget_error& e) {
    ordered_json err;
    err["type"] = "budget-exceeded";
    err["message"] = e.what();
    err["partial"] = e.partial();
    emit_envelope("theta-ratio", cfg, "error", err, pl);
    throw;
  }
}

void run_theta_norm_estimate(const ordered_json& cfg, const Plumb& pl) {
  FuchsianGroup g = build_group(cfg.at("group").get<std::string>());
  NormEstimateOptions opt;
  opt.grid = grid_of(cfg);
  opt.max_degree = static_cast<int>(cfg.at("max-degree").get<long long>());
  opt.restarts = static_cast<int>(cfg.at("restarts").get<long long>());
  opt.sweeps = static_cast<int>(cfg.at("sweeps").get<long long>());
  opt.seed = static_cast<std::uint64_t>(cfg.at("seed").get<long long>());
  opt.max_shells = static_cast<int>(cfg.at("max-shells").get<long long>());
  opt.word_budget = to_budget(cfg.at("word-budget"), "word-budget");
  opt.shell_rel_threshold = cfg.at("shell-threshold").get<double>();
  opt.kernel = kernel_of(pl);
  opt.threads = pl.threads;

  try {
    NormEstimateResult r = estimate_theta_norm(g, opt);
    ordered_json res;
    res["ratio"] = r.best_ratio;
    res["error_quadrature"] = r.err_quadrature;
    res["error_truncation"] = r.err_truncation;
    res["error_total"] = r.err_total;
    res["N"] = r.shells_used;
    ordered_json wit = ordered_json::array();
    for (complexd c : r.witness) wit.push_back(json_complex(c));
    res["witness_coefficients"] = std::move(wit);
    res["best_restart"] = r.best_restart;
    res["evaluations"] = r.evaluations;
    res["words_used"] = r.words_used;
    res["stop_reason"] = r.stop_reason;
    if (g.rank() >= 1) {
      long long slen = cfg.at("systole-max-len").get<long long>();
      SystoleBound s = systole_upper_bound(g, static_cast<int>(slen));
      ordered_json sj;
      sj["upper_bound"] = s.upper_bound;
      sj["word"] = s.word;
      res["systole"] = std::move(sj);
    } else {
      res["systole"] = nullptr;
    }
    emit_envelope("theta-norm-estimate", cfg, "result", res, pl);
  } catch (const budget_error& e) {
    ordered_json err;
    err["type"] = "budget-exceeded";
    err["message"] = e.what();
    err["partial"] = e.partial();
    emit_envelope("theta-norm-estimate", cfg, "error", err, pl);
    throw;
  }
}

void run_unfold_check(const ordered_json& cfg, const Plumb& pl) {
  FuchsianGroup g = build_group(cfg.at("group").get<std::string>());
  std::vector<QuadraticDifferential> phis;
  for (const auto& p : cfg.at("phi"))
    phis.push_back(QuadraticDifferential::parse(p.get<std::string>()));
  ThetaOptions opt;
  opt.grid = grid_of(cfg);
  opt.explicit_shells = static_cast<int>(cfg.at("N").get<long long>());
  opt.max_shells = static_cast<int>(cfg.at("max-shells").get<long long>());
  opt.word_budget = to_budget(cfg.at("word-budget"), "word-budget");
  opt.shell_rel_threshold = cfg.at("shell-threshold").get<double>();
  opt.kernel = kernel_of(pl);
  opt.threads = pl.threads;

  try {
    ThetaAccumulation acc = accumulate_theta(g, phis, opt);
    ordered_json res;
    res["N"] = acc.shells_done;
    res["words_used"] = acc.words_used;
    res["stop_reason"] = acc.stop_reason;
    ordered_json l1 = ordered_json::array();
    for (const auto& n : acc.l1) {
      ordered_json one;
      one["core"] = n.core;
      one["annulus_bound"] = n.annulus_bound;
      one["value"] = n.value();
      l1.push_back(std::move(one));
    }
    res["l1_norm"] = std::move(l1);
    res["straddle_mass"] = acc.straddle_mass;
    res["domain_cells"] = acc.domain_cells;
    res["rows"] = shell_rows_json(acc.shells);
    emit_envelope("unfold-check", cfg, "result", res, pl);
  } catch (const budget_error& e) {
    ordered_json err;
    err["type"] = "budget-exceeded";
    err["message"] = e.what();
    err["partial"] = e.partial();
    emit_envelope("unfold-check", cfg, "error", err, pl);
    throw;
  }
}

void run_systole(const ordered_json& cfg, const Plumb& pl) {
  FuchsianGroup g = build_group(cfg.at("group").get<std::string>());
  long long max_len = cfg.at("max-len").get<long long>();
  std::size_t budget = to_budget(cfg.at("budget"), "budget");
  try {
    SystoleBound s = systole_upper_bound(g, static_cast<int>(max_len), budget);
    ordered_json res;
    res["upper_bound"] = s.upper_bound;
    res["word"] = s.word;
    res["word_index"] = s.word_index;
    emit_envelope("systole", cfg, "result", res, pl);
  } catch (const budget_error& e) {
    ordered_json err;
    err["type"] = "budget-exceeded";
    err["message"] = e.what();
    err["partial"] = e.partial();
    emit_envelope("systole", cfg, "error", err, pl);
    throw;
  }
}

void run_expansion(const ordered_json& cfg, const Plumb& pl) {
  CoverGraph g = build_graph(cfg);
  long long radius = cfg.at("radius").get<long long>();
  long long max_subset = cfg.at("max-subset").get<long long>();
  std::size_t cap = to_budget(cfg.at("enum-cap"), "enum-cap");
  ExpansionResult r = expansion_exact(g, static_cast<int>(radius),
                                      static_cast<int>(max_subset), cap);
  ordered_json res;
  res["boundary"] = r.boundary;
  res["size"] = r.size;
  res["value"] = r.value;
  res["witness"] = r.witness;
  res["subsets_enumerated"] = r.subsets_enumerated;
  res["cap_hit"] = r.cap_hit;
  emit_envelope("expansion", cfg, "result", res, pl);
  if (r.cap_hit) g_exit_code = 3;
}

void run_folner(const ordered_json& cfg, const Plumb& pl, const char* sub) {
  CoverGraph g = (std::string(sub) == "schreier") ? schreier_from_cfg(cfg)
                                                  : build_graph(cfg);
  long long radius = cfg.at("radius").get<long long>();
  std::size_t budget = to_budget(cfg.at("node-budget"), "node-budget");
  std::string format = cfg.at("format").get<std::string>();
  if (format != "json" && format != "csv")
    throw std::invalid_argument("format must be json or csv");
  try {
    std::vector<FolnerRow> rows =
        folner_profile(g, static_cast<int>(radius), budget);
    if (format == "csv") {
      write_text(folner_rows_csv(sub, cfg, rows), pl.out);
      return;
    }
    ordered_json res;
    res["family"] = g.family();
    res["rows"] = folner_rows_json(rows);
    int window = static_cast<int>(cfg.at("window").get<long long>());
    res["amenability"] = amenability_json(rows, window);
    emit_envelope(sub, cfg, "result", res, pl);
  } catch (const budget_error& e) {
    ordered_json err;
    err["type"] = "budget-exceeded";
    err["message"] = e.what();
    err["partial"] = e.partial();
    emit_envelope(sub, cfg, "error", err, pl);
    throw;
  }
}

void run_torus_distance(const ordered_json& cfg, const Plumb& pl) {
  complexd t1 = parse_complex(cfg.at("tau1").get<std::string>());
  complexd t2 = parse_complex(cfg.at("tau2").get<std::string>());
  LinearStretch L = affine_coeffs(t1, t2);
  ordered_json res;
  res["distance"] = teich_distance(t1, t2);
  res["dilatation"] = torus_dilatation(t1, t2);
  res["stretch_a"] = json_complex(L.a);
  res["stretch_b"] = json_complex(L.b);
  emit_envelope("torus-distance", cfg, "result", res, pl);
}

ModelMap parse_model_map(const json& m) {
  if (!m.is_object() || !m.contains("kind"))
    throw std::invalid_argument("each map needs a 'kind'");
  std::string kind = m.at("kind").get<std::string>();
  if (kind == "isometry") {
    const auto& mat = m.at("matrix");
    if (!mat.is_array() || mat.size() != 2 || mat[0].size() != 2 ||
        mat[1].size() != 2)
      throw std::invalid_argument("isometry needs matrix [[a,b],[c,d]]");
    return ModelMap::isometry(Moebius(mat[0][0].get<double>(),
                                      mat[0][1].get<double>(),
                                      mat[1][0].get<double>(),
                                      mat[1][1].get<double>()));
  }
  if (kind == "uniform-contraction") {
    complexd target = parse_complex(m.at("target").get<std::string>());
    return ModelMap::uniform_contraction(target, m.at("factor").get<double>());
  }
  if (kind == "cylindrical") {
    return ModelMap::cylindrical(m.at("epsilon").get<double>(),
                                 m.at("drift").get<double>());
  }
  throw std::invalid_argument(
      "map kind must be isometry, uniform-contraction, or cylindrical");
}

void run_iterate(const ordered_json& cfg, const Plumb& pl) {
  const auto& maps_json = cfg.at("maps");
  if (!maps_json.is_array() || maps_json.empty())
    throw std::invalid_argument("maps must be a non-empty array");
  std::vector<ModelMap> maps;
  ordered_json maps_echo = ordered_json::array();
  for (const auto& m : maps_json) {
    maps.push_back(parse_model_map(m));
    const ModelMap& mm = maps.back();
    ordered_json e;
    e["kind"] = mm.kind_name();
    switch (mm.kind()) {
      case ModelMap::Kind::Isometry: {
        const Moebius& g = mm.isometry_map();
        e["matrix"] = {{g.a, g.b}, {g.c, g.d}};
        break;
      }
      case ModelMap::Kind::UniformContraction:
        e["target"] = json_complex(mm.target());
        e["factor"] = mm.factor();
        break;
      case ModelMap::Kind::Cylindrical:
        e["epsilon"] = mm.epsilon();
        e["drift"] = mm.drift();
        e["factor_model"] =
            "1 - epsilon/(1 + Im y): illustrative stand-in, not a fitted "
            "degeneration profile";
        break;
    }
    maps_echo.push_back(std::move(e));
  }
  complexd y0 = parse_complex(cfg.at("y0").get<std::string>());
  IterateOptions opt;
  opt.max_steps =
      static_cast<std::size_t>(cfg.at("max-steps").get<long long>());
  opt.tol = cfg.at("tol").get<double>();
  opt.pinch_threshold = cfg.at("pinch-threshold").get<double>();
  opt.trace_cap =
      static_cast<std::size_t>(cfg.at("trace-cap").get<long long>());
  std::string format = cfg.at("format").get<std::string>();
  if (format != "json" && format != "csv")
    throw std::invalid_argument("format must be json or csv");

  IterateResult r = iterate_maps(maps, y0, opt);

  if (format == "csv") {
    std::string s;
    s += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    s += std::string("# tool=") + kToolName + " " + kVersion + "\n";
    s += "# subcommand=iterate\n";
    s += "# seed=" + cfg.at("seed").dump() + "\n";
    s += "# config=" + cfg.dump() + "\n";
    s += "# outcome=" + r.outcome + "\n";
    s += "n,re,im,step\n";
    for (std::size_t n = 0; n < r.trace.size(); ++n) {
      s += std::to_string(n) + "," + dtos(r.trace[n].real()) + "," +
           dtos(r.trace[n].imag()) + ",";
      if (n > 0) s += dtos(r.step_distance[n - 1]);
      s += "\n";
    }
    write_text(s, pl.out);
    return;
  }

  ordered_json res;
  res["maps"] = std::move(maps_echo);
  res["outcome"] = r.outcome;
  res["steps"] = r.steps;
  res["final_point"] = json_complex(r.final_point);
  res["final_step"] = r.final_step;
  try {
    ContractionEstimate ce = contraction_estimate(r.step_distance);
    ordered_json c;
    c["c_hat"] = ce.c_hat;
    c["ratios_used"] = ce.ratios_used;
    res["contraction"] = std::move(c);
  } catch (const std::invalid_argument&) {
    res["contraction"] = nullptr;
  }
  ordered_json trace = ordered_json::array();
  for (complexd y : r.trace) trace.push_back(json_complex(y));
  res["trace"] = std::move(trace);
  ordered_json steps = ordered_json::array();
  for (std::size_t i = 0; i < r.step_distance.size() && i < opt.trace_cap; ++i)
    steps.push_back(r.step_distance[i]);
  res["step_distance"] = std::move(steps);
  emit_envelope("iterate", cfg, "result", res, pl);
}

// --------------------------------------------------------------- wiring

struct SubState {
  std::string name;
  std::vector<FieldSpec> fields;
  std::vector<FieldHolder> holders;
  std::string config_path;
  void (*run)(const ordered_json&, const Plumb&) = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for surface-group covers: theta-series "
               "contraction, fundamental domains, cover expansion, and the "
               "torus Teichmueller model"};
  app.require_subcommand(1);

  Plumb pl;
  app.add_option("--threads", pl.threads,
                 "worker thread cap (does not affect results)")
      ->capture_default_str();
  app.add_option("--kernel", pl.kernel, "auto | scalar | avx2")
      ->capture_default_str();
  app.add_option("--out", pl.out, "write the primary output to this file");

  std::vector<std::shared_ptr<SubState>> subs;

  auto add_sub = [&](const char* name, const char* help,
                     std::vector<FieldSpec> fields,
                     void (*run)(const ordered_json&, const Plumb&)) {
    auto st = std::make_shared<SubState>();
    st->name = name;
    st->fields = std::move(fields);
    st->run = run;
    CLI::App* sc = app.add_subcommand(name, help);
    sc->fallthrough();
    sc->add_option("--config", st->config_path,
                   "JSON config file (mutually exclusive with the "
                   "per-parameter flags)");
    st->holders.resize(st->fields.size());
    for (std::size_t i = 0; i < st->fields.size(); ++i) {
      FieldHolder& h = st->holders[i];
      h.spec = &st->fields[i];
      std::string flag = "--" + std::string(h.spec->key);
      h.opt = (h.spec->type == FieldType::StrList)
                  ? sc->add_option(flag, h.raw_list, h.spec->help)
                  : sc->add_option(flag, h.raw, h.spec->help);
    }
    sc->callback([st, &pl]() {
      ordered_json cfg =
          resolve_config(st->name, st->fields, st->holders, st->config_path);
      st->run(cfg, pl);
    });
    subs.push_back(st);
  };

  const FieldSpec seed{"seed", FieldType::Int, 12345, false,
                       "seed recorded in the output (used by randomized "
                       "subcommands)"};

  add_sub("theta-ratio",
          "norm ratio ||Theta_N phi||_F / ||phi|| for one test differential",
          {{"group", FieldType::Str, nullptr, true,
            "preset:<name> or a group-spec JSON file"},
           {"phi", FieldType::Str, "1", false, "test differential: 1, z, z2..."},
           {"grid-n", FieldType::Int, 512, false, "polar grid size per axis"},
           {"N", FieldType::Int, -1, false,
            "exact truncation depth (-1 = stopping rule)"},
           {"max-shells", FieldType::Int, 16, false, ""},
           {"word-budget", FieldType::Int, 60000, false, ""},
           {"shell-threshold", FieldType::Dbl, 1e-3, false,
            "stop once a shell's mass drops below this times ||phi||"},
           seed},
          run_theta_ratio);

  add_sub("theta-norm-estimate",
          "lower-bound search for the theta operator norm over polynomial "
          "witnesses",
          {{"group", FieldType::Str, nullptr, true,
            "preset:<name> or a group-spec JSON file"},
           {"max-degree", FieldType::Int, 6, false, ""},
           {"restarts", FieldType::Int, 200, false, ""},
           {"sweeps", FieldType::Int, 3, false, ""},
           {"grid-n", FieldType::Int, 256, false, ""},
           {"max-shells", FieldType::Int, 16, false, ""},
           {"word-budget", FieldType::Int, 60000, false, ""},
           {"shell-threshold", FieldType::Dbl, 1e-3, false, ""},
           {"systole-max-len", FieldType::Int, 6, false,
            "word length cap for the reported systole upper bound"},
           seed},
          run_theta_norm_estimate);

  add_sub("unfold-check",
          "shell-by-shell unfolded mass and quotient norms for several phi",
          {{"group", FieldType::Str, nullptr, true, ""},
           {"phi", FieldType::StrList, ordered_json::array({"1"}), false,
            "repeatable: test differentials"},
           {"grid-n", FieldType::Int, 512, false, ""},
           {"N", FieldType::Int, -1, false,
            "exact truncation depth (-1 = stopping rule)"},
           {"max-shells", FieldType::Int, 16, false, ""},
           {"word-budget", FieldType::Int, 60000, false, ""},
           {"shell-threshold", FieldType::Dbl, 1e-3, false, ""},
           seed},
          run_unfold_check);

  add_sub("systole",
          "shortest translation length over reduced words up to a length cap",
          {{"group", FieldType::Str, nullptr, true, ""},
           {"max-len", FieldType::Int, 8, false, ""},
           {"budget", FieldType::Int, 1000000, false, ""},
           seed},
          run_systole);

  add_sub("expansion",
          "exact minimum boundary/size ratio over connected subsets of a ball",
          {{"family", FieldType::Str, nullptr, true,
            "line | tree[:d] | cayley[:rank] | schreier"},
           {"degree", FieldType::Int, 3, false, "tree degree"},
           {"rank", FieldType::Int, 2, false, "free rank"},
           {"images", FieldType::JsonVal, nullptr, false,
            "schreier only: [[..],[..]] integer images"},
           {"mod", FieldType::Int, 0, false, "schreier only: 0 = none"},
           {"radius", FieldType::Int, 3, false, "search ball radius"},
           {"max-subset", FieldType::Int, 12, false, ""},
           {"enum-cap", FieldType::Int, 5000000, false, ""},
           seed},
          run_expansion);

  add_sub("folner",
          "ball/boundary profile of a cover graph (csv default)",
          {{"family", FieldType::Str, nullptr, true,
            "line | tree[:d] | cayley[:rank] | schreier"},
           {"degree", FieldType::Int, 3, false, ""},
           {"rank", FieldType::Int, 2, false, ""},
           {"images", FieldType::JsonVal, nullptr, false, ""},
           {"mod", FieldType::Int, 0, false, ""},
           {"radius", FieldType::Int, 10, false, ""},
           {"node-budget", FieldType::Int, 1000000, false, ""},
           {"window", FieldType::Int, 5, false, "amenability fit window"},
           {"format", FieldType::Str, "csv", false, "csv | json"},
           seed},
          [](const ordered_json& cfg, const Plumb& pl2) {
            run_folner(cfg, pl2, "folner");
          });

  add_sub("schreier",
          "folner profile and amenability probe of a Schreier coset graph",
          {{"images", FieldType::JsonVal, nullptr, true,
            "[[..],[..]] integer images, one per generator"},
           {"mod", FieldType::Int, 0, false, "0 = none"},
           {"radius", FieldType::Int, 12, false, ""},
           {"node-budget", FieldType::Int, 1000000, false, ""},
           {"window", FieldType::Int, 5, false, ""},
           {"format", FieldType::Str, "json", false, "json | csv"},
           seed},
          [](const ordered_json& cfg, const Plumb& pl2) {
            run_folner(cfg, pl2, "schreier");
          });

  add_sub("torus-distance",
          "Teichmueller distance between marked flat tori",
          {{"tau1", FieldType::Cplx, nullptr, true, "re,im"},
           {"tau2", FieldType::Cplx, nullptr, true, "re,im"},
           seed},
          run_torus_distance);

  add_sub("iterate",
          "iterate a composition of model self-maps from a start point",
          {{"maps", FieldType::JsonVal, nullptr, true,
            "JSON array of {kind: isometry|uniform-contraction|cylindrical}"},
           {"y0", FieldType::Cplx, nullptr, true, "re,im start point"},
           {"max-steps", FieldType::Int, 100000, false, ""},
           {"tol", FieldType::Dbl, 1e-9, false, "convergence step size"},
           {"pinch-threshold", FieldType::Dbl, 1000.0, false,
            "Im above this means the orbit is pinching"},
           {"trace-cap", FieldType::Int, 256, false,
            "trace rows kept in the output"},
           {"format", FieldType::Str, "json", false, "json | csv"},
           seed},
          run_iterate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const budget_error& e) {
    std::cerr << "budget exceeded: " << e.what()
              << " (partial=" << e.partial() << ")\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return g_exit_code;
}
