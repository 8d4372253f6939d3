#include "sensikit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sensikit/asymptotics.hpp"
#include "sensikit/error.hpp"
#include "sensikit/experiments.hpp"
#include "sensikit/pickfreeze.hpp"
#include "sensikit/rank.hpp"
#include "sensikit/report.hpp"
#include "sensikit/sampling.hpp"

namespace sensikit {

namespace {

constexpr std::uint64_t kEstimateStream = 11;
constexpr std::uint64_t kCiStream = 12;
constexpr std::uint64_t kAsymptStream = 13;

// Option values are kept as text until the command runs, so config-file
// values and flags go through the same parsers.
struct Settings {
  std::map<std::string, std::string> values;
  bool svg = false;
  bool approx = false;
  bool linear_x = false;

  bool has(const std::string& key) const {
    const auto it = values.find(key);
    return it != values.end() && !it->second.empty();
  }
  const std::string& text(const std::string& key) const { return values.at(key); }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_double(const std::string& what, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
    throw InvalidArgument(what + ": '" + text + "' is not a number");
  return v;
}

std::uint64_t to_uint(const std::string& what, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw InvalidArgument(what + ": '" + text + "' is not a non-negative integer");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// "6", "6,10,15" or "2..7".
std::vector<std::size_t> parse_size_list(const std::string& what, const std::string& text) {
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = to_uint(what, text.substr(0, dots));
    const auto hi = to_uint(what, text.substr(dots + 2));
    if (hi < lo) throw InvalidArgument(what + ": empty range '" + text + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& part : split(text, ',')) out.push_back(to_uint(what, part));
  return out;
}

std::vector<double> parse_double_list(const std::string& what, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(what, part));
  return out;
}

// "start:stop:step", both ends included.
std::vector<double> parse_grid(const std::string& what, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) return parse_double_list(what, text);
  const double lo = to_double(what, parts[0]);
  const double hi = to_double(what, parts[1]);
  const double step = to_double(what, parts[2]);
  if (!(step > 0.0) || hi < lo) throw InvalidArgument(what + ": bad grid '" + text + "'");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + static_cast<double>(k) * step;
  return out;
}

std::size_t single_p(const Settings& s) {
  const auto ps = parse_size_list("--p", s.text("p"));
  if (ps.size() != 1) throw InvalidArgument("--p: expected a single dimension");
  return ps.front();
}

ModelDescriptor descriptor(const Settings& s) {
  ModelDescriptor d;
  std::string name = s.has("model") ? s.text("model") : "gfunction";
  if (name.rfind("custom:", 0) == 0) name = name.substr(7);
  if (name == "gfunction") {
    d.kind = "gfunction";
    if (s.has("a")) d.a = parse_double_list("--a", s.text("a"));
    if (s.has("p")) d.p = single_p(s);
    if (!d.a.empty() && d.p != 0 && d.p != d.a.size())
      throw InvalidArgument("--p " + std::to_string(d.p) + " does not match " +
                            std::to_string(d.a.size()) + " coefficients in --a");
    if (d.a.empty() && d.p == 0) d.p = 6;
  } else if (name == "linear") {
    d.kind = "linear";
    if (s.has("alpha")) d.alpha = to_double("--alpha", s.text("alpha"));
    d.p = s.has("p") ? single_p(s) : 2;
  } else {
    const auto names = custom_model_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw InvalidArgument("unknown model '" + name + "'");
    d.kind = "custom";
    d.custom_name = name;
  }
  return d;
}

std::uint64_t seed_of(const Settings& s) { return s.has("seed") ? to_uint("--seed", s.text("seed")) : 0; }

std::size_t size_of(const Settings& s, const std::string& key, std::size_t fallback) {
  return s.has(key) ? to_uint("--" + key, s.text(key)) : fallback;
}

struct DataSet {
  std::vector<std::vector<double>> x;  // columns
  std::vector<double> y;
};

DataSet load_data(const std::string& path, std::ostream& err) {
  const CsvTable t = read_csv(path);
  const auto has = [&](const std::string& c) {
    return std::find(t.header.begin(), t.header.end(), c) != t.header.end();
  };
  if (!has("y")) throw InvalidArgument(path + ": missing column 'y'");
  const std::size_t p = t.header.size() - 1;
  if (p == 0) throw InvalidArgument(path + ": missing column 'x1'");
  for (std::size_t k = 1; k <= p; ++k)
    if (!has("x" + std::to_string(k)))
      throw InvalidArgument(path + ": missing column 'x" + std::to_string(k) + "'");
  for (std::size_t k = 0; k < p; ++k)
    if (t.header[k] != "x" + std::to_string(k + 1))
      throw InvalidArgument(path + ": columns must be x1..x" + std::to_string(p) + ",y in order");
  if (t.header.back() != "y") throw InvalidArgument(path + ": column 'y' must come last");
  if (t.rows.size() < 2) throw InvalidArgument(path + ": need at least two rows");

  DataSet d;
  d.x.assign(p, std::vector<double>(t.rows.size()));
  d.y.resize(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + " row " + std::to_string(r + 1);
    for (std::size_t k = 0; k < p; ++k) d.x[k][r] = to_double(where, t.rows[r][k]);
    d.y[r] = to_double(where, t.rows[r][p]);
  }
  for (std::size_t k = 0; k < p; ++k)
    if (compute_ranks(d.x[k]).ties)
      err << "warning: ties in x" << k + 1 << "; broken by row order\n";
  if (compute_ranks(d.y).ties) err << "warning: ties in y\n";
  return d;
}

IidDesign as_design(const DataSet& d) {
  IidDesign design;
  design.n = d.y.size();
  design.p = d.x.size();
  design.y = d.y;
  design.x.resize(d.y.size() * design.p);
  for (std::size_t r = 0; r < d.y.size(); ++r)
    for (std::size_t k = 0; k < design.p; ++k) design.x[r * design.p + k] = d.x[k][r];
  return design;
}

void print_estimates(std::ostream& out, const std::vector<double>& est,
                     const std::optional<std::vector<double>>& exact, bool cvm) {
  out << "index,estimate,exact\n";
  for (std::size_t i = 0; i < est.size(); ++i) {
    out << i + 1 << ',' << format_double(est[i]) << ',';
    if (exact && !cvm) out << format_double((*exact)[i]);
    out << '\n';
  }
}

int cmd_estimate(const Settings& s, std::ostream& out, std::ostream& err) {
  const std::string method = s.has("method") ? s.text("method") : "rank-sobol";
  const bool rank = method == "rank-sobol" || method == "rank-cvm";
  if (!rank && method != "pf-sn" && method != "pf-tn" && method != "pf-cvm")
    throw InvalidArgument("unknown method '" + method + "'");
  RankSobolOptions ro;
  if (s.has("clip")) ro.clip = to_double("--clip", s.text("clip"));

  if (s.has("data")) {
    if (!rank) throw InvalidArgument("method '" + method + "' needs a model, not a data file");
    const DataSet d = load_data(s.text("data"), err);
    const IidDesign design = as_design(d);
    const auto est = method == "rank-cvm" ? rank_cvm_all(design) : rank_sobol_all(design, ro);
    out << "method " << method << ", n " << d.y.size() << '\n';
    print_estimates(out, est, std::nullopt, true);
    return kExitOk;
  }

  const Model model = descriptor(s).build();
  const std::size_t n = size_of(s, "n", 1000);
  const RngStream stream{seed_of(s), derive_stream_id(kEstimateStream, 0)};
  std::vector<double> est(model.dim);
  std::size_t evaluations = 0;
  if (rank) {
    const auto design = sample_iid(model, n, stream);
    est = method == "rank-cvm" ? rank_cvm_all(design) : rank_sobol_all(design, ro);
    evaluations = design.evaluations;
  } else if (method == "pf-cvm") {
    for (std::size_t i = 0; i < model.dim; ++i) {
      const std::size_t u[] = {i};
      const auto design = sample_triple(model, u, n, stream.substream(i));
      est[i] = cvm_pickfreeze(design).value;
      evaluations += design.evaluations;
    }
  } else {
    const auto design = sample_pickfreeze_all(model, n, stream);
    for (std::size_t i = 0; i < model.dim; ++i)
      est[i] = method == "pf-sn" ? sobol_sn(design.y, design.y_frozen[i])
                                 : sobol_tn(design.y, design.y_frozen[i]);
    evaluations = design.evaluations;
  }
  out << "method " << method << ", model " << model.name << ", n " << n << ", evaluations "
      << evaluations << '\n';
  print_estimates(out, est, model.exact_sobol, method == "rank-cvm" || method == "pf-cvm");
  return kExitOk;
}

std::filesystem::path output_dir(const Settings& s) {
  const std::filesystem::path dir = s.has("out") ? s.text("out") : ".";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

int cmd_study(const std::string& kind, const Settings& s, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  c.study = study_from_string(kind);
  c.seed = seed_of(s);
  c.replications = size_of(s, "reps", 100);
  if (s.has("budget")) c.budget = size_of(s, "budget", 0);

  if (c.study == Study::variance_compare) {
    c.model.kind = "linear";
    if (s.has("model") && s.text("model") != "linear")
      throw InvalidArgument("variance comparison is only available for the linear model");
    c.alphas = s.has("alpha-grid") ? parse_grid("--alpha-grid", s.text("alpha-grid"))
               : s.has("alpha")    ? parse_double_list("--alpha", s.text("alpha"))
                                   : parse_grid("--alpha-grid", "0:4:0.1");
    c.dimensions = parse_size_list("--p", s.has("p") ? s.text("p") : "2..7");
  } else if (c.study == Study::dimension) {
    Settings base = s;
    base.values.erase("p");
    c.model = descriptor(base);
    c.dimensions = parse_size_list("--p", s.has("p") ? s.text("p") : "6,10,15,20,30,40,50");
    if (!c.budget) c.budget = 200;
  } else {
    c.model = descriptor(s);
    if (c.study == Study::convergence)
      c.sizes = parse_size_list("--sizes", s.has("sizes") ? s.text("sizes") : "100,500,1000");
  }
  c.validate();
  const auto dir = output_dir(s);
  const auto csv = dir / (to_string(c.study) + ".csv");
  const auto svg = dir / (to_string(c.study) + ".svg");

  switch (c.study) {
    case Study::convergence: {
      const auto r = run_convergence(c);
      emit_csv(r, csv);
      if (s.svg) emit_svg(r, svg, !s.linear_x);
      out << "convergence: " << r.rows.size() << " rows, " << r.evaluations << " model calls\n";
      for (const char* m : {kMethodPickFreeze, kMethodRank})
        for (std::size_t N : c.sizes) {
          const std::size_t size = std::string(m) == kMethodRank ? (r.p + 1) * N : N;
          out << m << " size " << size << ": max abs error "
              << format_double(r.max_error(m, size)) << '\n';
        }
      break;
    }
    case Study::mse: {
      const auto r = run_mse(c);
      emit_csv(r, csv);
      if (s.svg) emit_svg(r, svg);
      out << "mse: budget " << r.budget << ", rank n " << r.rank_n << ", pick-freeze N "
          << r.pickfreeze_n << ", " << c.replications << " replications\n";
      out << "index,mse_pick_freeze,mse_rank\n";
      for (std::size_t i = 1; i <= r.p; ++i)
        out << i << ',' << format_double(r.row(kMethodPickFreeze, i).mean) << ','
            << format_double(r.row(kMethodRank, i).mean) << '\n';
      break;
    }
    case Study::dimension: {
      std::vector<std::string> skipped;
      const auto reports = run_dimension(c, &skipped);
      for (const auto& w : skipped) err << "warning: " << w << '\n';
      emit_csv(reports, csv);
      if (s.svg) emit_svg(reports, svg);
      out << "p,index,mse_pick_freeze,mse_rank\n";
      for (const auto& r : reports)
        for (std::size_t i = 1; i <= r.p; ++i)
          out << r.p << ',' << i << ',' << format_double(r.row(kMethodPickFreeze, i).mean) << ','
              << format_double(r.row(kMethodRank, i).mean) << '\n';
      break;
    }
    case Study::variance_compare: {
      const auto r = run_variance_compare(c);
      emit_csv(r, csv);
      if (s.svg) emit_svg(r, svg);
      out << "variance_compare: " << r.rows.size() << " rows\n";
      break;
    }
  }
  out << "wrote " << csv.generic_string() << '\n';
  if (s.svg) out << "wrote " << svg.generic_string() << '\n';
  return kExitOk;
}

int cmd_ci(const Settings& s, std::ostream& out, std::ostream& err) {
  const double level = s.has("level") ? to_double("--level", s.text("level")) : 0.95;
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("--level must lie strictly between 0 and 1");
  const std::size_t index = size_of(s, "index", 1);
  if (index == 0) throw InvalidArgument("--index is 1-based");

  Estimate e;
  double sigma2 = 0.0;
  if (s.has("data")) {
    if (!s.approx)
      throw DegenerateData("the limiting variance needs model access; pass --approx to estimate it "
                           "from the data alone");
    const DataSet d = load_data(s.text("data"), err);
    if (index > d.x.size()) throw InvalidArgument("--index exceeds the number of inputs");
    e.value = rank_sobol(d.x[index - 1], d.y);
    e.n = d.y.size();
    sigma2 = sigma2_single_sample(d.x[index - 1], d.y);
  } else {
    const ModelDescriptor md = descriptor(s);
    const Model model = md.build();
    if (index > model.dim) throw InvalidArgument("--index exceeds the model dimension");
    const std::size_t n = size_of(s, "n", 1000);
    const RngStream stream{seed_of(s), derive_stream_id(kCiStream, 0)};
    const auto design = sample_iid(model, n, stream.substream(0));
    const auto v = design.column(index - 1);
    e.value = rank_sobol(v, design.y);
    e.n = n;
    e.evaluations = design.evaluations;
    if (s.approx) {
      sigma2 = sigma2_single_sample(v, design.y);
    } else if (md.kind == "linear") {
      sigma2 = linear_sigma_components(md.alpha, md.p, index - 1).sigma2;
    } else {
      PluginOptions po;
      po.index = index - 1;
      sigma2 = sigma_plugin(model, size_of(s, "mc", 200000), stream.substream(1), po).sigma2;
    }
  }
  if (!(sigma2 >= 0.0)) throw DegenerateData("estimated variance is negative or undefined");
  const Interval ci = confidence_interval(e, sigma2, level);
  out << "index " << index << '\n'
      << "n " << e.n << '\n'
      << "estimate " << format_double(e.value) << '\n'
      << "sigma " << format_double(std::sqrt(sigma2)) << '\n'
      << "level " << format_double(level) << '\n'
      << "lo " << format_double(ci.lo) << '\n'
      << "hi " << format_double(ci.hi) << '\n';
  return kExitOk;
}

int cmd_asympt_var(const Settings& s, std::ostream& out) {
  const double alpha = s.has("alpha") ? to_double("--alpha", s.text("alpha")) : 1.0;
  const std::size_t p = s.has("p") ? single_p(s) : 2;
  const auto pf = v_pf(alpha, p);
  const auto rk = v_rank(alpha, p);
  const auto ef = v_eff(alpha, p);
  out << "index,v_pf,v_rank,v_eff\n";
  for (std::size_t i = 0; i < p; ++i)
    out << i + 1 << ',' << format_double(pf[i]) << ',' << format_double(rk[i]) << ','
        << format_double(ef[i]) << '\n';
  const auto closed = linear_sigma_components(alpha, p, 0);
  out << "sigma2 " << format_double(closed.sigma2) << '\n';
  if (s.has("mc")) {
    const auto mc = size_of(s, "mc", 0);
    const auto plugin = sigma_plugin(make_linear({alpha, p}), mc,
                                     RngStream{seed_of(s), derive_stream_id(kAsymptStream, 0)});
    out << "plugin sigma_b+sigma_c(1,1) " << format_double(plugin.sigma_b(0, 0) + plugin.sigma_c(0, 0))
        << '\n'
        << "plugin sigma2 " << format_double(plugin.sigma2) << '\n';
  }
  return kExitOk;
}

std::string json_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out += ',';
      out += json_text(v[k]);
    }
    return out;
  }
  return v.dump();
}

// Config values fill in whatever the command line left unset.
void merge_config(const std::string& path, Settings& s, const std::map<std::string, CLI::Option*>& opts,
                  const std::map<std::string, CLI::Option*>& flags) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("config '" + path + "' must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (const auto it = opts.find(key); it != opts.end()) {
      if (it->second->count() == 0) s.values[key] = json_text(value);
    } else if (const auto fl = flags.find(key); fl != flags.end()) {
      if (fl->second->count() == 0) {
        if (!value.is_boolean()) throw InvalidArgument("config key '" + key + "' must be true or false");
        (key == "svg" ? s.svg : key == "approx" ? s.approx : s.linear_x) = value.get<bool>();
      }
    } else {
      throw InvalidArgument("config '" + path + "': unknown key '" + key + "'");
    }
  }
}

struct Registered {
  std::map<std::string, CLI::Option*> opts;
  std::map<std::string, CLI::Option*> flags;
};

Registered register_options(CLI::App* app, Settings& s, std::initializer_list<const char*> names,
                            std::initializer_list<const char*> flags) {
  static const std::map<std::string, std::string> help = {
      {"model", "gfunction | linear | custom name (ishigami, product, x1, constant)"},
      {"a", "g-function coefficients, comma separated"},
      {"alpha", "linear model coefficient of X1"},
      {"p", "dimension; lists (6,10) and ranges (2..7) where a grid is expected"},
      {"n", "sample size"},
      {"budget", "model calls per replication"},
      {"reps", "number of replications"},
      {"seed", "root seed"},
      {"method", "rank-sobol | rank-cvm | pf-sn | pf-tn | pf-cvm"},
      {"data", "CSV file with columns x1..xp,y"},
      {"out", "output directory"},
      {"level", "confidence level in (0,1)"},
      {"clip", "clamp the output to [-clip, clip]"},
      {"sizes", "Pick-Freeze sizes N of the convergence study"},
      {"alpha-grid", "start:stop:step"},
      {"index", "input index (1-based)"},
      {"mc", "Monte-Carlo draws for the variance plug-in"},
      {"config", "JSON file; flags override its values"},
  };
  static const std::map<std::string, std::string> flag_help = {
      {"svg", "also write an SVG plot"},
      {"approx", "estimate the variance from the sample alone"},
      {"linear-x", "linear x axis in convergence plots"},
  };
  Registered r;
  for (const char* name : names)
    r.opts[name] = app->add_option(std::string("--") + name, s.values[name], help.at(name));
  for (const char* name : flags) {
    bool& target = std::string(name) == "svg" ? s.svg : std::string(name) == "approx" ? s.approx : s.linear_x;
    r.flags[name] = app->add_flag(std::string("--") + name, target, flag_help.at(name));
  }
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sensitivity indices from rank statistics and Pick-Freeze designs", "sensikit"};
  app.require_subcommand(1);
  Settings s;
  std::string study_kind;

  auto* estimate = app.add_subcommand("estimate", "estimate first-order indices");
  auto* study = app.add_subcommand("study", "run a replication study and write CSV/SVG");
  auto* ci = app.add_subcommand("ci", "rank Sobol' estimate with an asymptotic confidence interval");
  auto* asympt = app.add_subcommand("asympt-var", "limiting variances of the linear model");
  study->add_option("kind", study_kind, "convergence | mse | dimension | variance-compare")->required();

  std::map<CLI::App*, Registered> reg;
  reg[estimate] = register_options(
      estimate, s, {"model", "a", "alpha", "p", "n", "seed", "method", "data", "clip", "config"}, {});
  reg[study] = register_options(study, s,
                                {"model", "a", "alpha", "p", "budget", "reps", "seed", "out",
                                 "sizes", "alpha-grid", "config"},
                                {"svg", "linear-x"});
  reg[ci] = register_options(
      ci, s, {"model", "a", "alpha", "p", "n", "seed", "data", "level", "index", "mc", "config"},
      {"approx"});
  reg[asympt] = register_options(asympt, s, {"alpha", "p", "mc", "seed", "config"}, {});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (s.has("config")) merge_config(s.text("config"), s, reg[active].opts, reg[active].flags);
    if (active == estimate) return cmd_estimate(s, out, err);
    if (active == study) return cmd_study(study_kind, s, out, err);
    if (active == ci) return cmd_ci(s, out, err);
    return cmd_asympt_var(s, out);
  } catch (const DegenerateData& e) {
    err << "error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace sensikit
