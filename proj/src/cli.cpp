#include "ginibre/cli.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "ginibre/errors.hpp"
#include "ginibre/kernel_chiral.hpp"
#include "ginibre/kernel_ginibre.hpp"
#include "ginibre/mc.hpp"

namespace ginibre::cli {

using nlohmann::json;
using cplx = std::complex<double>;

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("complex values are [re, im] pairs");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

/// NaN and infinities become null so that the document stays valid JSON.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string default_format(const std::string& command) {
  return (command == "kernel" || command == "verify") ? "json" : "csv";
}

}  // namespace

json to_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"ensemble", c.ensemble},
              {"N", c.N},
              {"tau", c.tau},
              {"nu", c.nu},
              {"mu", c.mu},
              {"n", c.n},
              {"lambda", complex_json(c.lambda)},
              {"gamma", complex_json(c.gamma)},
              {"which", c.which},
              {"samples", c.samples},
              {"seed", c.seed},
              {"shards", c.shards},
              {"out", c.out},
              {"format", c.format},
              {"threshold", c.threshold},
              {"grid",
               {{"re_min", c.grid.re_min},
                {"re_max", c.grid.re_max},
                {"re_bins", c.grid.re_bins},
                {"im_min", c.grid.im_min},
                {"im_max", c.grid.im_max},
                {"im_bins", c.grid.im_bins}}},
              {"weight", c.weight},
              {"source", c.source},
              {"compare_mc", c.compare_mc},
              {"cell_order", c.cell_order},
              {"normalization", c.normalization},
              {"min_count", c.min_count},
              {"margin", c.margin}};
}

RunConfig config_from_json(const json& j) {
  try {
    RunConfig c;
    j.at("command").get_to(c.command);
    j.at("ensemble").get_to(c.ensemble);
    j.at("N").get_to(c.N);
    j.at("tau").get_to(c.tau);
    j.at("nu").get_to(c.nu);
    j.at("mu").get_to(c.mu);
    j.at("n").get_to(c.n);
    c.lambda = complex_from_json(j.at("lambda"));
    c.gamma = complex_from_json(j.at("gamma"));
    j.at("which").get_to(c.which);
    j.at("samples").get_to(c.samples);
    j.at("seed").get_to(c.seed);
    j.at("shards").get_to(c.shards);
    j.at("out").get_to(c.out);
    j.at("format").get_to(c.format);
    j.at("threshold").get_to(c.threshold);
    const json& g = j.at("grid");
    g.at("re_min").get_to(c.grid.re_min);
    g.at("re_max").get_to(c.grid.re_max);
    g.at("re_bins").get_to(c.grid.re_bins);
    g.at("im_min").get_to(c.grid.im_min);
    g.at("im_max").get_to(c.grid.im_max);
    g.at("im_bins").get_to(c.grid.im_bins);
    j.at("weight").get_to(c.weight);
    j.at("source").get_to(c.source);
    j.at("compare_mc").get_to(c.compare_mc);
    j.at("cell_order").get_to(c.cell_order);
    j.at("normalization").get_to(c.normalization);
    j.at("min_count").get_to(c.min_count);
    j.at("margin").get_to(c.margin);
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j.contains("config") ? j.at("config") : j);
  }
  std::istringstream lines(text);
  std::string line;
  const std::string tag = "# config=";
  while (std::getline(lines, line)) {
    if (line.rfind(tag, 0) == 0) {
      try {
        return config_from_json(json::parse(line.substr(tag.size())));
      } catch (const json::exception& e) {
        throw ValidationError(std::string("embedded config is not valid JSON: ") + e.what());
      }
    }
    if (line.empty() || line[0] != '#') break;
  }
  throw ValidationError("no embedded config found in '" + path + "'");
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ValidationError("empty complex number");
  const bool imaginary = s.back() == 'i' || s.back() == 'j';
  auto parse_real = [&](const std::string& part) {
    if (part.empty()) throw ValidationError("cannot parse complex number '" + text + "'");
    double value = 0.0;
    const char* begin = part.data() + (part[0] == '+' ? 1 : 0);
    const char* end = part.data() + part.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
      throw ValidationError("cannot parse complex number '" + text + "'");
    return value;
  };
  auto parse_coefficient = [&](const std::string& part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_real(part);
  };
  if (!imaginary) return {parse_real(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // The split point is the last sign that does not belong to an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_coefficient(body)};
  return {parse_real(body.substr(0, split)), parse_coefficient(body.substr(split))};
}

EnsembleParams make_params(const RunConfig& c) {
  if (c.ensemble == "elliptic") return EllipticParams(c.N, c.tau);
  if (c.ensemble == "chiral") return ChiralParams(c.N, c.nu, c.mu, c.n);
  throw ValidationError("unknown ensemble '" + c.ensemble + "'");
}

namespace {

KernelValue evaluate_f(const EnsembleParams& p, cplx l, cplx g) {
  if (const auto* e = std::get_if<EllipticParams>(&p)) return f_elliptic(l, g, *e);
  return f_chiral(l, g, std::get<ChiralParams>(p));
}

KernelValue evaluate_k(const EnsembleParams& p, cplx l, cplx g) {
  if (const auto* e = std::get_if<EllipticParams>(&p)) return k_elliptic(l, g, *e);
  return k_chiral(l, g, std::get<ChiralParams>(p));
}

}  // namespace

VerifyReport run_verify(const RunConfig& c) {
  if (c.samples < 1000) throw ValidationError("verify needs samples >= 1000");
  if (c.shards < 1) throw ValidationError("shards must be >= 1");
  if (!(c.threshold > 0.0)) throw ValidationError("threshold must be positive");
  const EnsembleParams params = make_params(c);
  VerifyReport r;
  r.closed_form = evaluate_f(params, c.lambda, c.gamma).full();
  const MCEstimate est = mc_charpoly_product(params, c.lambda, c.gamma, c.samples, c.seed, c.shards);
  r.mc_mean = est.mean;
  r.stderr = est.stderr;
  r.stderr_re = est.stderr_re;
  r.stderr_im = est.stderr_im;
  r.samples = est.samples;
  const cplx d = est.mean - r.closed_form;
  const double dev = std::max(std::abs(d.real()), std::abs(d.imag()));
  if (est.stderr > 0.0) {
    r.z_score = dev / est.stderr;
  } else {
    r.z_score = dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.pass = r.z_score <= c.threshold;
  return r;
}

namespace {

/// One output artifact: header lines, CSV body or JSON document.
class Artifact {
 public:
  explicit Artifact(const RunConfig& c) : config_(c) {}

  void header(const std::string& key, const json& value) { extra_[key] = value; }
  void warn(const std::string& message) { warnings_.push_back(message); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::string csv(const std::string& columns, const std::string& rows) const {
    std::ostringstream os;
    os << "# schema=" << kSchemaVersion << '\n';
    os << "# config=" << to_json(config_).dump() << '\n';
    for (const auto& [key, value] : extra_.items()) os << "# " << key << '=' << value.dump() << '\n';
    for (const auto& w : warnings_) os << "# warning=" << w << '\n';
    os << columns << '\n' << rows;
    return os.str();
  }

  std::string json_doc(const json& result) const {
    json doc{{"schema", kSchemaVersion}, {"config", to_json(config_)}};
    for (const auto& [key, value] : extra_.items()) doc[key] = value;
    if (!warnings_.empty()) doc["warnings"] = warnings_;
    doc["result"] = result;
    return doc.dump(2) + '\n';
  }

 private:
  RunConfig config_;
  json extra_ = json::object();
  std::vector<std::string> warnings_;
};

json kernel_json(const KernelValue& v) {
  return {{"re", v.value.real()},
          {"im", v.value.imag()},
          {"log_prefactor", v.log_prefactor},
          {"rescaled_limit", v.rescaled_limit}};
}

std::string cmd_kernel(const RunConfig& c, Artifact& art) {
  const EnsembleParams params = make_params(c);
  std::vector<std::pair<std::string, KernelValue>> values;
  if (c.which == "F" || c.which == "both") values.emplace_back("F", evaluate_f(params, c.lambda, c.gamma));
  if (c.which == "K" || c.which == "both") values.emplace_back("K", evaluate_k(params, c.lambda, c.gamma));
  if (c.format == "json") {
    json result = json::object();
    for (const auto& [name, v] : values) result[name] = kernel_json(v);
    return art.json_doc(result);
  }
  std::ostringstream rows;
  for (const auto& [name, v] : values)
    rows << name << ',' << num(v.value.real()) << ',' << num(v.value.imag()) << ','
         << num(v.log_prefactor) << ',' << (v.rescaled_limit ? "true" : "false") << '\n';
  return art.csv("quantity,re,im,log_prefactor,rescaled_limit", rows.str());
}

std::string cmd_verify(const RunConfig& c, Artifact& art, bool& pass) {
  if (c.N > 6)
    art.warn("determinant products are heavy-tailed for N > 6; treat the standard error with care");
  const VerifyReport r = run_verify(c);
  pass = r.pass;
  if (c.format == "json") {
    return art.json_doc({{"closed_form", complex_json(r.closed_form)},
                         {"mc_mean", complex_json(r.mc_mean)},
                         {"stderr", r.stderr},
                         {"stderr_re", r.stderr_re},
                         {"stderr_im", r.stderr_im},
                         {"z_score", finite_or_null(r.z_score)},
                         {"threshold", c.threshold},
                         {"pass", r.pass},
                         {"samples", r.samples}});
  }
  std::ostringstream row;
  row << num(r.closed_form.real()) << ',' << num(r.closed_form.imag()) << ','
      << num(r.mc_mean.real()) << ',' << num(r.mc_mean.imag()) << ',' << num(r.stderr) << ','
      << num(r.z_score) << ',' << (r.pass ? "true" : "false") << '\n';
  return art.csv("closed_re,closed_im,mc_re,mc_im,stderr,z_score,pass", row.str());
}

std::string cmd_density(const RunConfig& c, Artifact& art) {
  c.grid.validate();
  if (c.source != "closed" && c.source != "mc") throw ValidationError("source must be closed or mc");
  const EnsembleParams params = make_params(c);
  const bool elliptic = std::holds_alternative<EllipticParams>(params);
  const bool symmetric = elliptic && c.tau == 1.0;

  const WeightRegistry registry = WeightRegistry::with_defaults();
  const std::string weight_id =
      !c.weight.empty() ? c.weight : (elliptic && c.tau == 0.0 ? "ginibre" : "identity");
  const WeightFunction& weight = registry.get(weight_id);
  const DensityOptions opts{c.normalization == "unit" ? Normalization::UnitMass : Normalization::Raw,
                            c.cell_order};

  // The kernel for N describes complex eigenvalues of matrices with N + 2 in
  // place of N.
  EnsembleParams sampled = params;
  if (elliptic) {
    sampled = EllipticParams(c.N + 2, c.tau);
  } else {
    sampled = ChiralParams(c.N + 2, c.nu, c.mu, c.n);
  }

  auto closed_grid = [&] {
    if (symmetric) {
      art.warn("tau = 1: symmetric matrices have no complex eigenvalues; the grid is empty");
      DensityGrid g = complex_density_elliptic(c.grid, EllipticParams(c.N, 0.0), weight, opts);
      std::fill(g.values.begin(), g.values.end(), 0.0);
      g.label = "empty: no complex eigenvalues at tau = 1";
      return g;
    }
    if (elliptic) return complex_density_elliptic(c.grid, std::get<EllipticParams>(params), weight, opts);
    return complex_density_chiral(c.grid, std::get<ChiralParams>(params), weight, opts);
  };
  auto histogram = [&] {
    if (c.samples < 1) throw ValidationError("samples must be >= 1");
    return mc_density_histogram(sampled, c.samples, c.grid, c.seed, c.shards);
  };

  const int cells = c.grid.re_bins * c.grid.im_bins;
  std::ostringstream rows;
  json result;
  if (c.compare_mc) {
    const DensityGrid closed = closed_grid();
    const DensityGrid hist = histogram();
    const DensityComparison cmp = compare_density(closed, hist, c.min_count);
    const json summary{{"constant", cmp.constant},
                       {"max_relative_deviation", cmp.max_relative_deviation},
                       {"cells_used", cmp.cells_used},
                       {"min_count", c.min_count},
                       {"total_complex", hist.total_complex}};
    art.header("comparison", summary);
    art.header("label", closed.label);
    json cells_json = json::array();
    for (int k = 0; k < cells; ++k) {
      const double re = closed.re_axis[k % c.grid.re_bins];
      const double im = closed.im_axis[k / c.grid.re_bins];
      if (c.format == "json")
        cells_json.push_back({re, im, closed.values[k], hist.values[k], hist.counts[k]});
      else
        rows << num(re) << ',' << num(im) << ',' << num(closed.values[k]) << ','
             << num(hist.values[k]) << ',' << hist.counts[k] << '\n';
    }
    if (c.format == "json") return art.json_doc({{"columns", {"re", "im", "closed", "mc", "count"}}, {"cells", cells_json}});
    return art.csv("re,im,closed,mc,count", rows.str());
  }

  const bool from_mc = c.source == "mc";
  const DensityGrid g = from_mc ? histogram() : closed_grid();
  art.header("label", g.label);
  if (from_mc) art.header("total_complex", g.total_complex);
  json cells_json = json::array();
  for (int k = 0; k < cells; ++k) {
    const double re = g.re_axis[k % c.grid.re_bins];
    const double im = g.im_axis[k / c.grid.re_bins];
    if (c.format == "json") {
      json cell = {re, im, g.values[k]};
      if (from_mc) cell.push_back(g.counts[k]);
      cells_json.push_back(cell);
    } else {
      rows << num(re) << ',' << num(im) << ',' << num(g.values[k]);
      if (from_mc) rows << ',' << g.counts[k];
      rows << '\n';
    }
  }
  if (c.format == "json") {
    json columns = from_mc ? json{"re", "im", "value", "count"} : json{"re", "im", "value"};
    return art.json_doc({{"columns", columns}, {"cells", cells_json}});
  }
  return art.csv(from_mc ? "re,im,value,count" : "re,im,value", rows.str());
}

json summary_json(const SpectrumSummary& s) {
  return {{"samples", s.samples},
          {"eigenvalues", s.eigenvalues},
          {"real_count", s.real_count},
          {"pair_count", s.pair_count},
          {"zero_count", s.zero_count},
          {"fraction_real", s.fraction_real},
          {"mean_zero_count", s.mean_zero_count},
          {"min_zero_count", s.min_zero_count},
          {"max_zero_count", s.max_zero_count},
          {"outside_fraction", finite_or_null(s.outside_fraction)},
          {"semi_axis_re", finite_or_null(s.semi_axis_re)},
          {"semi_axis_im", finite_or_null(s.semi_axis_im)},
          {"max_pairing_residual", s.max_pairing_residual},
          {"max_chiral_residual", finite_or_null(s.max_chiral_residual)}};
}

std::string cmd_spectrum(const RunConfig& c, Artifact& art) {
  if (c.samples < 1) throw ValidationError("samples must be >= 1");
  if (c.margin < 0.0) throw ValidationError("margin must be non-negative");
  const EnsembleParams params = make_params(c);
  std::ostringstream rows;
  json records = json::array();
  const bool as_json = c.format == "json";
  SpectrumOptions opts;
  opts.margin = c.margin;
  const SpectrumSummary summary = spectrum_ensemble(
      params, c.samples, c.seed, c.shards, opts, [&](std::int64_t index, const SpectrumSample& s) {
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
          const cplx z = s.eigenvalues[k];
          if (as_json)
            records.push_back({index, z.real(), z.imag(), std::string(1, s.classes[k])});
          else
            rows << index << ',' << num(z.real()) << ',' << num(z.imag()) << ',' << s.classes[k]
                 << '\n';
        }
      });
  art.header("summary", summary_json(summary));
  if (as_json)
    return art.json_doc({{"columns", {"sample_index", "re", "im", "class"}}, {"rows", records}});
  return art.csv("sample_index,re,im,class", rows.str());
}

std::string cmd_selftest(const RunConfig& c, Artifact& art, bool inject_fault, bool& pass,
                         std::ostream& err) {
  const auto checks = run_selftest(c.seed, inject_fault);
  pass = true;
  int passed = 0;
  for (const auto& ch : checks) {
    pass = pass && ch.pass;
    passed += ch.pass ? 1 : 0;
    err << "timing " << ch.name << ' ' << num(std::round(ch.millis * 10.0) / 10.0) << " ms\n";
  }
  if (c.format == "json") {
    json list = json::array();
    for (const auto& ch : checks)
      list.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    return art.json_doc({{"checks", list}, {"passed", passed}, {"total", checks.size()}, {"pass", pass}});
  }
  std::ostringstream rows;
  for (const auto& ch : checks)
    rows << ch.name << ',' << (ch.pass ? "PASS" : "FAIL") << ",\"" << ch.detail << "\"\n";
  return art.csv("check,status,detail", rows.str());
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out);
  if (!file) throw ValidationError("cannot write output file '" + c.out + "'");
  file << text;
  if (!file) throw NumericalError("write to '" + c.out + "' failed");
}

struct Flags {
  std::string config_path;
  std::string lambda_text, gamma_text;
  double lambda_re = 0.0, lambda_im = 0.0, gamma_re = 0.0, gamma_im = 0.0;
  bool inject_fault = false;
};

void add_common(CLI::App* sub, RunConfig& c, Flags& f) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--shards", c.shards, "Independent sample streams")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--samples", c.samples, "Monte-Carlo samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--out", c.out, "Output file (default: stdout)");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--config", f.config_path, "Rerun from a config or output artifact");
}

void add_ensemble(CLI::App* sub, RunConfig& c) {
  sub->add_option("--ensemble", c.ensemble, "elliptic or chiral")
      ->check(CLI::IsMember({"elliptic", "chiral"}))
      ->capture_default_str();
  sub->add_option("--N", c.N, "Matrix size parameter")->capture_default_str();
  sub->add_option("--tau", c.tau, "Elliptic: symmetry parameter in [0, 1]")->capture_default_str();
  sub->add_option("--nu", c.nu, "Chiral: rectangularity (non-negative integer)")->capture_default_str();
  sub->add_option("--mu", c.mu, "Chiral: asymmetry in [0, 1]")->capture_default_str();
  sub->add_option("--n", c.n, "Chiral: inverse variance")->capture_default_str();
}

void add_points(CLI::App* sub, Flags& f) {
  auto* l = sub->add_option("--lambda", f.lambda_text, "First argument, e.g. 0.7+0.3i");
  auto* g = sub->add_option("--gamma", f.gamma_text, "Second argument, e.g. 0.7-0.3i");
  sub->add_option("--lambda-re", f.lambda_re)->excludes(l);
  sub->add_option("--lambda-im", f.lambda_im)->excludes(l);
  sub->add_option("--gamma-re", f.gamma_re)->excludes(g);
  sub->add_option("--gamma-im", f.gamma_im)->excludes(g);
}

void add_grid(CLI::App* sub, RunConfig& c) {
  sub->add_option("--re-min", c.grid.re_min)->capture_default_str();
  sub->add_option("--re-max", c.grid.re_max)->capture_default_str();
  sub->add_option("--re-bins", c.grid.re_bins)->capture_default_str();
  sub->add_option("--im-min", c.grid.im_min)->capture_default_str();
  sub->add_option("--im-max", c.grid.im_max)->capture_default_str();
  sub->add_option("--im-bins", c.grid.im_bins)->capture_default_str();
}

/// With --config only --out and --format may accompany it.
void check_config_exclusive(const CLI::App* sub) {
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name();
    if (opt->count() == 0 || name == "--config" || name == "--out" || name == "--format") continue;
    throw ValidationError("--config cannot be combined with " + name);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Averaged characteristic polynomials and kernels of real Ginibre ensembles"};
  app.require_subcommand(1);
  RunConfig c;
  Flags f;

  auto* kernel = app.add_subcommand("kernel", "Evaluate F and K in closed form");
  add_common(kernel, c, f);
  add_ensemble(kernel, c);
  add_points(kernel, f);
  kernel->add_option("--which", c.which, "F, K or both")
      ->check(CLI::IsMember({"F", "K", "both"}))
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Compare the closed form of F to Monte Carlo");
  add_common(verify, c, f);
  add_ensemble(verify, c);
  add_points(verify, f);
  verify->add_option("--threshold", c.threshold, "Pass iff |z| <= threshold")->capture_default_str();

  auto* density = app.add_subcommand("density", "Complex-eigenvalue density grids");
  add_common(density, c, f);
  add_ensemble(density, c);
  add_grid(density, c);
  density->add_option("--weight", c.weight, "Weight id (default: ginibre at tau = 0, else identity)");
  density->add_option("--source", c.source, "closed or mc")
      ->check(CLI::IsMember({"closed", "mc"}))
      ->capture_default_str();
  density->add_flag("--compare-mc", c.compare_mc, "Fit the closed form to an MC histogram");
  density->add_option("--cell-order", c.cell_order, "Gauss-Legendre points per cell axis")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  density->add_option("--normalization", c.normalization, "raw or unit")
      ->check(CLI::IsMember({"raw", "unit"}))
      ->capture_default_str();
  density->add_option("--min-count", c.min_count, "Histogram count needed for comparison")
      ->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "Sampled eigenvalues with classification");
  add_common(spectrum, c, f);
  add_ensemble(spectrum, c);
  spectrum->add_option("--margin", c.margin, "Support ellipse inflation")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite at desk scale");
  add_common(selftest, c, f);
  selftest->add_flag("--inject-fault", f.inject_fault)->group("");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    c.command = active->get_name();
    if (!f.config_path.empty()) {
      check_config_exclusive(active);
      const RunConfig loaded = load_config(f.config_path);
      if (loaded.command != c.command)
        throw ValidationError("config was produced by '" + loaded.command + "', not '" + c.command +
                              "'");
      const std::string out_path = c.out, format = c.format;
      c = loaded;
      if (active->get_option("--out")->count()) c.out = out_path;
      if (active->get_option("--format")->count()) c.format = format;
    } else if (c.command == "kernel" || c.command == "verify") {
      c.lambda = f.lambda_text.empty() ? cplx(f.lambda_re, f.lambda_im) : parse_complex(f.lambda_text);
      c.gamma = f.gamma_text.empty() ? cplx(f.gamma_re, f.gamma_im) : parse_complex(f.gamma_text);
    }
    if (c.format.empty()) c.format = default_format(c.command);

    Artifact art(c);
    std::string text;
    bool pass = true;
    if (c.command == "kernel") {
      text = cmd_kernel(c, art);
    } else if (c.command == "verify") {
      text = cmd_verify(c, art, pass);
    } else if (c.command == "density") {
      text = cmd_density(c, art);
    } else if (c.command == "spectrum") {
      text = cmd_spectrum(c, art);
    } else {
      text = cmd_selftest(c, art, f.inject_fault, pass, err);
    }
    for (const auto& w : art.warnings()) err << "warning: " << w << '\n';
    emit(c, text, out);
    return pass ? kOk : kVerificationFailed;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace ginibre::cli
