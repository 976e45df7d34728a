#include "inflex/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "inflex/config.hpp"
#include "inflex/conjecture.hpp"
#include "inflex/errors.hpp"
#include "inflex/extender.hpp"
#include "inflex/format.hpp"
#include "inflex/polyext.hpp"
#include "inflex/random.hpp"
#include "inflex/spectral.hpp"

namespace inflex::cli {
namespace {

namespace fs = std::filesystem;

std::string format_value(const std::string& v) { return v; }
std::string format_value(double v) { return shortest(v); }
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(std::uint64_t v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::vector<double>& v) { return join_shortest(v, ','); }
std::string format_value(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct RunConfig {
  std::string command;
  std::string model = "gaussian";
  int dim = 1;
  int n = 3;
  int d = 0;
  double m = 4.0;
  std::vector<double> m_schedule;
  std::vector<double> jet{1, 0, 0};
  std::string orientation = "increasing";
  std::vector<double> k;
  int grid_points = 64;
  int samples = 10;
  int k_samples = 24;
  double k_min = 5.0;
  double k_max = 50.0;
  int alpha_p = 14;
  int points = 10;
  std::vector<double> k_region{0.5, 2.0};
  int ratio_samples = 20;
  double theta = 1.0;
  double phi = 0.7;
  std::vector<double> radii{0.5, 0.1, 1e-2, 1e-3, 1e-4, 1e-5};
  double final_bound = 0.0;
  std::vector<int> n_range{3, 4, 5, 6};
  int trials = 25;
  std::string jets = "generic";
  std::uint64_t seed = 1;
  bool csv = false;
  double seam_tol = kDefaultTolerances.seam_rel;
  double ratio_tol = kDefaultTolerances.ratio_identity;
  double radial_tol = kDefaultTolerances.radial_limit;
  std::string out;
};

// Registers flags and remembers how to print each one, in declaration order.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& desc) {
    CLI::Option* opt;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app_->add_flag("--" + key, var, desc);
    } else if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<int>>) {
      // lists arrive as one comma-joined token so a later flag replaces an earlier one
      auto text = std::make_shared<std::string>();
      opt = app_->add_option("--" + key, *text, desc);
      converters_.push_back([text, &var, key, opt] {
        if (opt->count() == 0) return;
        var.clear();
        std::stringstream in(*text);
        std::string item;
        while (std::getline(in, item, ',')) {
          typename T::value_type x{};
          if (!CLI::detail::lexical_cast(item, x)) throw CLI::ConversionError("--" + key, item);
          var.push_back(x);
        }
      });
      holders_.push_back(text);
    } else {
      opt = app_->add_option("--" + key, var, desc);
    }
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    fields_.push_back({key, [&var] { return format_value(var); }, opt});
    return opt;
  }

  /// Converts list flags; throws CLI::ConversionError on bad items.
  void finish() const {
    for (const auto& convert : converters_) convert();
  }

  bool given(const std::string& key) const {
    for (const auto& f : fields_)
      if (f.key == key) return f.opt->count() > 0;
    return false;
  }

  std::string to_text() const {
    std::string s;
    for (const auto& f : fields_) s += f.key + " = " + f.show() + "\n";
    return s;
  }

  Json to_json() const {
    Json j = Json::object();
    for (const auto& f : fields_) j[f.key] = f.show();
    return j;
  }

 private:
  struct Field {
    std::string key;
    std::function<std::string()> show;
    CLI::Option* opt;
  };
  CLI::App* app_;
  std::vector<Field> fields_;
  std::vector<std::shared_ptr<std::string>> holders_;
  std::vector<std::function<void()>> converters_;
};

ModelPtr build_model(const RunConfig& c) {
  if (c.dim < 1 || c.dim > 3) throw InvalidInput("--dim must be 1, 2 or 3");
  return parse_model(c.model, c.dim);
}

ExtensionSpec base_spec(const RunConfig& c) {
  if (c.n < 1 || c.n > 20) throw InvalidInput("--n must lie in 1..20");
  if (c.d < 0) throw InvalidInput("--d must be non-negative");
  return ExtensionSpec{c.dim, c.m, c.n, c.d, build_model(c)};
}

std::vector<double> schedule_or(const RunConfig& c, std::vector<double> fallback) {
  return c.m_schedule.empty() ? fallback : c.m_schedule;
}

fs::path output_dir(const RunConfig& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("INFLEX_OUT_DIR"); env && *env) return env;
  return fs::current_path();
}

struct Outcome {
  VerificationReport report;
  bool evidence_only = false;
  std::vector<std::string> files;
};

// ---- commands ----

Outcome run_collar(const RunConfig& c) {
  Outcome o;
  VerificationReport& rep = o.report;
  if (static_cast<int>(c.jet.size()) != c.n)
    throw InvalidInput("--jet has " + std::to_string(c.jet.size()) + " entries, --n is " + std::to_string(c.n));
  if (c.n < 1 || c.n > 20) throw InvalidInput("--n must lie in 1..20");
  if (!(c.m > 0)) throw InvalidInput("--m must be positive");
  if (c.orientation != "increasing" && c.orientation != "decreasing")
    throw InvalidInput("--orientation must be increasing or decreasing");
  const Orientation orient = c.orientation == "increasing" ? Orientation::increasing : Orientation::decreasing;
  const BoundaryJet jet(c.jet);
  const Collar collar = Collar::for_m(c.m, c.d, orient);
  const CollarPolynomial h(jet, collar);
  const double scale = 1 + jet.max_abs();
  for (int i = 0; i < c.n; ++i) {
    const double inner = h.eval(collar.inner_edge(), i);
    rep.add_upper("h^(" + std::to_string(i) + ") matches a_" + std::to_string(i) + " at the inner edge",
                  std::abs(inner - jet[i]) / (1 + std::abs(jet[i])), kDefaultTolerances.jet_residual_rel);
    rep.add_upper("h^(" + std::to_string(i) + ") vanishes at the outer edge",
                  std::abs(h.eval(collar.outer_edge(), i)) / scale, kDefaultTolerances.jet_residual_rel);
  }
  const SignClass sign = check_sign_definite(h);
  const auto roots = nth_derivative_collar_roots(h);
  std::string note = std::string(to_string(sign));
  if (c.n == 2 && jet[0] > 0 && jet[1] > 0)
    note += "; n=2 impossibility: with a_0 > 0 and a_1 > 0 no extension to zero has a sign-definite second derivative";
  rep.add("h^(n) sign-definite on the collar", static_cast<double>(roots.size()), 0.0, 0.0,
          is_definite(sign) || sign == SignClass::identically_zero, note);
  if (is_definite(sign)) {
    const double l1 = nth_derivative_l1(h);
    const double target = std::abs(jet[c.n - 1]);
    rep.add_upper("|integral |h^(n)| - |a_{n-1}||", std::abs(l1 - target), kDefaultTolerances.ftc_rel * (1 + target));
  }
  rep.details["sign_class"] = std::string(to_string(sign));
  rep.details["collar"] = {{"inner", collar.inner_edge()}, {"outer", collar.outer_edge()}, {"width", collar.width()}};
  rep.details["collar_roots_of_h_n"] = roots;
  rep.details["sup_norm"] = sup_norm(h);
  rep.details["nth_derivative_l1"] = nth_derivative_l1(h);
  const AdmissibleM adm = min_admissible_m(jet, c.d);
  rep.details["min_admissible_m"] = adm.m ? Json(*adm.m) : Json(nullptr);
  return o;
}

Outcome run_extend(const RunConfig& c) {
  Outcome o;
  VerificationReport& rep = o.report;
  ExtensionSpec spec = base_spec(c);
  const std::vector<double> schedule = schedule_or(c, {c.m});
  spec.m = schedule.front();
  const Extension ext(spec);
  VerificationReport seams = seam_report(ext, c.samples);
  for (auto& check : seams.checks) {
    check.bound = c.seam_tol;
    check.pass = !std::isnan(check.measured) && check.measured <= c.seam_tol;
  }
  rep.merge(seams, "seams");

  // interior is the model itself; beyond C_{m+w} everything vanishes
  std::mt19937_64 rng(c.seed);
  int interior_bad = 0, exterior_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    Point x{0, 0, 0};
    for (int a = 0; a < c.dim; ++a) x[a] = uniform(rng, -1.5 * ext.outer(), 1.5 * ext.outer());
    const Region r = ext.classify(x);
    if (r == Region::interior && ext.eval(x) != spec.model->value(x)) ++interior_bad;
    if (r == Region::outside && ext.eval(x) != 0.0) ++exterior_bad;
  }
  rep.add_upper("interior points differing from the model", interior_bad, 0.0);
  rep.add_upper("exterior points with nonzero value", exterior_bad, 0.0);

  const NormBudget budget = norm_budget(ext);
  Json cases = Json::array();
  for (const auto& cs : budget.cases) cases.push_back({{"label", cs.label}, {"axis", cs.axis}, {"value", cs.value}});
  rep.details["norm_budget"] = {{"m", spec.m}, {"cases", cases},
                                {"per_axis", std::vector<double>(budget.per_axis.begin(), budget.per_axis.begin() + c.dim)}};
  const CollarNorms norms = collar_l1(ext);
  rep.details["collar"] = {{"l1", norms.l1}, {"sup", norms.sup}, {"sup_bound", norms.sup_bound}};
  rep.details["sign_samples"] = ext.sign_samples();
  if (schedule.size() >= 2) {
    rep.merge(budget_scaling(spec, schedule), "budget");
    rep.merge(collar_bound_check(spec, schedule), "collar");
  }
  if (c.csv) {
    const fs::path path = output_dir(c) / "extend_field.csv";
    export_field(ext, covering_grid(ext, c.grid_points), path);
    o.files.push_back(path.string());
  }
  return o;
}

Outcome run_transform(const RunConfig& c) {
  Outcome o;
  VerificationReport& rep = o.report;
  const ExtensionSpec spec = base_spec(c);
  const Extension ext(spec);
  WaveVector k{0, 0, 0};
  if (c.k.empty()) {
    for (int a = 0; a < c.dim; ++a) k[a] = 1.0;
  } else {
    if (static_cast<int>(c.k.size()) != c.dim) throw InvalidInput("--k needs one component per dimension");
    for (int a = 0; a < c.dim; ++a) k[a] = c.k[a];
  }
  double kmax = 0;
  for (int a = 0; a < c.dim; ++a) kmax = std::max(kmax, std::abs(k[a]));
  const TransformPlan plan(extension_source(ext), kmax);
  const SpectralValue v = plan.evaluate(k);
  const double c_norm = transform_normalization(c.dim);
  rep.add_upper("panel refinement estimate of F(f_m)(k)", v.error_estimate,
                kDefaultTolerances.transform_rel * std::abs(v.value) + 1e-10 * c_norm * plan.l1());
  rep.details["k"] = std::vector<double>(k.begin(), k.begin() + c.dim);
  rep.details["value"] = {{"re", v.value.real()}, {"im", v.value.imag()}};
  rep.details["abs"] = std::abs(v.value);
  rep.details["nodes"] = plan.nodes();
  if (c.csv) {
    const GridSpec grid = covering_grid(ext, c.grid_points);
    const SampledField field = sample_field([&ext](const Point& x) { return ext.eval(x); }, c.dim, grid);
    const fs::path dir = output_dir(c);
    export_field(ext, grid, dir / "transform_field.csv");
    export_spectrum_csv(ft_grid(field), dir / "transform_spectrum.csv");
    o.files.push_back((dir / "transform_field.csv").string());
    o.files.push_back((dir / "transform_spectrum.csv").string());
  }
  return o;
}

Outcome run_verify_decay(const RunConfig& c) {
  Outcome o;
  VerificationReport& rep = o.report;
  const ExtensionSpec spec = base_spec(c);
  const std::vector<double> schedule = schedule_or(c, {4, 8, 16});
  const auto ks = generic_k_samples(c.dim, c.k_samples, c.k_min, c.k_max, c.seed);
  rep.merge(decay_bound_check(spec, schedule, ks), "decay_bound");

  ExtensionSpec first = spec;
  first.m = schedule.front();
  const Extension ext(first);
  const DecayFit fit = decay_exponent_fit(extension_source(ext), ks.front(), c.k_min, c.k_max);
  Json fj = {{"m", first.m},
             {"direction", std::vector<double>(fit.direction.begin(), fit.direction.begin() + c.dim)},
             {"floor", fit.floor},
             {"used_windows", fit.used},
             {"rejected", fit.rejected}};
  if (fit.rejected) {
    fj["note"] = fit.note;
  } else {
    fj["exponent"] = fit.exponent;
    fj["constant"] = fit.constant;
    rep.add_upper("decay exponent of F(f_m) along a generic ray", fit.exponent, -c.n + 0.5);
  }
  rep.details["decay_fit"] = fj;

  const AlphaMin am = alpha_min(c.alpha_p);
  const double symmetric = std::pow(3.0, 1.0 - 0.5 * c.alpha_p);
  rep.add_upper("|alpha_min - 3^(1-p/2)|", std::abs(am.value - symmetric), 1e-9);
  rep.details["alpha_min"] = {{"p", c.alpha_p}, {"value", am.value}, {"theta", am.theta}, {"phi", am.phi}};
  return o;
}

std::vector<Point> sample_points(int dim, int count) {
  std::vector<Point> xs;
  const Point dir{1.0, 0.6, 0.3};
  for (int i = 0; i < count; ++i) {
    const double s = count == 1 ? 0.0 : -2.0 + 4.0 * i / (count - 1);
    Point x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = s * dir[a];
    xs.push_back(x);
  }
  return xs;
}

Outcome run_verify_inversion(const RunConfig& c) {
  Outcome o;
  VerificationReport& rep = o.report;
  const ExtensionSpec spec = base_spec(c);
  const std::vector<double> schedule = schedule_or(c, c.dim == 3 ? std::vector<double>{3, 5} : std::vector<double>{4, 8});
  rep.merge(probe_declared_decay(*spec.model, doubling_radii(1024.0), c.seed), "decay_class");
  rep.merge(ft_convergence(spec, schedule, axis_avoiding_region(c.dim, c.k_region)), "ft_convergence");
  const auto xs = sample_points(c.dim, c.points);
  std::optional<double> bound;
  if (c.final_bound > 0) bound = c.final_bound;
  rep.merge(inversion_error(spec, schedule, xs, 0.0, bound), "inversion");
  const auto ks = generic_k_samples(c.dim, c.ratio_samples, 0.5, 5.0, c.seed);
  VerificationReport ratios = verify_ratio_identities(spec.model, ks);
  for (auto& check : ratios.checks)
    if (check.name.find("i k_") != std::string::npos) {
      check.bound = c.ratio_tol;
      check.pass = !std::isnan(check.measured) && check.measured <= c.ratio_tol;
    }
  rep.merge(ratios, "ratio");
  rep.merge(radial_limit_check(spec.model, c.theta, c.phi, c.radii, c.radial_tol), "radial");
  return o;
}

Outcome run_conjecture(const RunConfig& c) {
  Outcome o;
  o.evidence_only = true;
  if (c.jets != "generic" && c.jets != "positive") throw InvalidInput("--jets must be generic or positive");
  const std::vector<double> schedule = schedule_or(c, default_conjecture_schedule());
  const ConjectureReport scan = conjecture_scan(c.n_range, c.trials, schedule, c.seed,
                                                c.jets == "positive" ? JetMode::positive : JetMode::generic,
                                                c.d);
  o.report.details["conjecture"] = scan.to_json();
  return o;
}

std::string usage_line(const CLI::App& app) { return app.help("", CLI::AppFormatMode::Normal); }

}  // namespace

std::vector<std::string> config_to_args(const std::string& text) {
  std::vector<std::string> args;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line without '=': " + line);
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) continue;  // unset, keep the default
    args.push_back("--" + trim(line.substr(0, eq)) + "=" + value);
  }
  return args;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"inflex: smooth compactly supported extensions and their Fourier checks", "inflex"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every command");

  RunConfig c;
  std::string config_path;
  bool print_config = false;
  std::map<std::string, std::unique_ptr<Flags>> flags;
  std::map<std::string, std::function<Outcome(const RunConfig&)>> runners;

  auto common = [&](CLI::App* sub, Flags& f) {
    sub->add_option("--config", config_path, "Read flags from a 'key = value' file (flags given later win)");
    sub->add_flag("--print-config", print_config, "Print the effective configuration and exit");
    f.add("seed", c.seed, "Seed for every random choice");
    f.add("out", c.out, "Output directory (default $INFLEX_OUT_DIR, else the working directory)");
  };
  auto model_flags = [&](Flags& f) {
    f.add("model", c.model, "Model, e.g. gaussian, gaussian{sigma=2}, rational{C=1,p=3}, product{..}{..}");
    f.add("dim", c.dim, "Dimension (1-3)");
    f.add("n", c.n, "Extension order n");
    f.add("d", c.d, "Collar exponent d, width 1/m^d (0: the dimension)");
  };

  {
    auto* sub = app.add_subcommand("collar", "Build one collar polynomial and check jet matching and sign");
    auto& f = *(flags["collar"] = std::make_unique<Flags>(sub));
    f.add("n", c.n, "Jet length n");
    f.add("jet", c.jet, "Boundary jet a_0,...,a_{n-1}");
    f.add("m", c.m, "Inner edge m");
    f.add("d", c.d, "Collar exponent d");
    f.add("orientation", c.orientation, "increasing or decreasing");
    common(sub, f);
    runners["collar"] = run_collar;
  }
  {
    auto* sub = app.add_subcommand("extend", "Build f_m and report seams, norm budgets and collar bounds");
    auto& f = *(flags["extend"] = std::make_unique<Flags>(sub));
    model_flags(f);
    f.add("m-schedule", c.m_schedule, "m values; two or more add budget and collar scaling checks");
    f.add("samples", c.samples, "Tangential samples per seam");
    f.add("seam-tol", c.seam_tol, "Relative seam mismatch tolerance");
    f.add("csv", c.csv, "Write the field as CSV");
    f.add("grid-points", c.grid_points, "CSV grid points per axis");
    common(sub, f);
    runners["extend"] = run_extend;
  }
  {
    auto* sub = app.add_subcommand("transform", "Fourier transform of f_m at a wave vector, optional grid export");
    auto& f = *(flags["transform"] = std::make_unique<Flags>(sub));
    model_flags(f);
    f.add("m", c.m, "Cube half-width m");
    f.add("k", c.k, "Wave vector components (default all ones)");
    f.add("csv", c.csv, "Write the field and its FFT spectrum as CSV");
    f.add("grid-points", c.grid_points, "Grid points per axis for the FFT export");
    common(sub, f);
    runners["transform"] = run_transform;
  }
  {
    auto* sub = app.add_subcommand("verify-decay", "Spectral decay bound, decay exponent and alpha minimum");
    auto& f = *(flags["verify-decay"] = std::make_unique<Flags>(sub));
    model_flags(f);
    f.add("m-schedule", c.m_schedule, "m values (default 4,8,16)");
    f.add("k-samples", c.k_samples, "Generic wave vectors");
    f.add("k-min", c.k_min, "Smallest |k|");
    f.add("k-max", c.k_max, "Largest |k|");
    f.add("alpha-p", c.alpha_p, "Even exponent p of alpha");
    common(sub, f);
    runners["verify-decay"] = run_verify_decay;
  }
  {
    auto* sub = app.add_subcommand("verify-inversion", "Transform convergence, inversion, ratio identities, radial limit");
    auto& f = *(flags["verify-inversion"] = std::make_unique<Flags>(sub));
    model_flags(f);
    f.add("m-schedule", c.m_schedule, "m values (default 4,8; 3,5 in 3D)");
    f.add("k-region", c.k_region, "Per-axis |k| magnitudes of the convergence region");
    f.add("points", c.points, "Inversion sample points on a segment through the origin");
    f.add("final-bound", c.final_bound, "Bound on the inversion error at the largest m (0: report only)");
    f.add("ratio-samples", c.ratio_samples, "Wave vectors for the ratio identities");
    f.add("ratio-tol", c.ratio_tol, "Ratio identity tolerance");
    f.add("theta", c.theta, "Polar angle of the radial-limit ray");
    f.add("phi", c.phi, "Azimuth of the radial-limit ray");
    f.add("radii", c.radii, "Decreasing radii of the radial limit");
    f.add("radial-tol", c.radial_tol, "Bound on |r F| at the last radius");
    common(sub, f);
    runners["verify-inversion"] = run_verify_inversion;
  }
  {
    auto* sub = app.add_subcommand("conjecture", "Seeded scan of collar roots of h^(n) (evidence only)");
    auto& f = *(flags["conjecture"] = std::make_unique<Flags>(sub));
    f.add("n-range", c.n_range, "Orders n to scan (2..10; n=2 needs --jets positive)");
    f.add("trials", c.trials, "Trials per n");
    f.add("m-schedule", c.m_schedule, "m values (default 2^4..2^14)");
    f.add("jets", c.jets, "generic or positive");
    f.add("d", c.d, "Collar exponent d");
    common(sub, f);
    runners["conjecture"] = run_conjecture;
  }

  // a --config file expands into flags placed right after the command name, before the explicit ones
  std::vector<std::string> args;
  std::vector<std::string> from_config;
  try {
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
      std::string path;
      if (raw_args[i] == "--config" && i + 1 < raw_args.size()) {
        path = raw_args[++i];
      } else if (raw_args[i].rfind("--config=", 0) == 0) {
        path = raw_args[i].substr(9);
      } else {
        args.push_back(raw_args[i]);
        continue;
      }
      std::ifstream in(path);
      if (!in) throw InvalidInput("cannot read config file " + path);
      std::stringstream text;
      text << in.rdbuf();
      const auto expanded = config_to_args(text.str());
      from_config.insert(from_config.end(), expanded.begin(), expanded.end());
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  auto at = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return runners.count(a) > 0; });
  if (at != args.end()) ++at;
  args.insert(at, from_config.begin(), from_config.end());

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage_line(app);
    return kInvalidInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  Flags& f = *flags[c.command];
  try {
    f.finish();
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    return kInvalidInput;
  }
  // defaults that differ between commands
  if (!f.given("dim")) c.dim = (c.command == "extend" || c.command == "verify-decay") ? 2 : 1;
  if (!f.given("d")) c.d = (c.command == "collar" || c.command == "conjecture") ? 1 : 0;
  if (!f.given("m")) c.m = c.command == "collar" ? 100.0 : 4.0;
  if (c.command == "verify-inversion" && !f.given("final-bound"))
    c.final_bound = c.dim == 1 && c.model == "gaussian" ? kDefaultTolerances.inversion_final : 0.0;
  const std::string config_text = f.to_text();
  if (print_config) {
    out << config_text;
    return kPass;
  }

  Json report;
  report["schema_version"] = 1;
  report["command"] = c.command;
  report["effective_config"] = f.to_json();
  int code = kPass;
  Outcome outcome;
  try {
    outcome = runners[c.command](c);
    outcome.report.name = c.command;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n\n" << sub->help();
    return kInvalidInput;
  } catch (const AccuracyFailure& e) {
    outcome.report.name = c.command;
    outcome.report.add("computation completed", 1.0, 0.0, 0.0, false, std::string("accuracy failure: ") + e.what());
  }
  const bool passed = outcome.report.passed();
  if (!outcome.evidence_only && !passed) code = kCheckFailure;
  Json checks = Json::array();
  for (const auto& check : outcome.report.checks) checks.push_back(to_json(check));
  report["checks"] = checks;
  report["status"] = outcome.evidence_only ? "evidence-only" : (passed ? "pass" : "fail");
  report["evidence_only"] = outcome.evidence_only;
  report["details"] = outcome.report.details;
  if (!outcome.files.empty()) report["files"] = outcome.files;
  report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    const fs::path dir = output_dir(c);
    fs::create_directories(dir);
    const fs::path report_path = dir / (c.command + ".json");
    std::ofstream(report_path) << report.dump(2) << "\n";
    std::ofstream(dir / (c.command + ".config")) << config_text;
    out << c.command << ": " << report["status"].get<std::string>() << " (" << outcome.report.checks.size()
        << " checks) -> " << report_path.string() << "\n";
    for (const auto& check : outcome.report.checks)
      if (!check.pass) out << "  FAIL " << check.name << ": " << shortest(check.measured) << " > " << shortest(check.bound) << "\n";
  } catch (const std::exception& e) {
    err << "error: cannot write report: " << e.what() << "\n";
    return kInvalidInput;
  }
  return code;
}

}  // namespace inflex::cli
