#include "mcse/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "mcse/ar1.hpp"
#include "mcse/audit.hpp"
#include "mcse/errors.hpp"
#include "mcse/experiments.hpp"
#include "mcse/inference.hpp"
#include "mcse/probit.hpp"
#include "mcse/report.hpp"

namespace mcse {

namespace {

// Stream reserved for the reference run that supplies synthetic-probit truth.
constexpr std::uint64_t kTruthStream = std::uint64_t{1} << 62;

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    std::string item(text.substr(start, end - start));
    if (item.empty()) throw ConfigError("empty item in list '" + std::string(text) + "'");
    out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view text, const std::string& what) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw ConfigError("invalid " + what + " '" + s + "'");
  }
  return v;
}

std::vector<double> parse_reals(std::string_view text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, what));
  return out;
}

// Shortest text that reads back to the same double; used in headers.
std::string short_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

std::string join_counts(const std::vector<std::size_t>& items) {
  std::vector<std::string> s;
  for (const auto v : items) s.push_back(std::to_string(v));
  return join(s);
}

std::string join_reals(const std::vector<double>& items) {
  std::vector<std::string> s;
  for (const auto v : items) s.push_back(short_double(v));
  return join(s);
}

// bm | obm | brt | th | pobm:stride=<k> | sv:<window>
Method parse_method_name(const std::string& name) {
  if (name == "bm") return Method::bm();
  if (name == "obm") return Method::obm();
  if (name == "brt") return Method::sv(LagWindow::modified_bartlett());
  if (name == "th") return Method::sv(LagWindow::tukey_hanning());
  if (name.rfind("pobm:", 0) == 0) return Method::parse(name);
  if (name.rfind("sv:", 0) == 0) return Method::sv(LagWindow::parse(name.substr(3)));
  throw ConfigError("unknown method '" + name + "' (expected bm, obm, brt, th, pobm:stride=<k> or sv:<window>)");
}

// Method for --method/--window pairs of single-run commands.
Method resolve_method(const std::string& method, const std::string& window) {
  if (method == "sv") return Method::sv(LagWindow::parse(window));
  return parse_method_name(method);
}

std::string method_name(const Method& m) {
  switch (m.kind()) {
    case MethodKind::BM: return "bm";
    case MethodKind::OBM: return "obm";
    case MethodKind::PartialOBM: return "pobm:stride=" + std::to_string(m.stride());
    case MethodKind::SV: return "sv:" + m.window().spec();
  }
  return {};
}

struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 0;
  std::string out;
  std::string format = "csv";
  bool dry_run = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
  sub->add_option("--out", c.out, "Write output to this file instead of stdout");
  sub->add_option("--format", c.format, "csv or markdown")->capture_default_str();
  sub->add_flag("--dry-run", c.dry_run, "Print the resolved configuration and exit");
}

// Resolved configuration; printed as the comment header of every output.
class Resolved {
 public:
  Resolved(std::string command, const Common& common) : command_(std::move(command)), common_(common) {
    format_ = parse_format(common.format);
  }

  void set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

  [[nodiscard]] std::vector<std::string> header() const {
    std::string canonical = command_ + "\nseed=" + std::to_string(common_.seed) + "\n";
    for (const auto& [k, v] : entries_) canonical += k + "=" + v + "\n";
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    std::vector<std::string> lines{"mcse " + std::string(kVersion), "command: " + command_,
                                   "seed: " + std::to_string(common_.seed), std::string("config-hash: ") + hash};
    for (const auto& [k, v] : entries_) lines.push_back(k + ": " + v);
    return lines;
  }

  [[nodiscard]] ReportFormat format() const noexcept { return format_; }

  void emit(const std::string& text, std::ostream& out) const {
    if (common_.out.empty()) {
      out << text;
      return;
    }
    std::ofstream f(common_.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + common_.out);
    f << text;
    if (!f) throw std::runtime_error("failed writing " + common_.out);
  }

  // Header only, for --dry-run.
  void emit_header(std::ostream& out) const {
    std::ostringstream os;
    for (const auto& line : header()) os << "# " << line << '\n';
    emit(os.str(), out);
  }

 private:
  std::string command_;
  Common common_;
  ReportFormat format_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string with_header(const std::vector<std::string>& header, const std::string& body) {
  std::ostringstream os;
  for (const auto& line : header) os << "# " << line << '\n';
  os << body;
  return os.str();
}

// Options describing which chain to run.
struct SamplerArgs {
  std::string kind = "ar1";
  double rho = 0.5;
  std::string x0;
  std::string data;
  std::string synthetic;
  std::string beta_true = "-0.5,1,0.75";
  std::string gamma = "shape-rate";
};

void add_ar1_options(CLI::App* sub, SamplerArgs& s) {
  sub->add_option("--rho", s.rho, "AR(1) coefficient")->capture_default_str();
  sub->add_option("--x0", s.x0, "AR(1) initial state (default: stationary draw)");
}

void add_probit_options(CLI::App* sub, SamplerArgs& s) {
  sub->add_option("--data", s.data, "Probit data CSV with header y,x1,x2 (default: $MCSE_LUPUS_DATA)");
  sub->add_option("--synthetic", s.synthetic, "Use a synthetic probit data set with this many observations");
  sub->add_option("--beta-true", s.beta_true, "Coefficients for --synthetic")->capture_default_str();
  sub->add_option("--gamma", s.gamma, "shape-rate or shape-scale")->capture_default_str();
}

struct ProbitSource {
  std::shared_ptr<const ProbitModel> model;
  bool lupus = false;
  std::string description;
};

GammaReading parse_gamma(const std::string& text) {
  if (text == "shape-rate") return GammaReading::ShapeRate;
  if (text == "shape-scale") return GammaReading::ShapeScale;
  throw ConfigError("unknown --gamma '" + text + "' (expected shape-rate or shape-scale)");
}

std::string probit_data_path(const SamplerArgs& s) {
  if (!s.data.empty()) return s.data;
  if (const char* env = std::getenv("MCSE_LUPUS_DATA"); env != nullptr && *env != '\0') return env;
  return {};
}

void describe_probit(const SamplerArgs& s, Resolved& r) {
  (void)parse_gamma(s.gamma);
  if (!s.synthetic.empty()) {
    const std::size_t n_obs = parse_count_text(s.synthetic);
    const auto beta = parse_reals(s.beta_true, "--beta-true");
    if (beta.size() != 3) throw ConfigError("--beta-true needs three values");
    if (n_obs < 4) throw ConfigError("--synthetic needs at least 4 observations");
    r.set("data", "synthetic");
    r.set("n_obs", std::to_string(n_obs));
    r.set("beta_true", join_reals(beta));
  } else {
    const std::string path = probit_data_path(s);
    if (path.empty()) throw ConfigError("probit runs need --data, MCSE_LUPUS_DATA, or --synthetic <n_obs>");
    r.set("data", path);
  }
  r.set("gamma", s.gamma);
}

ProbitSource load_probit(const SamplerArgs& s, std::uint64_t seed) {
  ProbitSource src;
  if (!s.synthetic.empty()) {
    const auto beta = parse_reals(s.beta_true, "--beta-true");
    src.model = std::make_shared<const ProbitModel>(
        synth_probit(parse_count_text(s.synthetic), Beta{beta[0], beta[1], beta[2]}, seed));
    src.description = "synthetic";
    return src;
  }
  src.model = std::make_shared<const ProbitModel>(load_probit_csv(probit_data_path(s), kLupusRows));
  src.lupus = true;
  src.description = probit_data_path(s);
  return src;
}

std::optional<double> parse_x0(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_real(text, "--x0");
}

void describe_ar1(const SamplerArgs& s, Resolved& r) {
  if (!(std::abs(s.rho) < 1.0)) throw ConfigError("--rho must satisfy |rho| < 1");
  r.set("rho", short_double(s.rho));
  r.set("x0", s.x0.empty() ? "stationary" : short_double(*parse_x0(s.x0)));
}

std::vector<MethodSpec> method_grid(const std::string& methods, const std::string& nus) {
  std::vector<MethodSpec> out;
  const auto nu_texts = split_list(nus);
  for (const auto& nu_text : nu_texts) {
    const double nu = parse_fraction(nu_text);
    if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("--nu values must lie in (0, 1)");
    for (const auto& m : split_list(methods)) out.push_back({parse_method_name(m), nu});
  }
  return out;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_count_text(item));
  return out;
}

// --- estimate -------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string input;
  std::string column;
  std::string method = "bm";
  std::string window = "tukey-hanning";
  std::string nu;
  std::string b;
  double level = 0.95;
};

int run_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  Resolved r("estimate", a.common);
  const Method method = resolve_method(a.method, a.window);
  if (!a.nu.empty() && !a.b.empty()) throw ConfigError("give at most one of --nu and --b");
  const BatchPolicy policy = a.b.empty() ? BatchPolicy::power_law(parse_fraction(a.nu.empty() ? "1/2" : a.nu))
                                         : BatchPolicy::fixed(parse_count_text(a.b));
  if (!(a.level > 0.0 && a.level < 1.0)) throw ConfigError("--level must lie in (0, 1)");
  r.set("input", a.input);
  r.set("column", a.column.empty() ? "(single column)" : a.column);
  r.set("method", method_name(method));
  r.set("batch", policy.is_power_law() ? "n^" + short_double(policy.nu()) : std::to_string(policy.fixed_b()));
  r.set("level", short_double(a.level));
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }

  const SampleSeries series = read_series_file(a.input, a.column);
  const std::size_t b = batch_size(policy, series.size());
  const VarianceEstimate est = estimate(series, method, b);
  double halfwidth = std::nan("");
  if (!est.indefinite()) halfwidth = interval(series.mean(), est, a.level).halfwidth;
  else err << "mcse: warning: negative variance estimate " << format_double(est.value) << "; no interval formed\n";
  const double mcse = est.indefinite() ? std::nan("") : std::sqrt(est.value / static_cast<double>(series.size()));

  std::ostringstream os;
  if (r.format() == ReportFormat::Csv) {
    os << "method,n,b,dof,mean,sigma2,mcse,level,halfwidth,lower,upper\n";
    os << method.label() << ',' << series.size() << ',' << b << ',' << est.dof << ',' << format_double(series.mean())
       << ',' << format_double(est.value) << ',' << format_double(mcse) << ',' << format_double(a.level) << ','
       << format_double(halfwidth) << ',' << format_double(series.mean() - halfwidth) << ','
       << format_double(series.mean() + halfwidth) << '\n';
  } else {
    os << "| method | n | b | dof | mean | sigma^2 | MCSE | half-width |\n|---|---|---|---|---|---|---|---|\n";
    os << "| " << method.label() << " | " << series.size() << " | " << b << " | " << est.dof << " | "
       << format_double(series.mean()) << " | " << format_double(est.value) << " | " << format_double(mcse) << " | "
       << format_double(halfwidth) << " |\n";
  }
  r.emit(with_header(r.header(), os.str()), out);
  return 0;
}

// --- fixed-width ----------------------------------------------------------

struct StoppingArgs {
  double eps = 0.1;
  std::string nstar = "1e3";
  double growth = 1.10;
  double level = 0.95;
  std::size_t bonferroni = 1;
  std::string nmax = "1e8";
  std::string first_check = "after-growth";
};

void add_stopping_options(CLI::App* sub, StoppingArgs& s, bool multi_eps) {
  if (!multi_eps) sub->add_option("--eps", s.eps, "Target half-width")->capture_default_str();
  sub->add_option("--growth", s.growth, "Growth factor between checks")->capture_default_str();
  sub->add_option("--level", s.level, "Overall confidence level")->capture_default_str();
  sub->add_option("--bonferroni", s.bonferroni, "Number of simultaneous intervals sharing --level")
      ->capture_default_str();
  sub->add_option("--nmax", s.nmax, "Iteration cap")->capture_default_str();
  sub->add_option("--first-check", s.first_check, "after-growth or just-past-minimum")->capture_default_str();
}

StoppingConfig resolve_stopping(const StoppingArgs& s, double eps, std::size_t n_star, Resolved& r,
                                const std::string& prefix) {
  StoppingConfig cfg;
  cfg.epsilon = eps;
  cfg.n_star = n_star;
  cfg.growth = s.growth;
  cfg.level = s.level;
  cfg.bonferroni = s.bonferroni;
  cfg.n_max = parse_count_text(s.nmax);
  if (s.first_check == "after-growth") {
    cfg.first_check = FirstCheck::AfterGrowth;
  } else if (s.first_check == "just-past-minimum") {
    cfg.first_check = FirstCheck::JustPastMinimum;
  } else {
    throw ConfigError("unknown --first-check '" + s.first_check + "'");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  r.set(prefix + "eps", short_double(cfg.epsilon));
  r.set(prefix + "nstar", std::to_string(cfg.n_star));
  return cfg;
}

void record_stopping_shared(const StoppingConfig& cfg, const std::string& first_check, Resolved& r) {
  r.set("growth", short_double(cfg.growth));
  r.set("level", short_double(cfg.level));
  r.set("bonferroni", std::to_string(cfg.bonferroni));
  r.set("interval_level", short_double(cfg.interval_level()));
  r.set("nmax", std::to_string(cfg.n_max));
  r.set("first_check", first_check);
}

struct FixedWidthArgs {
  Common common;
  SamplerArgs sampler;
  StoppingArgs stopping;
  std::string method = "bm";
  std::string window = "tukey-hanning";
  std::string nu = "1/2";
  std::uint64_t stream = 0;
  bool trajectory = false;
};

int run_fixed_width_cmd(const FixedWidthArgs& a, std::ostream& out, std::ostream& err) {
  Resolved r("fixed-width", a.common);
  r.set("sampler", a.sampler.kind);
  if (a.sampler.kind == "ar1") {
    describe_ar1(a.sampler, r);
  } else if (a.sampler.kind == "probit") {
    describe_probit(a.sampler, r);
  } else {
    throw ConfigError("unknown --sampler '" + a.sampler.kind + "' (expected ar1 or probit)");
  }
  const Method method = resolve_method(a.method, a.window);
  const double nu = parse_fraction(a.nu);
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("--nu must lie in (0, 1)");
  const StoppingConfig stop = resolve_stopping(a.stopping, a.stopping.eps, parse_count_text(a.stopping.nstar), r, "");
  record_stopping_shared(stop, a.stopping.first_check, r);
  r.set("method", method_name(method));
  r.set("nu", short_double(nu));
  r.set("stream", std::to_string(a.stream));
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }

  SamplerSpec spec = SamplerSpec::ar1(0.0);
  if (a.sampler.kind == "ar1") {
    spec = SamplerSpec::ar1(a.sampler.rho, parse_x0(a.sampler.x0));
  } else {
    const ProbitSource src = load_probit(a.sampler, a.common.seed);
    spec = SamplerSpec::probit(src.model, kLupusStart, parse_gamma(a.sampler.gamma));
  }
  auto chain = spec.make(a.common.seed, a.stream);
  FixedWidthResult res;
  try {
    res = run_fixed_width(*chain, {method, BatchPolicy::power_law(nu)}, stop, a.trajectory);
  } catch (const BudgetExceededError& e) {
    err << "mcse: " << e.what() << '\n';
    r.emit(with_header(r.header(), "# budget exceeded\n"), out);
    return 2;
  }

  std::ostringstream os;
  const bool csv = r.format() == ReportFormat::Csv;
  if (csv) {
    os << "coordinate,terminal_n,checks,b,dof,center,halfwidth,lower,upper,sigma2\n";
  } else {
    os << "| coordinate | terminal n | checks | b | dof | center | half-width | sigma^2 |\n"
          "|---|---|---|---|---|---|---|---|\n";
  }
  for (std::size_t j = 0; j < res.intervals.size(); ++j) {
    const auto& ci = res.intervals[j];
    const auto& est = res.estimates[j];
    if (csv) {
      os << j << ',' << res.terminal_n << ',' << res.checks << ',' << est.b << ',' << est.dof << ','
         << format_double(ci.center) << ',' << format_double(ci.halfwidth) << ',' << format_double(ci.lower()) << ','
         << format_double(ci.upper()) << ',' << format_double(est.value) << '\n';
    } else {
      os << "| " << j << " | " << res.terminal_n << " | " << res.checks << " | " << est.b << " | " << est.dof << " | "
         << format_double(ci.center) << " | " << format_double(ci.halfwidth) << " | " << format_double(est.value)
         << " |\n";
    }
  }
  if (a.trajectory) {
    os << (csv ? "\ncheck,n,max_halfwidth\n" : "\n| check | n | max half-width |\n|---|---|---|\n");
    for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
      const auto& p = res.trajectory[i];
      if (csv) {
        os << i + 1 << ',' << p.n << ',' << format_double(p.max_halfwidth) << '\n';
      } else {
        os << "| " << i + 1 << " | " << p.n << " | " << format_double(p.max_halfwidth) << " |\n";
      }
    }
  }
  r.emit(with_header(r.header(), os.str()), out);
  return 0;
}

// --- ar1-coverage -----------------------------------------------------------

struct Ar1CoverageArgs {
  Common common;
  SamplerArgs sampler;
  std::string methods = "bm,brt,obm,th";
  std::string nu = "1/3,1/2,2/3";
  std::string reps;
  std::string checkpoints = "1e3,5e3,1e4,5e4,1e5";
  double level = 0.95;
  bool full = false;
};

int run_ar1_coverage(const Ar1CoverageArgs& a, std::ostream& out) {
  Resolved r("ar1-coverage", a.common);
  describe_ar1(a.sampler, r);
  CoverageStudyConfig cfg;
  cfg.sampler = SamplerSpec::ar1(a.sampler.rho, parse_x0(a.sampler.x0));
  cfg.truth = {{0.0}, "stationary mean of the AR(1) chain"};
  cfg.methods = method_grid(a.methods, a.nu);
  cfg.checkpoints = parse_counts(a.checkpoints);
  cfg.replications = a.reps.empty() ? (a.full ? 2000 : 200) : parse_count_text(a.reps);
  cfg.level = a.level;
  cfg.base_seed = a.common.seed;
  cfg.threads = a.common.threads;
  cfg.validate();
  r.set("methods", a.methods);
  r.set("nu", a.nu);
  r.set("checkpoints", join_counts(cfg.checkpoints));
  r.set("replications", std::to_string(cfg.replications));
  r.set("level", short_double(cfg.level));
  r.set("truth", "0 (" + cfg.truth.provenance + ")");
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }
  const ReplicationReport report = coverage_study(cfg);
  r.emit(emit_report(report, r.format(), r.header()), out);
  return 0;
}

// --- probit-fixed-width ---------------------------------------------------

struct ProbitFixedWidthArgs {
  Common common;
  SamplerArgs sampler;
  StoppingArgs stopping;
  std::string eps = "0.3,0.2,0.1";
  std::string nstar;
  std::string methods = "bm,brt,obm,th";
  std::string nu = "1/3,1/2";
  std::string reps;
  std::string truth;
  std::string truth_n = "1e6";
  bool full = false;
};

// Minimum effort paired with each tolerance in the standard study.
std::size_t default_nstar(double eps) {
  if (std::abs(eps - 0.1) < 1e-12) return 50000;
  if (std::abs(eps - 0.2) < 1e-12) return 10000;
  if (std::abs(eps - 0.3) < 1e-12) return 5000;
  throw ConfigError("no default --nstar for eps = " + short_double(eps) + "; pass --nstar");
}

int run_probit_fixed_width(const ProbitFixedWidthArgs& a, std::ostream& out) {
  Resolved r("probit-fixed-width", a.common);
  r.set("sampler", "probit");
  describe_probit(a.sampler, r);
  const auto eps = parse_reals(a.eps, "--eps");
  std::vector<std::size_t> nstar;
  if (a.nstar.empty()) {
    for (const double e : eps) nstar.push_back(default_nstar(e));
  } else {
    nstar = parse_counts(a.nstar);
    if (nstar.size() != eps.size()) throw ConfigError("--nstar needs one value per --eps value");
  }
  std::vector<StoppingConfig> stops;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    stops.push_back(resolve_stopping(a.stopping, eps[i], nstar[i], r, "run" + std::to_string(i) + "."));
  }
  record_stopping_shared(stops.front(), a.stopping.first_check, r);
  const auto methods = method_grid(a.methods, a.nu);
  const std::size_t reps = a.reps.empty() ? (a.full ? 1000 : 200) : parse_count_text(a.reps);
  if (reps < 2) throw ConfigError("--reps must be >= 2");
  r.set("methods", a.methods);
  r.set("nu", a.nu);
  r.set("replications", std::to_string(reps));

  std::optional<std::vector<double>> truth;
  if (!a.truth.empty()) {
    truth = parse_reals(a.truth, "--truth");
    if (truth->size() != 3) throw ConfigError("--truth needs three values");
    r.set("truth", join_reals(*truth) + " (user supplied)");
  } else if (a.sampler.synthetic.empty()) {
    truth = std::vector<double>(kLupusReferenceMean.data(), kLupusReferenceMean.data() + 3);
    r.set("truth", join_reals(*truth) + " (1e8-iteration reference run)");
  } else {
    r.set("truth", "truth-run n=" + std::to_string(parse_count_text(a.truth_n)) + " stream=" +
                       std::to_string(kTruthStream));
  }
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }

  const ProbitSource src = load_probit(a.sampler, a.common.seed);
  const SamplerSpec spec = SamplerSpec::probit(src.model, kLupusStart, parse_gamma(a.sampler.gamma));
  TruthValue tv;
  if (truth) {
    tv = {*truth, a.truth.empty() ? "1e8-iteration reference run" : "user supplied"};
  } else {
    const auto ref = truth_run(spec, parse_count_text(a.truth_n), a.common.seed, kTruthStream,
                               BatchPolicy::power_law(0.5));
    for (const auto& t : ref) tv.values.push_back(t.mean);
    tv.provenance = "truth-run";
  }

  ReplicationReport all;
  for (const auto& stop : stops) {
    FixedWidthStudyConfig cfg;
    cfg.sampler = spec;
    cfg.truth = tv;
    cfg.methods = methods;
    cfg.stopping = stop;
    cfg.replications = reps;
    cfg.base_seed = a.common.seed;
    cfg.threads = a.common.threads;
    const ReplicationReport part = fixed_width_study(cfg);
    all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
  }
  std::vector<std::string> header = r.header();
  if (!truth) header.push_back("truth values: " + join_reals(tv.values));
  r.emit(emit_report(all, r.format(), header), out);
  return all.flagged_total() > 0 ? 2 : 0;
}

// --- mse-study --------------------------------------------------------------

struct MseArgs {
  Common common;
  SamplerArgs sampler;
  std::string n = "1e5";
  std::string b = "10,20,30,40,56,80,113,160,226,316,500";
  std::string methods = "bm,obm";
  std::string reps;
  bool full = false;
};

int run_mse(const MseArgs& a, std::ostream& out) {
  Resolved r("mse-study", a.common);
  describe_ar1(a.sampler, r);
  MseStudyConfig cfg;
  cfg.rho = a.sampler.rho;
  cfg.x0 = parse_x0(a.sampler.x0);
  cfg.n_list = parse_counts(a.n);
  cfg.b_list = parse_counts(a.b);
  cfg.methods.clear();
  for (const auto& m : split_list(a.methods)) cfg.methods.push_back(parse_method_name(m));
  cfg.replications = a.reps.empty() ? (a.full ? 500 : 200) : parse_count_text(a.reps);
  cfg.base_seed = a.common.seed;
  cfg.threads = a.common.threads;
  cfg.validate();
  r.set("n", join_counts(cfg.n_list));
  r.set("b", join_counts(cfg.b_list));
  r.set("methods", a.methods);
  r.set("replications", std::to_string(cfg.replications));
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }
  r.emit(emit_mse_report(mse_study(cfg), r.format(), r.header()), out);
  return 0;
}

// --- audit-window -----------------------------------------------------------

struct AuditArgs {
  Common common;
  std::string window;
  std::string nu;
  double delta = 1.0;
  std::string theorem = "thm1";
  std::string regime;
};

int run_audit(const AuditArgs& a, std::ostream& out) {
  Resolved r("audit-window", a.common);
  const LagWindow w = LagWindow::parse(a.window);
  const double nu = parse_fraction(a.nu);
  const AuditTarget target = parse_audit_target(a.theorem);
  MomentRegime regime = required_regime(target);
  if (a.regime == "4+delta") {
    regime = MomentRegime::FourPlusDelta;
  } else if (a.regime == "2+delta") {
    regime = MomentRegime::TwoPlusDelta;
  } else if (!a.regime.empty()) {
    throw ConfigError("unknown --regime '" + a.regime + "' (expected 4+delta or 2+delta)");
  }
  const AuditConfig cfg(nu, a.delta, regime);
  r.set("window", w.spec());
  r.set("nu", short_double(nu));
  r.set("delta", short_double(a.delta));
  r.set("theorem", to_string(target));
  r.set("regime", regime == MomentRegime::FourPlusDelta ? "4+delta" : "2+delta");
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }
  const AuditReport rep = consistency_audit(w, cfg, target);
  std::ostringstream os;
  if (r.format() == ReportFormat::Csv) {
    os << "condition,verdict,reason\n";
    for (const auto& v : rep.verdicts) {
      std::string reason = v.reason;
      for (char& c : reason) {
        if (c == ',') c = ';';
      }
      os << v.condition << ',' << to_string(v.verdict) << ',' << reason << '\n';
    }
  } else {
    os << "| condition | verdict | reason |\n|---|---|---|\n";
    for (const auto& v : rep.verdicts) os << "| " << v.condition << " | " << to_string(v.verdict) << " | " << v.reason << " |\n";
  }
  r.emit(with_header(r.header(), os.str()), out);
  return 0;
}

// --- truth-run --------------------------------------------------------------

struct TruthArgs {
  Common common;
  SamplerArgs sampler;
  std::string n = "1e6";
  std::string nu = "1/2";
  std::uint64_t stream = 0;
};

int run_truth(const TruthArgs& a, std::ostream& out) {
  Resolved r("truth-run", a.common);
  r.set("sampler", a.sampler.kind);
  if (a.sampler.kind == "ar1") {
    describe_ar1(a.sampler, r);
  } else if (a.sampler.kind == "probit") {
    describe_probit(a.sampler, r);
  } else {
    throw ConfigError("unknown --sampler '" + a.sampler.kind + "' (expected ar1 or probit)");
  }
  const std::size_t n = parse_count_text(a.n);
  const double nu = parse_fraction(a.nu);
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("--nu must lie in (0, 1)");
  r.set("n", std::to_string(n));
  r.set("nu", short_double(nu));
  r.set("stream", std::to_string(a.stream));
  if (a.common.dry_run) {
    r.emit_header(out);
    return 0;
  }
  SamplerSpec spec = SamplerSpec::ar1(0.0);
  if (a.sampler.kind == "ar1") {
    spec = SamplerSpec::ar1(a.sampler.rho, parse_x0(a.sampler.x0));
  } else {
    const ProbitSource src = load_probit(a.sampler, a.common.seed);
    spec = SamplerSpec::probit(src.model, kLupusStart, parse_gamma(a.sampler.gamma));
  }
  const auto res = truth_run(spec, n, a.common.seed, a.stream, BatchPolicy::power_law(nu));
  std::ostringstream os;
  if (r.format() == ReportFormat::Csv) {
    os << "coordinate,n,b,mean,mcse,sigma2\n";
    for (std::size_t j = 0; j < res.size(); ++j) {
      os << j << ',' << res[j].n << ',' << res[j].b << ',' << format_double(res[j].mean) << ','
         << format_double(res[j].mcse) << ',' << format_double(res[j].sigma2) << '\n';
    }
  } else {
    os << "| coordinate | n | b | mean | MCSE | sigma^2 |\n|---|---|---|---|---|---|\n";
    for (std::size_t j = 0; j < res.size(); ++j) {
      os << "| " << j << " | " << res[j].n << " | " << res[j].b << " | " << format_double(res[j].mean) << " | "
         << format_double(res[j].mcse) << " | " << format_double(res[j].sigma2) << " |\n";
    }
  }
  r.emit(with_header(r.header(), os.str()), out);
  return 0;
}

}  // namespace

double parse_fraction(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_real(text, "fraction");
  const double num = parse_real(text.substr(0, slash), "fraction numerator");
  const double den = parse_real(text.substr(slash + 1), "fraction denominator");
  if (den == 0.0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::size_t parse_count_text(std::string_view text) {
  const double v = parse_real(text, "count");
  if (!(v >= 1.0) || v > 9.0e15 || std::floor(v) != v) {
    throw ConfigError("expected a positive integer count, got '" + std::string(text) + "'");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo standard errors for MCMC output", "mcse"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kVersion));

  EstimateArgs est;
  auto* s_est = app.add_subcommand("estimate", "Estimate the asymptotic variance of a series read from a file");
  add_common(s_est, est.common);
  s_est->add_option("--input", est.input, "Series file: one value per line, or CSV")->required();
  s_est->add_option("--column", est.column, "CSV column name (file then has a header row)");
  s_est->add_option("--method", est.method, "bm, obm, pobm:stride=<k>, brt, th, sv")->capture_default_str();
  s_est->add_option("--window", est.window, "Lag window for --method sv")->capture_default_str();
  s_est->add_option("--nu", est.nu, "Batch size exponent, b = floor(n^nu) (default 1/2)");
  s_est->add_option("--b", est.b, "Fixed batch size");
  s_est->add_option("--level", est.level, "Confidence level")->capture_default_str();

  FixedWidthArgs fw;
  auto* s_fw = app.add_subcommand("fixed-width", "Run one fixed-width sequential simulation");
  add_common(s_fw, fw.common);
  s_fw->add_option("--sampler", fw.sampler.kind, "ar1 or probit")->capture_default_str();
  add_ar1_options(s_fw, fw.sampler);
  add_probit_options(s_fw, fw.sampler);
  add_stopping_options(s_fw, fw.stopping, false);
  s_fw->add_option("--nstar", fw.stopping.nstar, "Minimum simulation effort")->capture_default_str();
  s_fw->add_option("--method", fw.method, "bm, obm, pobm:stride=<k>, brt, th, sv")->capture_default_str();
  s_fw->add_option("--window", fw.window, "Lag window for --method sv")->capture_default_str();
  s_fw->add_option("--nu", fw.nu, "Batch size exponent")->capture_default_str();
  s_fw->add_option("--stream", fw.stream, "RNG stream id")->capture_default_str();
  s_fw->add_flag("--trajectory", fw.trajectory, "Also print every check");

  Ar1CoverageArgs cov;
  auto* s_cov = app.add_subcommand("ar1-coverage", "Coverage of AR(1) mean intervals at fixed checkpoints");
  add_common(s_cov, cov.common);
  add_ar1_options(s_cov, cov.sampler);
  s_cov->add_option("--methods", cov.methods, "Comma-separated methods")->capture_default_str();
  s_cov->add_option("--nu", cov.nu, "Comma-separated exponents")->capture_default_str();
  s_cov->add_option("--reps", cov.reps, "Replications (default 200, 2000 with --full)");
  s_cov->add_option("--checkpoints", cov.checkpoints, "Comma-separated chain lengths")->capture_default_str();
  s_cov->add_option("--level", cov.level, "Confidence level")->capture_default_str();
  s_cov->add_flag("--full", cov.full, "Use the full replication count");

  ProbitFixedWidthArgs pfw;
  auto* s_pfw = app.add_subcommand("probit-fixed-width", "Coverage of fixed-width runs for Bayesian probit regression");
  add_common(s_pfw, pfw.common);
  add_probit_options(s_pfw, pfw.sampler);
  add_stopping_options(s_pfw, pfw.stopping, true);
  s_pfw->add_option("--eps", pfw.eps, "Comma-separated target half-widths")->capture_default_str();
  s_pfw->add_option("--nstar", pfw.nstar, "Comma-separated minimum efforts (default 5e3, 1e4, 5e4 for 0.3, 0.2, 0.1)");
  s_pfw->add_option("--methods", pfw.methods, "Comma-separated methods")->capture_default_str();
  s_pfw->add_option("--nu", pfw.nu, "Comma-separated exponents")->capture_default_str();
  s_pfw->add_option("--reps", pfw.reps, "Replications (default 200, 1000 with --full)");
  s_pfw->add_option("--truth", pfw.truth, "Reference posterior means b0,b1,b2");
  s_pfw->add_option("--truth-n", pfw.truth_n, "Reference run length for synthetic data")->capture_default_str();
  s_pfw->add_flag("--full", pfw.full, "Use the full replication count");

  MseArgs mse;
  auto* s_mse = app.add_subcommand("mse-study", "Bias, variance and MSE of variance estimators on AR(1) chains");
  add_common(s_mse, mse.common);
  add_ar1_options(s_mse, mse.sampler);
  s_mse->add_option("--n", mse.n, "Comma-separated chain lengths")->capture_default_str();
  s_mse->add_option("--b", mse.b, "Comma-separated batch sizes")->capture_default_str();
  s_mse->add_option("--methods", mse.methods, "Comma-separated methods")->capture_default_str();
  s_mse->add_option("--reps", mse.reps, "Replications (default 200, 500 with --full)");
  s_mse->add_flag("--full", mse.full, "Use the full replication count");

  AuditArgs aud;
  auto* s_aud = app.add_subcommand("audit-window", "Check consistency conditions for a lag window and b = floor(n^nu)");
  add_common(s_aud, aud.common);
  s_aud->add_option("--window", aud.window, "Lag window")->required();
  s_aud->add_option("--nu", aud.nu, "Exponent")->required();
  s_aud->add_option("--delta", aud.delta, "Moment excess delta")->capture_default_str();
  s_aud->add_option("--theorem", aud.theorem, "thm1, thm2, cor1 or rmk7")->capture_default_str();
  s_aud->add_option("--regime", aud.regime, "4+delta or 2+delta (default: the theorem's own)");

  TruthArgs tr;
  auto* s_tr = app.add_subcommand("truth-run", "Long run with streaming batch means");
  add_common(s_tr, tr.common);
  s_tr->add_option("--sampler", tr.sampler.kind, "ar1 or probit")->capture_default_str();
  add_ar1_options(s_tr, tr.sampler);
  add_probit_options(s_tr, tr.sampler);
  s_tr->add_option("--n", tr.n, "Chain length")->capture_default_str();
  s_tr->add_option("--nu", tr.nu, "Batch size exponent")->capture_default_str();
  s_tr->add_option("--stream", tr.stream, "RNG stream id")->capture_default_str();

  try {
    // CLI11 takes the arguments in reverse order, without the program name.
    std::vector<std::string> rest;
    for (std::size_t i = args.size(); i > 1; --i) rest.push_back(args[i - 1]);
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "mcse " << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "mcse: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (s_est->parsed()) return run_estimate(est, out, err);
    if (s_fw->parsed()) return run_fixed_width_cmd(fw, out, err);
    if (s_cov->parsed()) return run_ar1_coverage(cov, out);
    if (s_pfw->parsed()) return run_probit_fixed_width(pfw, out);
    if (s_mse->parsed()) return run_mse(mse, out);
    if (s_aud->parsed()) return run_audit(aud, out);
    if (s_tr->parsed()) return run_truth(tr, out);
  } catch (const BudgetExceededError& e) {
    err << "mcse: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "mcse: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    err << "mcse: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "mcse: error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 1;
}

}  // namespace mcse
