#include "lsqstab/cli.hpp"

#include "lsqstab/errors.hpp"
#include "lsqstab/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lsqstab::cli {

namespace {

struct CommandEntry {
  Command command;
  const char* name;
};

constexpr CommandEntry kCommands[] = {
    {Command::KofM, "kofm"},
    {Command::Budget, "budget"},
    {Command::TailBound, "tailbound"},
    {Command::McTail, "mc-tail"},
    {Command::Fit, "fit"},
    {Command::ErrorVsM, "error-vs-m"},
    {Command::OptimalM, "optimal-m"},
    {Command::NoiselessBound, "noiseless-bound"},
    {Command::NoisyBound, "noisy-bound"},
    {Command::DetStability, "det-stability"},
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string num17(double v) { return fmt("%.17g", v); }
std::string num(double v) { return fmt("%.6g", v); }

int parse_int(std::string_view text, std::string_view field) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0 || v < INT32_MIN || v > INT32_MAX) {
    throw InvalidArgument(std::string(field) + ": '" + s + "' is not an integer");
  }
  return static_cast<int>(v);
}

double parse_double(std::string_view text, std::string_view field) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw InvalidArgument(std::string(field) + ": '" + s + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidArgument("format: expected csv or json, got '" + std::string(s) + "'");
}

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

BasisFamily make_family(const RunConfig& c) {
  BasisFamily family = parse_family(c.family);
  if (!c.measure) return family;
  const Measure mu = parse_measure(*c.measure);
  if (family.kind() == BasisKind::PiecewiseConstant) {
    return BasisFamily::piecewise_constant_equal(family.cells(), mu);
  }
  if (mu.name() != family.measure().name()) {
    throw InvalidArgument("measure: family '" + c.family + "' is orthonormal for " + family.measure().name() +
                          ", not " + mu.name());
  }
  return family;
}

int trials_or(const RunConfig& c, int fallback) { return c.trials.value_or(fallback); }

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

ExperimentRecord plain_record(const RunConfig& c, const BasisFamily& family, std::string experiment, int n, int m) {
  ExperimentRecord r;
  r.experiment = std::move(experiment);
  r.family = family.name();
  r.measure = family.measure().name();
  r.f = "-";
  r.n = n;
  r.m = m;
  r.seed = c.seed;
  return r;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::vector<int> default_optimal_n(const std::string& f) {
  if (f == "f1" || f == "runge") return {25, 50, 75, 100, 150, 200};
  return {50, 100, 200, 400, 700, 1000};
}

std::vector<int> range(int lo, int hi, int step = 1) {
  std::vector<int> v;
  for (int i = lo; i <= hi; i += step) v.push_back(i);
  return v;
}

void write_output(const RunConfig& c, const std::vector<ExperimentRecord>& records) {
  if (!c.output.empty()) emit_records(records, c.format, c.output);
}

// ---------------------------------------------------------------------------
// Command handlers

void run_kofm(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  std::vector<ExperimentRecord> records;
  for (int m : c.m) {
    const double analytic = k_of_m_analytic(family, m);
    const double numeric = k_of_m_numeric(family, m, 20001);
    out << "K(" << m << ") = " << fmt("%.15g", analytic) << " (analytic), " << fmt("%.6f", numeric)
        << " (numeric)\n";
    ExperimentRecord r = plain_record(c, family, "kofm", 0, m);
    r.bounds["K_analytic"] = analytic;
    r.bounds["K_numeric"] = numeric;
    records.push_back(std::move(r));
  }
  write_output(c, records);
}

void run_budget(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  std::vector<ExperimentRecord> records;
  for (int n : c.n) {
    const int m = stability_budget(family, n, c.r);
    if (c.n.size() == 1) {
      out << "m_max = " << m << "\n";
    } else {
      out << "n = " << n << ": m_max = " << m << "\n";
    }
    ExperimentRecord r = plain_record(c, family, "budget", n, m);
    r.bounds["threshold"] = budget_threshold(n, c.r);
    r.bounds["r"] = c.r;
    records.push_back(std::move(r));
  }
  write_output(c, records);
}

double k_for_bound(const BasisFamily& family, int m) {
  return family.kind() == BasisKind::PiecewiseConstant ? static_cast<double>(m) : k_of_m_analytic(family, m);
}

void run_tailbound(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  std::vector<ExperimentRecord> records;
  for (int n : c.n) {
    for (int m : c.m) {
      family.check_dimension(m);
      const double k = k_for_bound(family, m);
      const double bound = chernoff_tail_bound({m, n, k, c.delta, c.r});
      out << "Pr{|||G-I||| > " << num(c.delta) << "} <= " << num17(bound) << " (m = " << m << ", n = " << n
          << ", K = " << fmt("%.15g", k) << ")\n";
      ExperimentRecord r = plain_record(c, family, "tailbound", n, m);
      r.bounds["chernoff"] = bound;
      r.bounds["K"] = k;
      r.bounds["c_delta"] = c_delta(c.delta);
      r.bounds["delta"] = c.delta;
      records.push_back(std::move(r));
    }
  }
  write_output(c, records);
}

void run_mc_tail(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  const int trials = trials_or(c, 500);
  std::vector<ExperimentRecord> records;
  for (int n : c.n) {
    for (int m : c.m) {
      const std::vector<double> gaps = mc_gap_samples(family, m, n, trials, c.seed, c.jobs);
      const TailEstimate est = tail_estimate_from_gaps(gaps, c.delta);
      const double bound = chernoff_tail_bound({m, n, k_for_bound(family, m), c.delta, c.r});
      out << "m = " << m << ", n = " << n << ": estimate = " << num(est.estimate) << " [" << num(est.ci_lower)
          << ", " << num(est.ci_upper) << "], bound = " << num(bound) << ", "
          << verdict(est.ci_lower <= bound) << "\n";
      for (int t = 0; t < trials; ++t) {
        ExperimentRecord r = plain_record(c, family, "mc-tail", n, m);
        r.trial = t;
        r.gap = gaps[static_cast<std::size_t>(t)];
        r.error = r.gap > c.delta ? 1.0 : 0.0;
        r.bounds["chernoff"] = bound;
        r.bounds["delta"] = c.delta;
        records.push_back(std::move(r));
      }
    }
  }
  write_output(c, records);
}

void run_fit(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  const TargetFunction f = parse_target(c.f);
  const int trials = trials_or(c, 1);
  std::vector<ExperimentRecord> records;
  for (int n : c.n) {
    for (int m : c.m) {
      for (int t = 0; t < trials; ++t) {
        const std::uint64_t ts = trial_seed(c.seed, static_cast<std::uint64_t>(t));
        const SampleSet samples = draw_iid(family.measure(), n, substream_seed(ts, 1));
        std::vector<double> y(samples.points.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = f.eval(samples.points[i]);
        y = add_noise(y, c.sigma, substream_seed(ts, 2));
        const GramSystem g = build_gram(family, m, samples, y);
        const FitResult fit = fit_gram_system(family, g);
        const StabilityCheck check = stability_constant_check(g, fit.coeffs, y);
        const double error = l2_error(f.eval, fit.truncated_at(f.sup_bound));
        const char* status = check.status == CheckStatus::Holds      ? "holds"
                             : check.status == CheckStatus::Violated ? "violated"
                                                                     : "inapplicable (gap > 1/2)";
        out << "m = " << m << ", n = " << n << ", trial " << t << ": error = " << num(error)
            << ", gap = " << num(fit.gap()) << ", ||w|| = " << num(check.lhs) << " <= sqrt(6)||y||_n = "
            << num(check.rhs) << ": " << status << (fit.singular ? " (singular G, w = 0)" : "") << "\n";
        ExperimentRecord r = plain_record(c, family, "fit", n, m);
        r.f = f.label;
        r.trial = t;
        r.error = error;
        r.gap = fit.gap();
        r.bounds["norm_w"] = check.lhs;
        r.bounds["sqrt6_norm_y"] = check.rhs;
        r.bounds["sigma"] = c.sigma;
        records.push_back(std::move(r));
      }
    }
  }
  write_output(c, records);
}

void run_error_vs_m(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  const TargetFunction f = parse_target(c.f);
  const int n = c.n.front();
  std::vector<int> ms = c.m;
  if (ms.empty()) {
    const int step = family.kind() == BasisKind::TrigonometricUniform ? 2 : 1;
    ms = range(1, std::min(n - 1 > 0 ? n - 1 : 1, family.max_dimension()), step);
  }
  const std::vector<ExperimentRecord> curve = error_vs_m_curve(f, family, n, ms, c.seed, QuadratureSpec{}, c.jobs);
  const auto best = std::min_element(curve.begin(), curve.end(),
                                     [](const auto& a, const auto& b) { return a.error < b.error; });
  const std::optional<int> onset = instability_onset(curve);
  out << "min error = " << num(best->error) << " at m = " << best->m << "; error at m = " << curve.back().m
      << " is " << num(curve.back().error) << "; instability onset m = "
      << (onset ? std::to_string(*onset) : std::string("none")) << "\n";
  write_output(c, curve);
}

void run_optimal_m(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  const TargetFunction f = parse_target(c.f);
  const std::vector<int> ns = c.n.empty() ? default_optimal_n(c.f) : c.n;
  OptimalMOptions opt;
  opt.trials = trials_or(c, 50);
  opt.jobs = c.jobs;
  const OptimalMTable table = optimal_m_curve(f, family, ns, c.seed, opt);
  for (const auto& row : table.rows) {
    out << "n = " << row.n << ": mean m(n) = " << fmt("%.3f", row.mean_m) << " +- " << fmt("%.3f", row.stderr_m)
        << " (" << row.m_per_trial.size() << " resolved, " << row.unresolved << " unresolved)\n";
  }
  try {
    const ScalingFit fit = scaling_exponent(table, 1000, c.seed);
    out << "log-log slope = " << fmt("%.4f", fit.slope) << " [" << fmt("%.4f", fit.ci_lower) << ", "
        << fmt("%.4f", fit.ci_upper) << "]\n";
  } catch (const InvalidArgument& e) {
    out << "log-log slope not available: " << e.what() << "\n";
  }
  write_output(c, table.records);
}

void print_bound_report(const BoundReport& rep, std::ostream& out) {
  if (rep.status == CheckStatus::Inapplicable) {
    out << "n = " << rep.n << ": stability budget is 0, bound inapplicable\n";
    return;
  }
  const BoundSweepRow* row = rep.at_budget();
  out << "n = " << rep.n << ", m = " << rep.budget << ": mean ||f - f~||^2 = " << num(row->mean) << " +- "
      << num(row->ci_half) << ", bound = " << num(row->bound) << " (e_m^2 = " << num(row->e_m * row->e_m)
      << ", eps(n) = " << num(rep.eps_n) << ")";
  if (rep.rows.size() > 1) {
    out << "; all m <= " << rep.budget << ": ";
  } else {
    out << ": ";
  }
  out << verdict(rep.status == CheckStatus::Holds) << "\n";
}

void run_bound(const RunConfig& c, std::ostream& out, bool noisy) {
  const BasisFamily family = make_family(c);
  const TargetFunction f = parse_target(c.f);
  BoundOptions opt;
  opt.trials = trials_or(c, 200);
  opt.jobs = c.jobs;
  std::vector<ExperimentRecord> records;
  for (int n : c.n) {
    const BoundReport rep = noisy ? noisy_bound_experiment(f, family, n, c.r, c.sigma, c.seed, opt)
                                  : noiseless_bound_experiment(f, family, n, c.r, c.seed, opt);
    print_bound_report(rep, out);
    records.insert(records.end(), rep.records.begin(), rep.records.end());
  }
  if (!records.empty()) write_output(c, records);
}

void run_det_stability(const RunConfig& c, std::ostream& out) {
  const BasisFamily family = make_family(c);
  std::vector<int> ns = c.n;
  std::vector<int> ms = c.m;
  if (family.kind() == BasisKind::PiecewiseConstant) {
    if (ns.empty()) ns = {family.cells()};
    if (ms.empty()) ms = {family.cells()};
  }
  const std::vector<DeterministicGapRow> rows = deterministic_stability_table(family, ns, ms, c.jobs);
  require(!rows.empty(), "det-stability: no admissible (n, m) pair (need m <= n; odd m for trig; n = cells for pc)");
  bool pass = true;
  const DeterministicGapRow* worst = &rows.front();
  std::vector<ExperimentRecord> records;
  for (const auto& row : rows) {
    pass = pass && row.pass;
    if (row.gap - row.bound > worst->gap - worst->bound) worst = &row;
    ExperimentRecord r = plain_record(c, family, "det-stability", row.n, row.m);
    r.gap = row.gap;
    r.bounds["bound"] = row.bound;
    r.bounds["allowance"] = row.allowance;
    records.push_back(std::move(r));
  }
  if (rows.size() == 1) {
    out << "gap = " << fmt("%.3e", worst->gap) << " <= " << fmt("%.3e", worst->bound + worst->allowance) << ": "
        << verdict(pass) << "\n";
  } else {
    out << rows.size() << " (n, m) pairs; tightest: n = " << worst->n << ", m = " << worst->m
        << ", gap = " << fmt("%.3e", worst->gap) << " <= " << fmt("%.3e", worst->bound + worst->allowance) << ": "
        << verdict(pass) << "\n";
  }
  write_output(c, records);
}

}  // namespace

std::string command_name(Command c) {
  for (const auto& e : kCommands) {
    if (e.command == c) return e.name;
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (const auto& e : kCommands) {
    if (name == e.name) return e.command;
  }
  std::string known;
  for (const auto& e : kCommands) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw InvalidArgument("unknown command '" + std::string(name) + "' (expected one of: " + known + ")");
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (std::string_view tok : split(text, ',')) {
    if (tok.empty()) continue;
    const auto parts = split(tok, ':');
    if (parts.size() == 1) {
      out.push_back(parse_int(tok, "list"));
      continue;
    }
    require(parts.size() <= 3, "list: bad range '" + std::string(tok) + "' (use a:b or a:b:step)");
    const int lo = parse_int(parts[0], "range start");
    const int hi = parse_int(parts[1], "range end");
    const int step = parts.size() == 3 ? parse_int(parts[2], "range step") : 1;
    require(step > 0, "list: range step must be positive");
    for (int v = lo; v <= hi; v += step) out.push_back(v);
  }
  return out;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = command_name(c.command);
  j["family"] = c.family;
  if (c.measure) j["measure"] = *c.measure;
  j["f"] = c.f;
  j["n"] = c.n;
  j["m"] = c.m;
  j["delta"] = c.delta;
  j["r"] = c.r;
  j["sigma"] = c.sigma;
  if (c.trials) j["trials"] = *c.trials;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["format"] = format_name(c.format);
  j["jobs"] = c.jobs;
  return nlohmann::json::parse(j.dump());
}

RunConfig config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "config: top level must be a JSON object");
  static const char* known[] = {"command", "family", "measure", "f",      "n",      "m",    "delta",
                                "r",       "sigma",  "trials",  "seed",   "output", "format", "jobs"};
  for (const auto& [key, value] : j.items()) {
    require(std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) !=
                std::end(known),
            "config: unknown field '" + key + "'");
  }
  RunConfig c;
  auto get_string = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    require(j[key].is_string(), std::string("config field '") + key + "' must be a string");
    dst = j[key].get<std::string>();
  };
  auto get_number = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    require(j[key].is_number(), std::string("config field '") + key + "' must be a number");
    dst = j[key].get<double>();
  };
  auto get_ints = [&](const char* key, std::vector<int>& dst) {
    if (!j.contains(key)) return;
    const auto& v = j[key];
    if (v.is_number_integer()) {
      dst = {v.get<int>()};
    } else if (v.is_string()) {
      dst = parse_int_list(v.get<std::string>());
    } else {
      require(v.is_array(), std::string("config field '") + key + "' must be an integer, list or range string");
      dst.clear();
      for (const auto& e : v) {
        require(e.is_number_integer(), std::string("config field '") + key + "' must contain integers");
        dst.push_back(e.get<int>());
      }
    }
  };
  if (j.contains("command")) {
    require(j["command"].is_string(), "config field 'command' must be a string");
    c.command = parse_command(j["command"].get<std::string>());
  }
  get_string("family", c.family);
  if (j.contains("measure")) {
    std::string m;
    get_string("measure", m);
    c.measure = m;
  }
  get_string("f", c.f);
  get_ints("n", c.n);
  get_ints("m", c.m);
  get_number("delta", c.delta);
  get_number("r", c.r);
  get_number("sigma", c.sigma);
  if (j.contains("trials")) {
    require(j["trials"].is_number_integer(), "config field 'trials' must be an integer");
    c.trials = j["trials"].get<int>();
  }
  if (j.contains("seed")) {
    require(j["seed"].is_number_unsigned() || (j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0),
            "config field 'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  get_string("output", c.output);
  if (j.contains("format")) {
    std::string f;
    get_string("format", f);
    c.format = parse_format(f);
  }
  if (j.contains("jobs")) {
    require(j["jobs"].is_number_integer(), "config field 'jobs' must be an integer");
    c.jobs = j["jobs"].get<int>();
  }
  return c;
}

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Stability and accuracy experiments for randomized least squares", "lsqstab"};
  std::string command;
  std::string config_path;
  std::string family;
  std::string measure;
  std::string f;
  std::vector<std::string> n_text;
  std::vector<std::string> m_text;
  double delta = 0.0;
  double r = 0.0;
  double sigma = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string format;
  int jobs = 0;

  std::string names;
  for (const auto& e : kCommands) names += std::string(names.empty() ? "" : "|") + e.name;
  auto* o_cmd = app.add_option("command", command, names);
  app.add_option("--config", config_path, "JSON run configuration; command-line options override it");
  auto* o_family = app.add_option("--family", family, "legendre | chebyshev | trig | pc:<cells> | shrunk:<eps>");
  auto* o_measure = app.add_option("--measure", measure, "uniform | chebyshev (piecewise-constant families)");
  auto* o_f = app.add_option("--f", f, "target function: f1 (Runge) | f2 (|x|) | zero");
  auto* o_n = app.add_option("--n", n_text, "sample size(s): 200 or 25,50,100 or 10:100:10");
  auto* o_m = app.add_option("--m", m_text, "dimension(s), same syntax as --n");
  auto* o_delta = app.add_option("--delta", delta, "deviation level in (0,1)");
  auto* o_r = app.add_option("--r", r, "confidence exponent r > 0");
  auto* o_sigma = app.add_option("--sigma", sigma, "noise standard deviation");
  auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials");
  auto* o_seed = app.add_option("--seed", seed, "base seed (default 42)");
  auto* o_output = app.add_option("--output", output, "output file");
  auto* o_format = app.add_option("--format", format, "csv | json");
  auto* o_jobs = app.add_option("--jobs", jobs, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }

  RunConfig c;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    require(static_cast<bool>(in), "--config: cannot open '" + config_path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument("--config: " + std::string(e.what()));
    }
    c = config_from_json(j);
  } else {
    require(o_cmd->count() > 0, "missing command (one of " + names + ")");
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& t : v) s += (s.empty() ? "" : ",") + t;
    return s;
  };
  if (o_cmd->count()) c.command = parse_command(command);
  if (o_family->count()) c.family = family;
  if (o_measure->count()) c.measure = measure;
  if (o_f->count()) c.f = f;
  if (o_n->count()) c.n = parse_int_list(join(n_text));
  if (o_m->count()) c.m = parse_int_list(join(m_text));
  if (o_delta->count()) c.delta = delta;
  if (o_r->count()) c.r = r;
  if (o_sigma->count()) c.sigma = sigma;
  if (o_trials->count()) c.trials = trials;
  if (o_seed->count()) c.seed = seed;
  if (o_output->count()) c.output = output;
  if (o_format->count()) c.format = parse_format(format);
  if (o_jobs->count()) c.jobs = jobs;
  return c;
}

void validate(const RunConfig& c) {
  const std::string cmd = command_name(c.command);
  auto need_n = [&] { require(!c.n.empty(), "--n is required for " + cmd); };
  auto need_m = [&] { require(!c.m.empty(), "--m is required for " + cmd); };
  for (int n : c.n) require(n >= 1, "--n: sample sizes must be >= 1");
  for (int m : c.m) require(m >= 1, "--m: dimensions must be >= 1");
  require(c.delta > 0.0 && c.delta < 1.0, "--delta must lie in (0,1)");
  require(c.r > 0.0, "--r must be > 0");
  require(c.sigma >= 0.0, "--sigma must be >= 0");
  require(!c.trials || *c.trials >= 1, "--trials must be >= 1");
  require(c.jobs >= 0, "--jobs must be >= 0");
  (void)parse_family(c.family);
  if (c.measure) (void)parse_measure(*c.measure);

  switch (c.command) {
    case Command::KofM:
      need_m();
      break;
    case Command::Budget:
      need_n();
      for (int n : c.n) require(n >= 2, "--n must be >= 2 for budget (log n > 0)");
      break;
    case Command::TailBound:
    case Command::McTail:
    case Command::Fit:
      need_n();
      need_m();
      break;
    case Command::ErrorVsM:
      need_n();
      require(c.n.size() == 1, "--n: error-vs-m takes a single sample size");
      break;
    case Command::OptimalM:
      break;
    case Command::NoiselessBound:
    case Command::NoisyBound:
      need_n();
      for (int n : c.n) require(n >= 2, "--n must be >= 2 for " + cmd);
      break;
    case Command::DetStability:
      if (parse_family(c.family).kind() != BasisKind::PiecewiseConstant) {
        need_n();
        need_m();
      }
      break;
  }
  if (c.command == Command::Fit || c.command == Command::ErrorVsM || c.command == Command::OptimalM ||
      c.command == Command::NoiselessBound || c.command == Command::NoisyBound) {
    (void)parse_target(c.f);
  }
}

void execute(const RunConfig& c, std::ostream& out) {
  switch (c.command) {
    case Command::KofM:
      return run_kofm(c, out);
    case Command::Budget:
      return run_budget(c, out);
    case Command::TailBound:
      return run_tailbound(c, out);
    case Command::McTail:
      return run_mc_tail(c, out);
    case Command::Fit:
      return run_fit(c, out);
    case Command::ErrorVsM:
      return run_error_vs_m(c, out);
    case Command::OptimalM:
      return run_optimal_m(c, out);
    case Command::NoiselessBound:
      return run_bound(c, out, false);
    case Command::NoisyBound:
      return run_bound(c, out, true);
    case Command::DetStability:
      return run_det_stability(c, out);
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(argc, argv);
    validate(config);
  } catch (const CLI::CallForHelp&) {
    out << "usage: lsqstab <command> [options]; see README for commands and flags\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    execute(config, out);
  } catch (const QuadratureError& e) {
    err << "numerical failure: " << e.what() << " (estimate " << e.estimate() << ", error bound "
        << e.error_bound() << ")\n";
    return kExitFailure;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Unsupported& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Records

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string s(kCsvHeader);
  s += '\n';
  for (const auto& r : records) {
    s += r.experiment + ',' + r.family + ',' + r.measure + ',' + r.f + ',' + std::to_string(r.n) + ',' +
         std::to_string(r.m) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.trial) + ',' + num17(r.error) +
         ',' + num17(r.gap) + ',';
    bool first = true;
    for (const auto& [name, value] : r.bounds) {
      if (!first) s += ';';
      s += name + '=' + num17(value);
      first = false;
    }
    s += '\n';
  }
  return s;
}

std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["experiment"] = r.experiment;
    o["family"] = r.family;
    o["measure"] = r.measure;
    o["f"] = r.f;
    o["n"] = r.n;
    o["m"] = r.m;
    o["seed"] = r.seed;
    o["trial"] = r.trial;
    o["error"] = r.error;
    o["gap"] = r.gap;
    nlohmann::ordered_json b = nlohmann::ordered_json::object();
    for (const auto& [name, value] : r.bounds) b[name] = value;
    o["bounds"] = b;
    arr.push_back(std::move(o));
  }
  return arr.dump(1) + "\n";
}

std::vector<ExperimentRecord> records_from_csv(std::string_view text) {
  std::vector<ExperimentRecord> out;
  auto lines = split(text, '\n');
  require(!lines.empty() && lines.front() == kCsvHeader, "records_from_csv: missing or unexpected header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    require(f.size() == 11, "records_from_csv: line " + std::to_string(i + 1) + " does not have 11 fields");
    ExperimentRecord r;
    r.experiment = f[0];
    r.family = f[1];
    r.measure = f[2];
    r.f = f[3];
    r.n = parse_int(f[4], "n");
    r.m = parse_int(f[5], "m");
    r.seed = std::strtoull(std::string(f[6]).c_str(), nullptr, 10);
    r.trial = parse_int(f[7], "trial");
    r.error = parse_double(f[8], "error");
    r.gap = parse_double(f[9], "gap");
    if (!f[10].empty()) {
      for (std::string_view kv : split(f[10], ';')) {
        const std::size_t eq = kv.find('=');
        require(eq != std::string_view::npos, "records_from_csv: bad bounds entry '" + std::string(kv) + "'");
        r.bounds[std::string(kv.substr(0, eq))] = parse_double(kv.substr(eq + 1), "bounds");
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> records_from_json(std::string_view text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  require(arr.is_array(), "records_from_json: expected an array");
  std::vector<ExperimentRecord> out;
  for (const auto& o : arr) {
    ExperimentRecord r;
    r.experiment = o.at("experiment").get<std::string>();
    r.family = o.at("family").get<std::string>();
    r.measure = o.at("measure").get<std::string>();
    r.f = o.at("f").get<std::string>();
    r.n = o.at("n").get<int>();
    r.m = o.at("m").get<int>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.trial = o.at("trial").get<int>();
    r.error = o.at("error").get<double>();
    r.gap = o.at("gap").get<double>();
    for (const auto& [name, value] : o.at("bounds").items()) r.bounds[name] = value.get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void emit_records(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path) {
  require(!records.empty(), "emit_records: no records to write");
  const std::string body = format == OutputFormat::Csv ? records_to_csv(records) : records_to_json(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace lsqstab::cli
