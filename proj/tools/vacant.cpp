#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <vacant/vacant.hpp>

namespace fs = std::filesystem;
using namespace vacant;

namespace {

// Flat JSON object as an alternative to key=value config files.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_desc, std::string prefix) const override {
    return CLI::ConfigTOML().to_config(app, default_also, write_desc, prefix);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
    std::vector<CLI::ConfigItem> items;
    auto scalar = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
      CLI::ConfigItem item;
      item.name = it.key();
      if (it->is_array())
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(*it));
      items.push_back(item);
    }
    return items;
  }
};

// Config files hold the options of one subcommand without section headers;
// this attaches every top-level key to the subcommand named on the command line.
class SubcommandConfig : public CLI::Config {
 public:
  SubcommandConfig(std::shared_ptr<CLI::Config> inner, std::string sub) : inner_(std::move(inner)), sub_(std::move(sub)) {}

  std::string to_config(const CLI::App* app, bool default_also, bool write_desc, std::string prefix) const override {
    return inner_->to_config(app, default_also, write_desc, prefix);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    auto items = inner_->from_config(is);
    for (auto& item : items)
      if (item.parents.empty() && !sub_.empty()) item.parents = {sub_};
    return items;
  }

 private:
  std::shared_ptr<CLI::Config> inner_;
  std::string sub_;
};

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VACANT_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

// Relative output files land under VACANT_OUTPUT_DIR when it is set.
fs::path output_file(const std::string& name) {
  fs::path p(name);
  if (p.is_relative())
    if (const char* env = std::getenv("VACANT_OUTPUT_DIR"); env && *env) return fs::path(env) / p;
  return p;
}

class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      const fs::path p = output_file(path);
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      file_ = std::make_unique<std::ofstream>(p);
      if (!*file_) fail(errc::invalid_argument, "cannot open " + p.string());
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void provenance(CsvWriter& w, const CLI::App* sub) {
  w.comment("vacant version=" + std::string(code_version));
  w.comment("command", sub->get_name());
  w.comment("generated", utc_timestamp());
  // The effective configuration, one key=value per line.
  std::istringstream cfg(sub->config_to_str(true, false));
  std::string line;
  while (std::getline(cfg, line))
    if (!line.empty() && line.find("threads") != 0 && line.find("=\"\"") == std::string::npos) w.comment("cfg " + line);
}

TorusPoint parse_xi(const std::vector<int>& xi, const TorusGeometry& g) {
  if (xi.empty()) return TorusPoint(g.d, 0);
  require(static_cast<int>(xi.size()) == g.d, "--xi needs exactly d coordinates");
  for (int x : xi) require(x >= 0 && x < g.n, "--xi coordinates must lie in [0, n)");
  return xi;
}

struct TimeRange {
  std::uint64_t first = 0, last = 0, step = 1;
};

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size() && !s.empty(), "not an integer: " + s);
  return v;
}

TimeRange parse_range(const std::string& s) {
  TimeRange r;
  std::string body = s;
  if (auto c = body.find(':'); c != std::string::npos) {
    r.step = to_u64(body.substr(c + 1));
    body = body.substr(0, c);
  }
  if (auto dots = body.find(".."); dots != std::string::npos) {
    r.first = to_u64(body.substr(0, dots));
    r.last = to_u64(body.substr(dots + 2));
  } else {
    r.first = r.last = to_u64(body);
  }
  require(r.step >= 1 && r.first <= r.last, "--t expects a..b[:step] with a <= b");
  return r;
}

std::pair<unsigned, unsigned> parse_pair(const std::string& s) {
  const auto c = s.find(':');
  require(c != std::string::npos, "covariance pairs are written I:J");
  return {static_cast<unsigned>(to_u64(s.substr(0, c))), static_cast<unsigned>(to_u64(s.substr(c + 1)))};
}

std::string pair_name(unsigned I, unsigned J) { return "cov_" + std::to_string(I) + "_" + std::to_string(J); }

std::uint64_t resolve_t(const TorusGeometry& g, const std::optional<double>& u, const std::optional<std::uint64_t>& t) {
  require(u.has_value() != t.has_value(), "give exactly one of --u and --t");
  return t ? *t : t_from_u(*u, g);
}

void check_theory_dim(int d) { require(d >= 3, "theory formulas need d >= 3"); }

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  int n = 0, d = 0, ell = 1;
  std::optional<double> u;
  std::optional<std::uint64_t> t;
  std::uint64_t reps = 1000, seed = 0;
  unsigned threads = 0;
  std::vector<std::string> cov;
  bool cov_all = false;
  std::string out;
};

int run_simulate(const SimulateArgs& a, const CLI::App* sub) {
  ExperimentConfig cfg;
  cfg.geom = TorusGeometry(a.d, a.n);
  cfg.ell = a.ell;
  cfg.t = resolve_t(cfg.geom, a.u, a.t);
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.width = a.threads ? a.threads : default_width();
  require(cfg.reps >= 2, "--reps must be >= 2");
  if (a.cov_all)
    cfg.pairs = all_subset_pairs(a.ell);
  else
    for (const auto& s : a.cov) cfg.pairs.push_back(parse_pair(s));
  const ExperimentStats st = run_experiment(cfg);

  const fs::path dir = output_dir(a.out);
  fs::create_directories(dir);
  auto header = [&](CsvWriter& w) {
    provenance(w, sub);
    w.comment("n", std::to_string(a.n));
    w.comment("d", std::to_string(a.d));
    w.comment("ell", std::to_string(a.ell));
    w.comment("t", std::to_string(cfg.t));
    w.comment("u", format_double(u_from_t(cfg.t, cfg.geom)));
    w.comment("m", std::to_string(cfg.reps));
    w.comment("seed", std::to_string(cfg.seed));
    w.comment("t_rounding", "t=round(u*n^d)-1, exact halves to even t");
  };
  {
    std::ofstream os(dir / "results.csv");
    CsvWriter w(os);
    header(w);
    w.row({"statistic", "value", "stderr"});
    w.row({"mean", format_double(st.mean), format_double(st.mean_stderr)});
    w.row({"variance", format_double(st.variance), format_double(st.variance_stderr)});
    w.row({"skewness", format_double(st.skewness), "NA"});
    w.row({"excess_kurtosis", format_double(st.excess_kurtosis), "NA"});
    for (const auto& c : st.covariances) w.row({pair_name(c.I, c.J), format_double(c.covariance), format_double(c.stderr_)});
  }
  if (st.m >= 1) {
    const Histogram h = histogram(st.values);
    std::ofstream os(dir / "histogram.csv");
    CsvWriter w(os);
    header(w);
    w.comment("bin_width", format_double(h.width));
    w.row({"bin_left", "bin_right", "count"});
    for (std::size_t b = 0; b < h.count.size(); ++b)
      w.row({format_double(h.left[b]), format_double(h.right[b]), std::to_string(h.count[b])});
  }
  std::cerr << "wrote " << (dir / "results.csv").string() << " and " << (dir / "histogram.csv").string() << "\n";
  return 0;
}

// ---- theory ------------------------------------------------------------

struct TheoryArgs {
  std::vector<int> n;
  int d = 0, ell = 1;
  std::optional<double> u;
  std::optional<std::uint64_t> t;
  std::vector<std::string> cov;
  unsigned threads = 0;
  std::string output;
};

int run_theory(const TheoryArgs& a, const CLI::App* sub) {
  check_theory_dim(a.d);
  require(!a.n.empty(), "--n needs at least one value");
  require(a.ell >= 1 && a.ell <= max_walks, "--ell must be in [1, 16]");
  std::vector<std::pair<unsigned, unsigned>> pairs;
  for (const auto& s : a.cov) pairs.push_back(parse_pair(s));
  const unsigned width = a.threads ? a.threads : default_width();
  const LatticeValue g0 = lattice_green(TorusPoint(a.d, 0), a.d);

  Sink sink(a.output);
  CsvWriter w(sink.stream());
  provenance(w, sub);
  w.comment("G0", format_double(g0.value) + " bound=" + format_double(g0.bound) + " method=" + g0.method);
  if (a.d == 3 || a.d == 4) {
    const LatticeValue al = alpha_constant(a.d);
    w.comment("alpha_" + std::to_string(a.d), format_double(al.value) + " bound=" + format_double(al.bound) +
                                                  " method=" + al.method + " source=data/alpha_constants.csv");
  }
  w.comment("var_over_scale", "var_exact/(n^d h_d(n)), h_3=n, h_4=log n, h_d=1 for d>=5");
  std::vector<std::string> cols{"n", "d", "ell", "t", "u", "mean_exact", "mean_expansion", "var_exact", "var_over_scale", "nu_limit"};
  for (auto [I, J] : pairs) cols.push_back(pair_name(I, J) + "_exact");
  w.row(cols);
  for (int n : a.n) {
    const TorusGeometry g(a.d, n);
    VertexBudget{}.check(g, "theory");
    const std::uint64_t t = resolve_t(g, a.u, a.t);
    const EigenTable eig(g);
    const GreenTables tab = build_green_tables(g);
    const OrbitTailTable orbit(eig, width);
    const double u = u_from_t(t, g);
    const double var = exact_variance(orbit, a.ell, t);
    const double nu_lim = nu(2.0 * a.ell * u / g0.value, a.d);
    std::vector<std::string> row{std::to_string(n), std::to_string(a.d), std::to_string(a.ell), std::to_string(t),
                                 format_double(u), format_double(exact_mean_vacant(eig, a.ell, t)),
                                 format_double(mean_expansion(tab, a.ell, t)), format_double(var),
                                 format_double(var / (g.volume() * variance_scale(g))), format_double(nu_lim)};
    for (auto [I, J] : pairs) row.push_back(format_double(exact_covariance(orbit, a.ell, t, {I, J})));
    w.row(row);
  }
  return 0;
}

// ---- green -------------------------------------------------------------

struct GreenArgs {
  int n = 0, d = 0;
  bool lattice = false, check = false, constants = false, naive = false;
  std::vector<int> xi;
  std::string output;
};

int run_green(const GreenArgs& a, const CLI::App* sub) {
  Sink sink(a.output);
  CsvWriter w(sink.stream());
  if (a.constants) {
    provenance(w, sub);
    w.row({"name", "d", "value", "bound", "method", "radius"});
    for (int d : {3, 4, 5, 6}) {
      const LatticeValue g = lattice_green(TorusPoint(d, 0), d);
      w.row({"G0", std::to_string(d), format_double(g.value), format_double(g.bound), g.method, format_double(g.radius)});
      if (d >= 5) {
        const LatticeValue gp = lattice_green_deriv(TorusPoint(d, 0), d);
        w.row({"Gprime0", std::to_string(d), format_double(gp.value), format_double(gp.bound), gp.method,
               format_double(gp.radius)});
      }
    }
    const LatticeValue z = epstein_inverse_fourth_3d();
    w.row({"inverse_fourth_sum", "3", format_double(z.value), format_double(z.bound), z.method, "0"});
    const LogSlopeFit fit = inverse_fourth_log_fit_4d();
    w.row({"inverse_fourth_log_slope", "4", format_double(fit.slope), format_double(std::fabs(fit.slope - fit.half_range_slope)),
           "jacobi-r4-fit", format_double(fit.radii.back())});
    for (int d : {3, 4}) {
      const LatticeValue al = alpha_constant(d);
      w.row({"alpha", std::to_string(d), format_double(al.value), format_double(al.bound), al.method, format_double(al.radius)});
    }
    return 0;
  }
  if (a.lattice) {
    require(a.d >= 3, "--lattice needs d >= 3");
    TorusPoint xi = a.xi.empty() ? TorusPoint(a.d, 0) : TorusPoint(a.xi);
    require(static_cast<int>(xi.size()) == a.d, "--xi needs exactly d coordinates");
    const LatticeValue g = lattice_green(xi, a.d);
    provenance(w, sub);
    w.row({"xi", "G", "Gprime", "bound", "method"});
    std::string key;
    for (std::size_t j = 0; j < xi.size(); ++j) key += (j ? " " : "") + std::to_string(xi[j]);
    double bound = g.bound;
    std::string gp = "NA";
    if (a.d >= 5) {
      const LatticeValue d1 = lattice_green_deriv(xi, a.d);
      gp = format_double(d1.value);
      bound = std::max(bound, d1.bound);
    }
    w.row({key, format_double(g.value), gp, format_double(bound), g.method});
    return 0;
  }
  require(a.n >= 2 && a.d >= 1, "--n and --d are required");
  const TorusGeometry g(a.d, a.n);
  const GreenTables tab = a.naive ? build_green_tables_naive(g) : build_green_tables(g);
  if (a.check) {
    CompensatedSum s1, s1p, s2;
    for (std::size_t i = 0; i < tab.g.size(); ++i) {
      s1 += tab.g[i];
      s1p += tab.gprime[i];
      s2 += static_cast<long double>(tab.g[i]) * tab.g[i];
    }
    const double zero_tol = 1e-10 * std::pow(g.volume(), 0.5);
    const bool z1 = std::fabs(static_cast<double>(s1.value())) <= zero_tol;
    const bool z2 = std::fabs(static_cast<double>(s1p.value())) <= zero_tol * std::max(1.0, tab.gprime0);
    const double planch = static_cast<double>(s2.value() - tab.g0 - tab.gprime0) / (tab.g0 + tab.gprime0);
    const bool p = std::fabs(planch) <= 1e-8;
    provenance(w, sub);
    w.row({"identity", "value", "status"});
    w.row({"sum_g", format_double(static_cast<double>(s1.value())), z1 ? "PASS" : "FAIL"});
    w.row({"sum_gprime", format_double(static_cast<double>(s1p.value())), z2 ? "PASS" : "FAIL"});
    w.row({"plancherel_relative", format_double(planch), p ? "PASS" : "FAIL"});
    return z1 && z2 && p ? 0 : 1;
  }
  provenance(w, sub);
  w.comment("n", std::to_string(a.n));
  w.comment("d", std::to_string(a.d));
  std::vector<std::string> cols;
  for (int j = 0; j < a.d; ++j) cols.push_back("x" + std::to_string(j));
  cols.push_back("g");
  cols.push_back("gprime");
  w.row(cols);
  for (std::uint64_t i = 0; i < tab.g.size(); ++i) {
    std::vector<std::string> row;
    for (int x : point_at(i, g)) row.push_back(std::to_string(x));
    row.push_back(format_double(tab.g[i]));
    row.push_back(format_double(tab.gprime[i]));
    w.row(row);
  }
  return 0;
}

// ---- tails -------------------------------------------------------------

struct TailsArgs {
  int n = 0, d = 0;
  std::vector<int> xi;
  std::string range;
  std::string output;
};

int run_tails(const TailsArgs& a, const CLI::App* sub) {
  const TorusGeometry g(a.d, a.n);
  VertexBudget{}.check(g, "tails");
  const TorusPoint xi = parse_xi(a.xi, g);
  const TimeRange r = a.range.empty() ? TimeRange{0, g.vertex_count(), 1} : parse_range(a.range);
  const EigenTable eig(g);
  const TailDistribution tail(eig, xi);
  std::optional<GreenTables> tab;
  if (a.d >= 3) tab = build_green_tables(g);
  Sink sink(a.output);
  CsvWriter w(sink.stream());
  provenance(w, sub);
  w.comment("bound", "max|fhat/f| zeta_1^{-t}, error of the one-root approximation");
  w.row({"t", "exact", "asymptotic", "bound"});
  for (std::uint64_t t = r.first; t <= r.last; t += r.step) {
    const Coefficient c = tail.coefficient(t);
    w.row({std::to_string(t), format_double(tail(t)), tab ? format_double(asymptotic_tail(*tab, xi, t)) : "NA",
           format_double(c.bound)});
    if (r.last - t < r.step) break;
  }
  return 0;
}

// ---- compare -----------------------------------------------------------

struct CompareArgs {
  std::string results, theory, output;
};

CsvTable load(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), "cannot open " + path);
  return read_csv(is);
}

int run_compare(const CompareArgs& a, const CLI::App* sub) {
  const CsvTable res = load(a.results);
  const CsvTable th = load(a.theory);
  for (const char* key : {"n", "d", "ell", "t"})
    require(!res.meta_value(key).empty(), std::string("results file lacks metadata ") + key);
  const int cn = th.column("n"), cd = th.column("d"), cl = th.column("ell"), ct = th.column("t");
  require(cn >= 0 && cd >= 0 && cl >= 0 && ct >= 0, "theory file lacks n/d/ell/t columns");
  const std::vector<std::string>* match = nullptr;
  for (const auto& row : th.rows)
    if (row[cn] == res.meta_value("n") && row[cd] == res.meta_value("d") && row[cl] == res.meta_value("ell") &&
        row[ct] == res.meta_value("t"))
      match = &row;
  require(match != nullptr, "no theory row matches the results metadata (n, d, ell, t)");
  const int sv = res.column("statistic"), vv = res.column("value"), ev = res.column("stderr");
  require(sv >= 0 && vv >= 0 && ev >= 0, "results file lacks statistic/value/stderr columns");

  Sink sink(a.output);
  CsvWriter w(sink.stream());
  provenance(w, sub);
  for (const char* key : {"n", "d", "ell", "t", "u", "m", "seed"}) w.comment(key, res.meta_value(key));
  w.row({"statistic", "mc", "stderr", "exact", "z"});
  const std::map<std::string, std::string> exact_col{{"mean", "mean_exact"}, {"variance", "var_exact"}};
  for (const auto& row : res.rows) {
    const std::string& stat = row[sv];
    std::string col;
    if (auto it = exact_col.find(stat); it != exact_col.end())
      col = it->second;
    else if (stat.rfind("cov_", 0) == 0)
      col = stat + "_exact";
    const int ci = col.empty() ? -1 : th.column(col);
    if (ci < 0) continue;
    const double mc = parse_double(row[vv]), se = parse_double(row[ev]), ex = parse_double((*match)[ci]);
    const double z = se > 0 ? (mc - ex) / se : std::nan("");
    w.row({stat, row[vv], row[ev], (*match)[ci], format_double(z)});
  }
  return 0;
}

// Picks the reader from the file extension and the target subcommand from argv.
void configure_config(CLI::App& app, int argc, char** argv) {
  std::shared_ptr<CLI::Config> inner = std::make_shared<CLI::ConfigTOML>();
  std::string sub;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc)
      path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      path = arg.substr(9);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") inner = std::make_shared<JsonConfig>();
    if (sub.empty())
      for (const CLI::App* s : app.get_subcommands({}))
        if (s->get_name() == arg) sub = arg;
  }
  app.config_formatter(std::make_shared<SubcommandConfig>(inner, sub));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vacant-set statistics of lazy random walks on the discrete torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(code_version));
  app.set_config("--config", "", "key=value or .json file with the subcommand's options; flags override it");
  app.fallthrough();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates of V and range-intersection covariances");
  sim->add_option("--n", sa.n, "torus side length")->required()->check(CLI::Range(2, 1 << 20));
  sim->add_option("--d", sa.d, "dimension")->required()->check(CLI::Range(1, 32));
  sim->add_option("--ell", sa.ell, "number of walks (1..16)")->capture_default_str()->check(CLI::Range(1, 16));
  auto* su = sim->add_option("--u", sa.u, "time density; t = round(u n^d) - 1");
  sim->add_option("--t", sa.t, "time horizon")->excludes(su);
  sim->add_option("--reps", sa.reps, "replicates")->capture_default_str();
  sim->add_option("--seed", sa.seed, "master seed")->capture_default_str();
  sim->add_option("--threads", sa.threads, "worker threads (0 = all cores); results do not depend on it");
  sim->add_option("--cov", sa.cov, "covariance pairs I:J of walk-subset bitmasks")->delimiter(',');
  sim->add_flag("--cov-all", sa.cov_all, "all 2^ell x 2^ell covariances (ell <= 8)");
  sim->add_option("--out", sa.out, "output directory (default $VACANT_OUTPUT_DIR or .)");

  TheoryArgs ta;
  auto* th = app.add_subcommand("theory", "Exact finite-n mean/variance and asymptotic limits");
  th->add_option("--n", ta.n, "side lengths, comma separated")->required()->delimiter(',');
  th->add_option("--d", ta.d, "dimension (>= 3)")->required();
  th->add_option("--ell", ta.ell, "number of walks")->capture_default_str();
  auto* tu = th->add_option("--u", ta.u, "time density; t = round(u n^d) - 1");
  th->add_option("--t", ta.t, "time horizon")->excludes(tu);
  th->add_option("--cov", ta.cov, "covariance pairs I:J")->delimiter(',');
  th->add_option("--threads", ta.threads, "worker threads (0 = all cores)");
  th->add_option("--output", ta.output, "output file (default stdout)");

  GreenArgs ga;
  auto* gr = app.add_subcommand("green", "Torus and lattice Green functions");
  gr->add_option("--n", ga.n, "torus side length");
  gr->add_option("--d", ga.d, "dimension");
  gr->add_flag("--lattice", ga.lattice, "infinite-lattice G(xi) with error bound");
  gr->add_option("--xi", ga.xi, "point, comma separated")->delimiter(',');
  gr->add_flag("--check-identities", ga.check, "zero-sum and Plancherel checks");
  gr->add_flag("--constants", ga.constants, "G(0), G'(0), lattice sums and alpha_3, alpha_4");
  gr->add_flag("--naive", ga.naive, "direct character sum (n <= 5)");
  gr->add_option("--output", ga.output, "output file (default stdout)");

  TailsArgs tl;
  auto* ts = app.add_subcommand("tails", "Exact vs asymptotic hitting-time tails");
  ts->add_option("--n", tl.n, "torus side length")->required()->check(CLI::Range(2, 1 << 20));
  ts->add_option("--d", tl.d, "dimension")->required()->check(CLI::Range(1, 32));
  ts->add_option("--xi", tl.xi, "second target point (default 0)")->delimiter(',');
  ts->add_option("--t", tl.range, "times a..b[:step] (default 0..n^d)");
  ts->add_option("--output", tl.output, "output file (default stdout)");

  CompareArgs ca;
  auto* cp = app.add_subcommand("compare", "z-scores of Monte Carlo results against a theory file");
  cp->add_option("--results", ca.results, "simulate results.csv")->required();
  cp->add_option("--theory", ca.theory, "theory CSV")->required();
  cp->add_option("--output", ca.output, "output file (default stdout)");

  configure_config(app, argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const CLI::App* failing = &app;
    for (CLI::App* sub : app.get_subcommands()) failing = sub;
    std::cerr << failing->help();
    return 2;
  }

  try {
    if (sim->parsed()) return run_simulate(sa, sim);
    if (th->parsed()) return run_theory(ta, th);
    if (gr->parsed()) return run_green(ga, gr);
    if (ts->parsed()) return run_tails(tl, ts);
    if (cp->parsed()) return run_compare(ca, cp);
  } catch (const vacant::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == errc::budget_exceeded) return 3;
    if (e.code() == errc::invalid_argument || e.code() == errc::dimension_unsupported) return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
