#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alphacf/entropy.hpp"
#include "alphacf/matching.hpp"
#include "alphacf/tree.hpp"

using namespace alphacf;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_counterexample = 2;
constexpr int exit_verification = 3;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// one "# alphacf <cmd> key=value ..." line from the parsed options
std::string manifest(const CLI::App* sub) {
  std::ostringstream os;
  os << "# alphacf " << sub->get_name();
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
    std::string v;
    if (o->count() > 0) {
      for (const auto& r : o->results()) v += (v.empty() ? "" : ",") + r;
    } else {
      v = o->get_default_str();
    }
    if (!v.empty()) os << " " << o->get_lnames()[0] << "=" << v;
  }
  return os.str();
}

void write_table(const Table& t, const std::string& path, const std::string& format, const std::string& head,
                 const json& extra = json::object()) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    os = &file;
  }
  if (format == "json") {
    json doc;
    doc["manifest"] = head.substr(2);
    if (!extra.empty()) doc["summary"] = extra;
    doc["rows"] = json::array();
    for (const auto& r : t.rows) {
      json o;
      for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = r[i];
      doc["rows"].push_back(o);
    }
    *os << doc.dump(1) << "\n";
    return;
  }
  *os << head << "\n";
  for (auto it = extra.begin(); it != extra.end(); ++it) *os << "# " << it.key() << "=" << csv_cell(it.value()) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) *os << (i ? "," : "") << t.columns[i];
  *os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) *os << (i ? "," : "") << csv_cell(r[i]);
    *os << "\n";
  }
}

std::string with_suffix(const std::string& out, const std::string& suffix, const std::string& format) {
  return out + suffix + (format == "json" ? ".json" : ".csv");
}

std::pair<BigRational, BigRational> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw error(errc::parse_error, "window must be a,b");
  BigRational lo = parse_decimal(text.substr(0, comma)), hi = parse_decimal(text.substr(comma + 1));
  if (!(lo < hi)) throw error(errc::invalid_argument, "window needs a < b");
  return {lo, hi};
}

// nearest double, get_d truncates
double nearest(const BigRational& r) {
  double best = r.get_d();
  BigRational err = abs(exact_rational(best) - r);
  for (double c : {std::nextafter(best, -INFINITY), std::nextafter(best, INFINITY)})
    if (BigRational e = abs(exact_rational(c) - r); e < err) best = c, err = e;
  return best;
}

std::string sci(const mpf_class& v) { return mpf_to_string(v, 3); }

std::vector<json> interval_row(const MatchingInterval& mi) {
  return {mi.interval.lo.to_string(),
          mi.interval.hi.to_string(),
          mi.interval.lo.to_double(),
          mi.interval.hi.to_double(),
          sci(mi.interval.length_mpf()),
          mi.k1,
          mi.k2,
          to_string(mi.monotonicity),
          format_label(mi.label_lo),
          format_label(mi.label_hi),
          format_coding(mi.coding_alpha),
          format_coding(mi.coding_alpham1)};
}

const std::vector<std::string> interval_columns{"lo",    "hi",        "lo_decimal", "hi_decimal", "size",
                                                "k1",    "k2",        "monotonicity", "label_lo", "label_hi",
                                                "coding_alpha", "coding_alpha_minus_1"};

struct Common {
  std::string out;
  std::string format = "csv";
  unsigned threads = default_threads();
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output path (stdout when omitted)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads")->capture_default_str();
}

int cmd_tree(const CLI::App* sub, const Common& c, int depth, const std::string& window) {
  std::optional<Interval> w;
  if (!window.empty()) {
    auto [lo, hi] = parse_window(window);
    w = Interval(QuadSurd(lo), QuadSurd(hi));
  }
  const std::string prefix = c.out.empty() ? "tree" : c.out;
  Tree t;
  try {
    t = generate_tree(depth, c.threads, w);
  } catch (const counterexample& e) {
    const std::string path = prefix + "_certificate.txt";
    std::ofstream(path) << manifest(sub) << "\n" << e.certificate();
    std::cerr << "counterexample: certificate written to " << path << "\n";
    return exit_counterexample;
  }
  Table iv{interval_columns, {}};
  for (const auto& mi : all_intervals(t)) iv.rows.push_back(interval_row(mi));
  Table gaps{{"level", "is_point", "lo", "hi", "label_lo", "label_hi"}, {}};
  for (const auto& level : t.levels)
    for (const auto& g : level)
      gaps.rows.push_back({g.level, g.is_point ? 1 : 0, g.interval.lo.to_string(), g.interval.hi.to_string(),
                           format_endpoint(g.label_lo), format_endpoint(g.label_hi)});
  const auto all = all_intervals(t);
  json summary;
  summary["intervals"] = all.size();
  summary["coverage_0.2_1"] = coverage(all, Interval(QuadSurd(BigRational(1, 5)), QuadSurd(1)));
  summary["coverage_0.1_1"] = coverage(all, Interval(QuadSurd(BigRational(1, 10)), QuadSurd(1)));
  const std::string head = manifest(sub);
  write_table(iv, with_suffix(prefix, "_intervals", c.format), c.format, head, summary);
  write_table(gaps, with_suffix(prefix, "_gaps", c.format), c.format, head);
  std::cout << summary.dump() << "\n";
  return exit_ok;
}

EstimatorConfig make_config(std::uint64_t N, std::uint64_t M, double eps, std::uint64_t seed,
                            const std::string& restart, unsigned threads) {
  EstimatorConfig cfg;
  cfg.N = N;
  cfg.M = M;
  cfg.epsilon = eps;
  cfg.rng_seed = seed;
  cfg.restart_policy = restart == "discard" ? RestartPolicy::DiscardOrbit : RestartPolicy::RestartPoint;
  cfg.threads = threads;
  return cfg;
}

int cmd_entropy(const CLI::App* sub, const Common& c, const std::string& window, int grid,
                const EstimatorConfig& cfg) {
  auto [lo, hi] = parse_window(window);
  Table t{{"alpha", "mean", "std", "N", "M", "epsilon", "seed"}, {}};
  for (const auto& e : sigma_profile(nearest(lo), nearest(hi), grid, cfg))
    t.rows.push_back({e.alpha, e.mean, e.std, e.N, e.M, cfg.epsilon, cfg.rng_seed});
  write_table(t, c.out, c.format, manifest(sub));
  return exit_ok;
}

int cmd_scan(const CLI::App* sub, const Common& c, const std::string& window, int seeds, int kmax,
             std::uint64_t seed) {
  auto [lo, hi] = parse_window(window);
  const BigInt den("1000000000000");
  const BigInt a = detail::floor_div(BigInt(lo.get_num() * den), lo.get_den()) + 1;
  const BigInt b = detail::floor_div(BigInt(hi.get_num() * den), hi.get_den());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick(a.get_si(), b.get_si());
  std::map<std::string, std::pair<MatchingInterval, int>> found;
  int misses = 0, failures = 0;
  for (int i = 0; i < seeds; ++i) {
    BigRational r(BigInt(pick(rng)), den);
    r.canonicalize();
    auto cand = scan_candidate(r, kmax);
    if (!cand) {
      ++misses;
      continue;
    }
    MatchingInterval mi;
    try {
      mi = solve_matching(*cand);
    } catch (const error&) {
      ++failures;
      continue;
    }
    const std::string key = mi.interval.lo.to_string() + "|" + mi.interval.hi.to_string();
    auto it = found.find(key);
    if (it == found.end()) found.emplace(key, std::make_pair(mi, 1));
    else ++it->second.second;
  }
  std::vector<std::pair<MatchingInterval, int>> rows;
  for (auto& [k, v] : found) rows.push_back(v);
  std::sort(rows.begin(), rows.end(),
            [](const auto& x, const auto& y) { return surd_cmp(x.first.interval.lo, y.first.interval.lo) < 0; });
  Table t{interval_columns, {}};
  t.columns.push_back("hits");
  for (auto& [mi, hits] : rows) {
    auto r = interval_row(mi);
    r.push_back(hits);
    t.rows.push_back(r);
  }
  json summary;
  summary["distinct"] = rows.size();
  summary["no_candidate"] = misses;
  summary["unverified"] = failures;
  write_table(t, c.out, c.format, manifest(sub), summary);
  return exit_ok;
}

int cmd_chain(const CLI::App* sub, const Common& c, int levels, const std::string& s0) {
  const CFString start = parse_label(s0);
  auto chain = doubling_chain(start, levels);
  Table t{{"n", "k1", "k2", "size", "lo", "hi", "lo_decimal", "hi_decimal", "label_lo", "label_hi"}, {}};
  for (std::size_t n = 0; n < chain.size(); ++n) {
    const auto& mi = chain[n];
    t.rows.push_back({n + 1, mi.k1, mi.k2, sci(mi.interval.length_mpf()), mi.interval.lo.to_string(),
                      mi.interval.hi.to_string(), mi.interval.lo.to_double(), mi.interval.hi.to_double(),
                      format_label(mi.label_lo), format_label(mi.label_hi)});
  }
  ClusterPoint cp = cluster_point(start, std::max(levels, 8));
  json summary;
  summary["cluster_point"] = cp.decimal.substr(0, std::min<std::size_t>(cp.decimal.size(), 80));
  summary["certified_digits"] = cp.decimal.size() - 2;
  write_table(t, c.out, c.format, manifest(sub), summary);
  return exit_ok;
}

int cmd_density(const CLI::App* sub, const Common& c, const std::string& alpha, std::uint64_t iters,
                std::size_t bins, std::uint64_t seed) {
  const BigRational a = parse_decimal(alpha);
  Histogram h = density_histogram(nearest(a), iters, bins, seed, c.threads);
  Table t{{"bin_lo", "bin_hi", "density"}, {}};
  for (std::size_t i = 0; i < h.bins(); ++i) t.rows.push_back({h.bin_lo(i), h.bin_hi(i), h.density(i)});
  json summary;
  try {
    FitWindows w = fit_windows(a);
    HyperbolaFit right = fit_hyperbola(h, w.right_lo, nearest(a));
    HyperbolaFit left = fit_hyperbola(h, nearest(a) - 1, w.left_hi);
    summary["k1"] = w.k1;
    summary["k2"] = w.k2;
    Table fit{{"branch", "A", "B", "window_lo", "window_hi", "residual"}, {}};
    fit.rows.push_back({"right", right.A, right.B, right.window_lo, right.window_hi, right.residual});
    fit.rows.push_back({"left", left.A, left.B, left.window_lo, left.window_hi, left.residual});
    if (!c.out.empty() && c.out != "-") {
      std::string stem = c.out;
      if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
        stem.resize(dot);
      write_table(fit, with_suffix(stem, "_fit", c.format), c.format, manifest(sub));
    }
    summary["A_plus"] = right.A;
    summary["B_plus"] = right.B;
    summary["A_minus"] = left.A;
    summary["B_minus"] = left.B;
  } catch (const error& e) {
    summary["fit"] = std::string("skipped: ") + e.what();
  }
  write_table(t, c.out, c.format, manifest(sub), summary);
  return exit_ok;
}

int cmd_extrapolate(const CLI::App* sub, const Common& c, const std::string& alpha0, const std::string& window,
                    const std::string& fit_window, int grid, const EstimatorConfig& cfg, std::uint64_t hist_iters,
                    std::size_t bins) {
  const BigRational a0 = parse_decimal(alpha0);
  auto [elo, ehi] = parse_window(window);
  auto [flo, fhi] = parse_window(fit_window);
  FitWindows w = fit_windows(a0);
  Histogram h = density_histogram(nearest(a0), hist_iters, bins, cfg.rng_seed, cfg.threads, cfg.epsilon);
  HyperbolaFit right = fit_hyperbola(h, w.right_lo, nearest(a0));
  MatchingInterval mi = matching_interval_at(a0);
  ExtrapolationModel m{nearest(a0), 0, mi.k1, mi.k2, right.A, right.B, mi.interval};
  std::vector<double> xs, hs, ss;
  for (double x : grid_points(nearest(flo), nearest(fhi), grid)) {
    auto e = birkhoff_entropy(x, cfg);
    xs.push_back(x);
    hs.push_back(e.mean);
    ss.push_back(e.std);
  }
  m.h0 = fit_h0(m, xs, hs);
  LineFit line = fit_line(xs, hs);
  Table t{{"alpha", "region", "birkhoff", "birkhoff_std", "log_model", "linear"}, {}};
  double rl = 0, rm = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) t.rows.push_back({xs[i], "fit", hs[i], ss[i], entropy_extrapolate(m, xs[i]), line(xs[i])});
  const auto eval = grid_points(nearest(elo), nearest(ehi), grid);
  for (double x : eval) {
    auto e = birkhoff_entropy(x, cfg);
    const double lm = entropy_extrapolate(m, x), ln = line(x);
    rm += (e.mean - lm) * (e.mean - lm);
    rl += (e.mean - ln) * (e.mean - ln);
    t.rows.push_back({x, "eval", e.mean, e.std, lm, ln});
  }
  json summary;
  summary["k1"] = m.k1;
  summary["k2"] = m.k2;
  summary["A"] = m.A;
  summary["B"] = m.B;
  summary["h0"] = m.h0;
  summary["rms_log"] = std::sqrt(rm / static_cast<double>(eval.size()));
  summary["rms_linear"] = std::sqrt(rl / static_cast<double>(eval.size()));
  write_table(t, c.out, c.format, manifest(sub), summary);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha continued fractions: matching intervals, matching tree, entropy"};
  app.require_subcommand(1);
  Common common;

  int depth = 8, levels = 6, grid = 10, kmax = 40, seeds = 1000;
  std::string window, fit_window = "0.3028,0.3042", alpha = "0.338", s0 = "1", restart = "point";
  std::uint64_t iters = 10000, samples = 1000, seed = 1, hist_iters = 100'000'000;
  std::size_t bins = 1000;
  double epsilon = 1e-16;

  auto* tree = app.add_subcommand("tree", "matching tree by gap bisection");
  tree->add_option("--depth", depth, "number of refinement levels")->capture_default_str()->check(CLI::Range(0, 30));
  tree->add_option("--window", window, "only refine gaps meeting a,b");
  add_common(tree, common);

  auto add_estimator = [&](CLI::App* sub) {
    sub->add_option("--iters", iters, "N, iterations per orbit")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--samples", samples, "M, orbits per parameter")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", epsilon, "cutoff near 0")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "rng seed")->capture_default_str();
    sub->add_option("--restart", restart, "point or discard")->check(CLI::IsMember({"point", "discard"}))->capture_default_str();
  };

  auto* ent = app.add_subcommand("entropy", "Birkhoff entropy on a parameter grid");
  ent->add_option("--window", window, "a,b")->required();
  ent->add_option("--grid", grid, "grid points")->capture_default_str()->check(CLI::PositiveNumber);
  add_estimator(ent);
  add_common(ent, common);

  auto* scan = app.add_subcommand("scan", "matching intervals from random rational seeds");
  scan->add_option("--window", window, "a,b")->required();
  scan->add_option("--seeds", seeds, "number of seeds")->capture_default_str()->check(CLI::PositiveNumber);
  scan->add_option("--kmax", kmax, "largest exponent tried")->capture_default_str()->check(CLI::Range(1, 64));
  scan->add_option("--seed", seed, "rng seed")->capture_default_str();
  add_common(scan, common);

  auto* chain = app.add_subcommand("chain", "period doubling chain and its cluster point");
  chain->add_option("--levels", levels, "chain links")->capture_default_str()->check(CLI::Range(1, 12));
  chain->add_option("--s0", s0, "starting string, comma separated")->capture_default_str();
  add_common(chain, common);

  auto* dens = app.add_subcommand("density", "invariant density histogram and hyperbola fits");
  dens->add_option("--alpha", alpha, "parameter")->capture_default_str();
  dens->add_option("--iters", hist_iters, "orbit points")->capture_default_str()->check(CLI::PositiveNumber);
  dens->add_option("--bins", bins, "bins")->capture_default_str()->check(CLI::Range(10, 10'000'000));
  dens->add_option("--seed", seed, "rng seed")->capture_default_str();
  add_common(dens, common);

  auto* ext = app.add_subcommand("extrapolate", "logarithmic entropy model against a linear fit");
  ext->add_option("--alpha0", alpha, "reference parameter")->capture_default_str();
  ext->add_option("--window", window, "evaluation window a,b")->required();
  ext->add_option("--fit-window", fit_window, "window for h0 and the line")->capture_default_str();
  ext->add_option("--grid", grid, "points per window")->capture_default_str()->check(CLI::Range(2, 100000));
  ext->add_option("--hist-iters", hist_iters, "orbit points for the density")->capture_default_str();
  ext->add_option("--bins", bins, "density bins")->capture_default_str()->check(CLI::Range(10, 10'000'000));
  add_estimator(ext);
  add_common(ext, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try {
    const EstimatorConfig cfg = make_config(iters, samples, epsilon, seed, restart, common.threads);
    if (*tree) return cmd_tree(tree, common, depth, window);
    if (*ent) return cmd_entropy(ent, common, window, grid, cfg);
    if (*scan) return cmd_scan(scan, common, window, seeds, kmax, seed);
    if (*chain) return cmd_chain(chain, common, levels, s0);
    if (*dens) return cmd_density(dens, common, alpha, hist_iters, bins, seed);
    if (*ext) return cmd_extrapolate(ext, common, alpha, window, fit_window, grid, cfg, hist_iters, bins);
  } catch (const counterexample& e) {
    std::cerr << e.what() << "\n" << e.certificate();
    return exit_counterexample;
  } catch (const error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case errc::verification_failed:
      case errc::empty_cylinder:
      case errc::orbit_hit_zero:
        return exit_verification;
      default:
        return exit_usage;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}
