#include "fpt/experiment.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fpt/eigen.hpp"
#include "fpt/errors.hpp"

namespace fpt {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::FiltrationSeries: return "filtration-series";
    case Method::FiltrationLaplace: return "filtration-laplace";
    case Method::FiltrationMoving: return "filtration-moving";
    case Method::Eigen: return "eigen";
    case Method::MonteCarlo: return "mc";
  }
  return "?";
}

struct Experiment::Doc {
  json value;
};

namespace {

// Every accepted key appears here; null means "no default".
json defaults() {
  return json::parse(R"({
    "process": {"kind": "free", "D": 1.0, "v": null, "alpha": null, "gamma": 1.0, "k": null, "a": null},
    "boundaries": {"L": null, "v0": 0.0, "vL": 0.0},
    "x0": null,
    "target": "lower",
    "grid": {"t_min": null, "t_max": null, "points": null, "times": null},
    "method": "filtration-series",
    "filtration": {"N": 0, "max_order": 60, "auto_tol": 1e-12, "conv_tol": 1e-9, "dt": 0.0},
    "laplace": {"nodes": 32},
    "eigen": {"M": 30},
    "mc": {"dt": 0.0, "n_traj": 100000, "seed": 1, "bridge": true, "horizon": 0.0, "threads": 0},
    "compare": {"sup_tol": 1e-6, "z_max": 3.0, "min_count": 50},
    "output": null
  })");
}

void merge(json& base, const json& patch, const json& schema, const std::string& where) {
  require_valid(patch.is_object(), (where.empty() ? std::string("config") : where) + " must be an object");
  for (const auto& [key, val] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    require_valid(schema.contains(key), "unknown key '" + path + "'");
    if (schema[key].is_object()) {
      merge(base[key], val, schema[key], path);
    } else {
      base[key] = val;
    }
  }
}

const json& at(const json& doc, const std::string& path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    node = &(*node)[path.substr(start, dot - start)];
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

bool present(const json& doc, const std::string& path) { return !at(doc, path).is_null(); }

double num(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  require_valid(v.is_number(), "'" + path + "' must be a number");
  const double d = v.get<double>();
  require_valid(std::isfinite(d), "'" + path + "' must be finite");
  return d;
}

long integer(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  require_valid(v.is_number_integer() || v.is_number_unsigned(), "'" + path + "' must be an integer");
  return v.get<long>();
}

std::string text(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  require_valid(v.is_string(), "'" + path + "' must be a string");
  return v.get<std::string>();
}

bool flag(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  require_valid(v.is_boolean(), "'" + path + "' must be true or false");
  return v.get<bool>();
}

double positive(const json& doc, const std::string& path) {
  const double v = num(doc, path);
  require_valid(v > 0.0, "'" + path + "' must be positive");
  return v;
}

double required_positive(const json& doc, const std::string& path) {
  require_valid(present(doc, path), "'" + path + "' is required");
  return positive(doc, path);
}

ProcessSpec parse_process(const json& doc) {
  const std::string kind = text(doc, "process.kind");
  const double D = positive(doc, "process.D");
  if (kind == "free") {
    for (const char* k : {"process.v", "process.alpha", "process.k", "process.a"}) {
      require_valid(!present(doc, k), std::string("'") + k + "' does not apply to free diffusion");
    }
    return ProcessSpec::free(D);
  }
  if (kind == "biased") {
    const bool has_v = present(doc, "process.v"), has_alpha = present(doc, "process.alpha");
    require_valid(has_v != has_alpha, "biased diffusion needs exactly one of 'process.v' and 'process.alpha'");
    if (has_v) return ProcessSpec::biased(D, num(doc, "process.v"));
    return ProcessSpec::biased_from_slope(D, num(doc, "process.alpha"), positive(doc, "process.gamma"));
  }
  if (kind == "ou") {
    require_valid(!present(doc, "process.v") && !present(doc, "process.alpha"),
                  "'process.v' and 'process.alpha' do not apply to the OU process");
    require_valid(present(doc, "process.a"), "'process.a' is required for the OU process");
    return ProcessSpec::ornstein_uhlenbeck(D, positive(doc, "process.gamma"), required_positive(doc, "process.k"),
                                           num(doc, "process.a"));
  }
  throw ValidationError("'process.kind' must be free, biased or ou (got '" + kind + "')");
}

std::vector<double> parse_grid(const json& doc) {
  std::vector<double> times;
  const bool explicit_times = present(doc, "grid.times");
  const bool range = present(doc, "grid.t_min") || present(doc, "grid.t_max") || present(doc, "grid.points");
  require_valid(explicit_times != range, "grid needs either 'times' or 't_min', 't_max', 'points'");
  if (explicit_times) {
    const json& arr = at(doc, "grid.times");
    require_valid(arr.is_array(), "'grid.times' must be an array");
    for (const json& v : arr) {
      require_valid(v.is_number(), "'grid.times' entries must be numbers");
      times.push_back(v.get<double>());
    }
  } else {
    const double lo = num(doc, "grid.t_min"), hi = num(doc, "grid.t_max");
    const long n = integer(doc, "grid.points");
    require_valid(n >= 0, "'grid.points' must be non-negative");
    if (n == 1) {
      require_valid(lo == hi, "a one-point grid needs t_min == t_max");
      times.push_back(lo);
    } else if (n > 1) {
      require_valid(hi > lo, "'grid.t_max' must exceed 'grid.t_min'");
      for (long i = 0; i < n; ++i) times.push_back(i == n - 1 ? hi : lo + (hi - lo) * double(i) / double(n - 1));
    }
  }
  require_valid(!times.empty(), "time grid is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_valid(std::isfinite(times[i]) && times[i] > 0.0, "grid times must be positive");
    if (i) require_valid(times[i] > times[i - 1], "grid times must be strictly increasing");
  }
  return times;
}

Method parse_method(const std::string& m) {
  for (Method k : {Method::FiltrationSeries, Method::FiltrationLaplace, Method::FiltrationMoving, Method::Eigen,
                   Method::MonteCarlo}) {
    if (to_string(k) == m) return k;
  }
  throw ValidationError("unknown method '" + m + "'");
}

int bounded_int(const json& doc, const std::string& path, long lo, long hi) {
  const long v = integer(doc, path);
  require_valid(v >= lo && v <= hi,
                "'" + path + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

// Uniform grid -> bin edges around each point.
std::vector<double> bin_edges(const std::vector<double>& centres) {
  require_valid(centres.size() >= 2, "Monte Carlo histograms need at least two grid points");
  const double h = (centres.back() - centres.front()) / double(centres.size() - 1);
  for (std::size_t i = 1; i < centres.size(); ++i) {
    require_valid(std::abs(centres[i] - centres[i - 1] - h) <= 1e-9 * h,
                  "Monte Carlo histograms need a uniform grid (points are bin centres)");
  }
  require_valid(centres.front() - 0.5 * h >= -1e-12 * h, "first bin would start before t = 0");
  std::vector<double> edges;
  for (std::size_t i = 0; i <= centres.size(); ++i) {
    edges.push_back(std::max(0.0, centres.front() + (double(i) - 0.5) * h));
  }
  return edges;
}

void require_static(const ExperimentConfig& cfg) {
  require_valid(cfg.boundaries.is_static(),
                to_string(cfg.method) + " needs static boundaries (set boundaries.v0 = boundaries.vL = 0)");
}

double interpolate(const DensityCurve& c, double t) {
  const auto it = std::lower_bound(c.times.begin(), c.times.end(), t);
  if (it == c.times.end()) return c.values.back();
  const std::size_t j = static_cast<std::size_t>(it - c.times.begin());
  if (j == 0) return c.values.front();
  const double w = (t - c.times[j - 1]) / (c.times[j] - c.times[j - 1]);
  return c.values[j - 1] * (1.0 - w) + c.values[j] * w;
}

DensityCurve density_on(const ExperimentConfig& cfg, const std::vector<double>& times) {
  const double L = cfg.boundaries.L;
  switch (cfg.method) {
    case Method::FiltrationSeries:
      require_static(cfg);
      return ftwo_series_curve(cfg.process, cfg.x0, L, cfg.target, times, cfg.filtration);
    case Method::FiltrationLaplace:
      require_static(cfg);
      return ftwo_laplace_curve(cfg.process, cfg.x0, L, cfg.target, times,
                                cfg.filtration.N == 0 ? 2 : cfg.filtration.N, cfg.filtration.talbot_nodes);
    case Method::Eigen:
      require_static(cfg);
      return ee_curve(cfg.process, cfg.x0, L, cfg.target, times, cfg.eigen_modes);
    case Method::FiltrationMoving: {
      const MovingResult r = ftwo_moving(cfg.process, cfg.x0, cfg.boundaries, times.back(), cfg.moving);
      const DensityCurve& fine = cfg.target == Target::Lower ? r.lower : r.upper;
      DensityCurve out;
      out.method = fine.method;
      out.trunc_order = fine.trunc_order;
      out.warnings = fine.warnings;
      out.times = times;
      for (double t : times) out.values.push_back(interpolate(fine, t));
      out.errors.assign(times.size(), 0.0);
      out.scan_negatives();
      return out;
    }
    case Method::MonteCarlo:
      break;
  }
  throw ValidationError("Monte Carlo runs produce histograms; use the mc method through run_mc");
}

Histogram mc_histogram(const ExperimentConfig& cfg, McSummary* summary) {
  const std::vector<double> edges = bin_edges(cfg.times);
  McResult r = simulate(cfg.process, cfg.boundaries, cfg.x0, cfg.mc);
  if (summary) {
    summary->n_traj = r.n_traj;
    summary->censored = r.censored;
    summary->dt = r.dt;
    summary->horizon = r.horizon;
    summary->fraction_lower = r.fraction(Target::Lower);
    summary->sigma_lower = r.fraction_sigma(Target::Lower);
    summary->fraction_upper = r.fraction(Target::Upper);
    summary->sigma_upper = r.fraction_sigma(Target::Upper);
  }
  if (r.count(cfg.target) == 0) {
    // histogram() refuses an empty sample; an all-zero table is still meaningful here.
    r.samples.push_back({edges.back() + 1.0, cfg.target});
  }
  Histogram h = histogram(r, static_cast<int>(cfg.times.size()), cfg.target, edges.front(), edges.back());
  h.density.times = cfg.times;
  return h;
}

}  // namespace

Experiment::Experiment() : doc_(std::make_shared<Doc>(Doc{defaults()})) {}

Experiment Experiment::from_json(const std::string& text) {
  json patch;
  try {
    patch = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  Experiment ex;
  merge(ex.doc_->value, patch, defaults(), "");
  return ex;
}

Experiment Experiment::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

void Experiment::set(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  require_valid(eq != std::string::npos && eq > 0, "override must look like path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  // Build the nested patch for the dotted path and merge it like a file.
  json patch = value;
  std::string rest = path;
  while (true) {
    const std::size_t dot = rest.rfind('.');
    const std::string key = dot == std::string::npos ? rest : rest.substr(dot + 1);
    require_valid(!key.empty(), "bad override path '" + path + "'");
    patch = json{{key, patch}};
    if (dot == std::string::npos) break;
    rest = rest.substr(0, dot);
  }
  auto copy = std::make_shared<Doc>(*doc_);
  merge(copy->value, patch, defaults(), "");
  doc_ = std::move(copy);
}

std::optional<std::string> Experiment::output() const {
  const json& v = doc_->value["output"];
  if (!v.is_string()) return std::nullopt;
  return v.get<std::string>();
}

std::string Experiment::dump() const { return doc_->value.dump(2); }

ExperimentConfig Experiment::config() const {
  const json& d = doc_->value;
  ExperimentConfig c;
  c.process = parse_process(d);
  c.boundaries = MovingBoundaries{required_positive(d, "boundaries.L"), num(d, "boundaries.v0"),
                                  num(d, "boundaries.vL")};
  require_valid(present(d, "x0"), "'x0' is required");
  c.x0 = num(d, "x0");
  require_valid(c.x0 > 0.0 && c.x0 < c.boundaries.L, "'x0' must lie strictly inside (0, L)");
  const std::string target = text(d, "target");
  require_valid(target == "lower" || target == "upper", "'target' must be lower or upper");
  c.target = target == "lower" ? Target::Lower : Target::Upper;
  c.times = parse_grid(d);
  c.method = parse_method(text(d, "method"));

  c.filtration.N = bounded_int(d, "filtration.N", 0, 1000);
  c.filtration.max_order = bounded_int(d, "filtration.max_order", 1, 1000);
  c.filtration.auto_tol = positive(d, "filtration.auto_tol");
  c.filtration.talbot_nodes = bounded_int(d, "laplace.nodes", 4, 4096);
  c.moving.N = c.filtration.N;
  c.moving.max_order = c.filtration.max_order;
  c.moving.conv_tol = positive(d, "filtration.conv_tol");
  c.moving.dt = num(d, "filtration.dt");
  require_valid(c.moving.dt >= 0.0, "'filtration.dt' must be non-negative");
  c.eigen_modes = bounded_int(d, "eigen.M", 1, 100000);

  c.mc.dt = num(d, "mc.dt");
  require_valid(c.mc.dt >= 0.0, "'mc.dt' must be non-negative");
  c.mc.n_traj = integer(d, "mc.n_traj");
  require_valid(c.mc.n_traj >= 1, "'mc.n_traj' must be at least 1");
  const long seed = integer(d, "mc.seed");
  c.mc.seed = static_cast<std::uint64_t>(seed);
  c.mc.bridge_correction = flag(d, "mc.bridge");
  c.mc.horizon = num(d, "mc.horizon");
  require_valid(c.mc.horizon >= 0.0, "'mc.horizon' must be non-negative");
  c.mc.threads = static_cast<unsigned>(bounded_int(d, "mc.threads", 0, 4096));

  c.sup_tol = positive(d, "compare.sup_tol");
  c.z_max = positive(d, "compare.z_max");
  c.min_count = integer(d, "compare.min_count");
  require_valid(c.min_count >= 0, "'compare.min_count' must be non-negative");
  if (present(d, "output")) c.output = text(d, "output");

  if (c.method == Method::FiltrationMoving) {
    require_valid(c.process.kind() == ProcessKind::Free, "filtration-moving supports free diffusion only");
    c.boundaries.validate_horizon(c.times.back());
  } else if (c.method != Method::MonteCarlo) {
    require_static(c);
  }
  if (c.method == Method::FiltrationLaplace) {
    require_valid(c.filtration.N == 0 || c.filtration.N % 2 == 0, "filtration-laplace needs an even N");
  }
  return c;
}

DensityCurve run_density(const ExperimentConfig& cfg) {
  if (cfg.method == Method::MonteCarlo) return mc_histogram(cfg, nullptr).density;
  return density_on(cfg, cfg.times);
}

Table run_terms(const ExperimentConfig& cfg) {
  require_valid(cfg.method == Method::FiltrationSeries || cfg.method == Method::FiltrationLaplace,
                "terms needs a filtration-series or filtration-laplace method");
  require_static(cfg);
  int N = cfg.filtration.N;
  std::vector<std::string> warnings;
  if (N == 0) {
    const DensityCurve c = ftwo_series_curve(cfg.process, cfg.x0, cfg.boundaries.L, cfg.target, cfg.times,
                                             cfg.filtration);
    N = c.trunc_order;
    warnings = c.warnings;
  }
  const FiltrationTerms ft = filtration_terms(cfg.process, cfg.x0, cfg.boundaries.L, cfg.target, cfg.times, N,
                                              cfg.filtration.talbot_nodes);
  // Inverted terms have an absolute noise floor near eps * sup f^(0); below it
  // (or below the error estimate) a value carries no sign.
  double floor = 0.0;
  if (cfg.process.kind() == ProcessKind::OU) {
    for (double v : ft.terms[0]) floor = std::max(floor, 1e-14 * std::abs(v));
  }
  Table t;
  t.add("t", cfg.times);
  for (int n = 0; n < N; ++n) {
    std::vector<double> col = ft.terms[n];
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) <= std::max(floor, ft.errors[n][i])) col[i] = 0.0;
      if (n % 2) col[i] = -col[i];
    }
    t.add("f" + std::to_string(n), std::move(col));
  }
  t.warnings = warnings;
  return t;
}

Table run_mc(const ExperimentConfig& cfg, McSummary* summary) {
  const Histogram h = mc_histogram(cfg, summary);
  Table t;
  t.add("t", h.density.times);
  t.add("value", h.density.values);
  t.add("error", h.density.errors);
  std::vector<double> counts(h.counts.begin(), h.counts.end());
  t.add("count", std::move(counts));
  return t;
}

Table run_spectrum(const ExperimentConfig& cfg) {
  require_valid(cfg.process.kind() == ProcessKind::OU, "spectrum is computed for the OU process");
  require_static(cfg);
  const OuSpectrum spec = ou_spectrum(cfg.process, cfg.boundaries.L, cfg.eigen_modes);
  std::vector<double> n, s, rate, A, norm, res, nodes;
  for (const SpectrumEntry& e : spec.modes) {
    n.push_back(e.n);
    s.push_back(e.s);
    rate.push_back(e.s / cfg.process.relaxation_time());
    A.push_back(e.A);
    norm.push_back(e.norm);
    res.push_back(e.residual);
    nodes.push_back(e.nodes);
  }
  Table t;
  t.add("n", n);
  t.add("s", s);
  t.add("rate", rate);
  t.add("A", A);
  t.add("norm", norm);
  t.add("residual", res);
  t.add("nodes", nodes);
  return t;
}

namespace {

// Mean of the deterministic density over each bin, 4-point Gauss-Legendre.
std::vector<double> bin_means(const ExperimentConfig& cfg, const std::vector<double>& edges) {
  using G = boost::math::quadrature::gauss<double, 4>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  std::vector<double> nodes, weights;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double mid = 0.5 * (edges[k] + edges[k + 1]), half = 0.5 * (edges[k + 1] - edges[k]);
    for (std::size_t j = x.size(); j-- > 0;) {
      nodes.push_back(mid - half * x[j]);
      weights.push_back(0.5 * w[j]);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      nodes.push_back(mid + half * x[j]);
      weights.push_back(0.5 * w[j]);
    }
  }
  const DensityCurve c = density_on(cfg, nodes);
  const std::size_t per = 2 * x.size();
  std::vector<double> means(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) means[i / per] += weights[i] * c.values[i];
  return means;
}

void check_same_grid(const ExperimentConfig& a, const ExperimentConfig& b) {
  bool same = a.times.size() == b.times.size();
  for (std::size_t i = 0; same && i < a.times.size(); ++i) {
    same = std::abs(a.times[i] - b.times[i]) <= 1e-12 * std::max(1.0, std::abs(a.times[i]));
  }
  require_valid(same, "compare: the two experiments use different time grids");
  require_valid(a.target == b.target, "compare: the two experiments target different boundaries");
}

}  // namespace

Table compare(const ExperimentConfig& a, const ExperimentConfig& b, CompareReport& report) {
  check_same_grid(a, b);
  const bool mc_a = a.method == Method::MonteCarlo, mc_b = b.method == Method::MonteCarlo;
  require_valid(!(mc_a && mc_b), "compare: at most one side may be Monte Carlo");
  report = CompareReport{};
  report.has_mc = mc_a || mc_b;
  const std::vector<double>& times = a.times;
  std::vector<double> va, vb, z;
  std::ostringstream msg;
  msg << "compare " << to_string(a.method) << " vs " << to_string(b.method) << " at " << to_string(a.target)
      << " boundary, " << times.size() << " points\n";

  if (report.has_mc) {
    const ExperimentConfig& mc_cfg = mc_a ? a : b;
    const ExperimentConfig& det_cfg = mc_a ? b : a;
    McSummary summary;
    const Histogram h = mc_histogram(mc_cfg, &summary);
    const std::vector<double> means = bin_means(det_cfg, h.edges);
    const double n = double(h.n_traj);
    for (std::size_t k = 0; k < means.size(); ++k) {
      const double width = h.edges[k + 1] - h.edges[k];
      const double p = means[k] * width;
      const double mc = h.density.values[k];
      const double d = means[k] - mc;
      report.sup = std::max(report.sup, std::abs(d));
      report.l1 += std::abs(d) * width;
      if (h.counts[k] >= a.min_count) {
        const double sigma = p > 0.0 && p < 1.0 ? std::sqrt(n * p * (1.0 - p)) : std::sqrt(double(h.counts[k]));
        const double zk = (double(h.counts[k]) - n * p) / sigma;
        z.push_back(zk);
        report.max_abs_z = std::max(report.max_abs_z, std::abs(zk));
        ++report.z_points;
      } else {
        z.push_back(std::nan(""));
      }
    }
    (mc_a ? va : vb) = h.density.values;
    (mc_a ? vb : va) = means;
    report.breached = report.max_abs_z > a.z_max;
    msg << "mc: " << summary.n_traj << " trajectories, " << summary.censored << " censored, fraction lower "
        << summary.fraction_lower << " +- " << summary.sigma_lower << ", upper " << summary.fraction_upper << " +- "
        << summary.sigma_upper << "\n";
    msg << "bins with >= " << a.min_count << " counts: " << report.z_points << ", max |z| " << report.max_abs_z
        << " (limit " << a.z_max << ")\n";
  } else {
    va = density_on(a, times).values;
    vb = density_on(b, times).values;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double d = std::abs(va[i] - vb[i]);
      report.sup = std::max(report.sup, d);
      if (i) report.l1 += 0.5 * (d + std::abs(va[i - 1] - vb[i - 1])) * (times[i] - times[i - 1]);
    }
    report.breached = !(report.sup <= a.sup_tol);
    msg << "sup-norm limit " << a.sup_tol << "\n";
  }
  msg << "sup-norm " << report.sup << ", L1 " << report.l1 << "\n"
      << (report.breached ? "FAIL: tolerance breached" : "ok") << "\n";
  report.text = msg.str();

  Table t;
  t.add("t", times);
  t.add("a", va);
  t.add("b", vb);
  std::vector<double> diff(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) diff[i] = va[i] - vb[i];
  t.add("diff", std::move(diff));
  if (report.has_mc) t.add("z", std::move(z));
  return t;
}

}  // namespace fpt
