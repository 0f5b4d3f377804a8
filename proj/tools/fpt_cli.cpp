// fpt: first-passage densities between two absorbing boundaries.
#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "fpt/fpt.h"

namespace {

struct Options {
  std::string config;
  std::string config_b;
  std::vector<std::string> sets;
  std::vector<std::string> sets_a;
  std::vector<std::string> sets_b;
  std::string output;
};

int fail(fpt_status st) {
  std::fprintf(stderr, "fpt: %s\n", fpt_last_error());
  return static_cast<int>(st);
}

// Config file, then --set overrides, then -o.
fpt_status open_experiment(const std::string& path, const std::vector<std::string>& sets,
                           const std::vector<std::string>& extra, const std::string& output,
                           fpt_experiment** ex) {
  fpt_status st = fpt_experiment_load(path.c_str(), ex);
  if (st != FPT_OK) return st;
  for (const auto* list : {&sets, &extra}) {
    for (const std::string& s : *list) {
      if ((st = fpt_experiment_set(*ex, s.c_str())) != FPT_OK) return st;
    }
  }
  if (!output.empty()) {
    const std::string assignment = "output=\"" + output + "\"";
    if ((st = fpt_experiment_set(*ex, assignment.c_str())) != FPT_OK) return st;
  }
  return fpt_experiment_validate(*ex);
}

int finish(fpt_table* t, const fpt_experiment* ex) {
  for (size_t i = 0; i < fpt_table_warning_count(t); ++i) {
    std::fprintf(stderr, "warning: %s\n", fpt_table_warning(t, i));
  }
  const char* out = fpt_experiment_output(ex);
  fpt_status st = FPT_OK;
  if (out) {
    st = fpt_table_write_csv(t, out);
  } else {
    std::fputs(fpt_table_csv(t), stdout);
  }
  fpt_table_free(t);
  return st == FPT_OK ? 0 : fail(st);
}

int run_single(const Options& o, const std::string& cmd) {
  fpt_experiment* ex = nullptr;
  fpt_status st = open_experiment(o.config, o.sets, {}, o.output, &ex);
  if (st != FPT_OK) {
    fpt_experiment_free(ex);
    return fail(st);
  }
  fpt_table* t = nullptr;
  fpt_mc_summary summary{};
  if (cmd == "density") {
    st = fpt_run_density(ex, &t);
  } else if (cmd == "terms") {
    st = fpt_run_terms(ex, &t);
  } else if (cmd == "mc") {
    st = fpt_run_mc(ex, &t, &summary);
  } else {
    st = fpt_run_spectrum(ex, &t);
  }
  if (st != FPT_OK) {
    fpt_experiment_free(ex);
    return fail(st);
  }
  if (cmd == "mc") {
    std::fprintf(stderr,
                 "trajectories %ld, censored %ld, dt %.6g, horizon %.6g\n"
                 "lower %.6f +- %.6f, upper %.6f +- %.6f\n",
                 summary.n_traj, summary.censored, summary.dt, summary.horizon, summary.fraction_lower,
                 summary.sigma_lower, summary.fraction_upper, summary.sigma_upper);
  }
  const int rc = finish(t, ex);
  fpt_experiment_free(ex);
  return rc;
}

int run_compare(const Options& o) {
  fpt_experiment* a = nullptr;
  fpt_experiment* b = nullptr;
  fpt_status st = open_experiment(o.config, o.sets, o.sets_a, o.output, &a);
  if (st == FPT_OK) st = open_experiment(o.config_b, o.sets, o.sets_b, "", &b);
  if (st != FPT_OK) {
    fpt_experiment_free(a);
    fpt_experiment_free(b);
    return fail(st);
  }
  fpt_table* t = nullptr;
  fpt_compare_report r{};
  st = fpt_compare(a, b, &t, &r);
  int rc = 0;
  if (t) {
    std::fputs(fpt_table_report(t), stderr);
    rc = finish(t, a);
  }
  fpt_experiment_free(a);
  fpt_experiment_free(b);
  if (st != FPT_OK) return st == FPT_ERR_TOLERANCE ? 3 : fail(st);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage densities between two absorbing boundaries"};
  app.set_version_flag("--version", std::string(fpt_version()));
  app.require_subcommand(1);
  Options o;

  const char* help_set = "Override a config entry, e.g. filtration.N=5 (repeatable)";
  for (const char* name : {"density", "terms", "mc", "spectrum"}) {
    CLI::App* sub = app.add_subcommand(name, std::string(name) == "density"    ? "Write the FPT density as CSV"
                                             : std::string(name) == "terms"    ? "Write signed filtration terms"
                                             : std::string(name) == "mc"       ? "Monte Carlo histogram"
                                                                               : "OU eigenmodes table");
    sub->add_option("config", o.config, "Experiment JSON")->required();
    sub->add_option("--set", o.sets, help_set);
    sub->add_option("-o,--output", o.output, "CSV path (default: config output, else stdout)");
  }
  CLI::App* cmp = app.add_subcommand("compare", "Compare two experiments on a shared grid");
  cmp->add_option("a", o.config, "First experiment (tolerances)")->required();
  cmp->add_option("b", o.config_b, "Second experiment")->required();
  cmp->add_option("--set", o.sets, "Override applied to both sides");
  cmp->add_option("--set-a", o.sets_a, "Override for the first side");
  cmp->add_option("--set-b", o.sets_b, "Override for the second side");
  cmp->add_option("-o,--output", o.output, "CSV path for the point-wise comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "compare") return run_compare(o);
  return run_single(o, cmd);
}
