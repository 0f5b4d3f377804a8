#include "fpt/fpt.h"

#include <exception>
#include <string>

#include "fpt/errors.hpp"
#include "fpt/experiment.hpp"

struct fpt_experiment {
  fpt::Experiment ex;
  std::string output;
};

struct fpt_table {
  fpt::Table table;
  std::string report;
  std::string csv;
};

namespace {

thread_local std::string last_error;

template <class F>
fpt_status guard(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const fpt::ValidationError& e) {
    last_error = e.what();
    return FPT_ERR_VALIDATION;
  } catch (const fpt::DomainError& e) {
    last_error = e.what();
    return FPT_ERR_VALIDATION;
  } catch (const fpt::NumericError& e) {
    last_error = e.what();
    return FPT_ERR_NUMERIC;
  } catch (const fpt::IoError& e) {
    last_error = e.what();
    return FPT_ERR_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FPT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return FPT_ERR_INTERNAL;
  }
}

fpt_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return FPT_ERR_VALIDATION;
}

fpt_status emit(fpt::Table t, fpt_table** out) {
  *out = new fpt_table{std::move(t), {}, {}};
  return FPT_OK;
}

}  // namespace

extern "C" {

const char* fpt_version(void) { return "1.0.0"; }

const char* fpt_last_error(void) { return last_error.c_str(); }

fpt_status fpt_experiment_new(fpt_experiment** out) {
  if (!out) return null_argument("out");
  return guard([&] {
    *out = new fpt_experiment{fpt::Experiment{}, {}};
    return FPT_OK;
  });
}

fpt_status fpt_experiment_from_json(const char* json, fpt_experiment** out) {
  if (!json || !out) return null_argument("json/out");
  return guard([&] {
    *out = new fpt_experiment{fpt::Experiment::from_json(json), {}};
    return FPT_OK;
  });
}

fpt_status fpt_experiment_load(const char* path, fpt_experiment** out) {
  if (!path || !out) return null_argument("path/out");
  return guard([&] {
    *out = new fpt_experiment{fpt::Experiment::load(path), {}};
    return FPT_OK;
  });
}

fpt_status fpt_experiment_set(fpt_experiment* ex, const char* assignment) {
  if (!ex || !assignment) return null_argument("experiment/assignment");
  return guard([&] {
    ex->ex.set(assignment);
    return FPT_OK;
  });
}

fpt_status fpt_experiment_validate(const fpt_experiment* ex) {
  if (!ex) return null_argument("experiment");
  return guard([&] {
    ex->ex.config();
    return FPT_OK;
  });
}

const char* fpt_experiment_output(const fpt_experiment* ex) {
  if (!ex) return nullptr;
  const auto path = ex->ex.output();
  if (!path) return nullptr;
  auto* mut = const_cast<fpt_experiment*>(ex);
  mut->output = *path;
  return mut->output.c_str();
}

void fpt_experiment_free(fpt_experiment* ex) { delete ex; }

fpt_status fpt_run_density(const fpt_experiment* ex, fpt_table** out) {
  if (!ex || !out) return null_argument("experiment/out");
  return guard([&] { return emit(fpt::density_table(fpt::run_density(ex->ex.config())), out); });
}

fpt_status fpt_run_terms(const fpt_experiment* ex, fpt_table** out) {
  if (!ex || !out) return null_argument("experiment/out");
  return guard([&] { return emit(fpt::run_terms(ex->ex.config()), out); });
}

fpt_status fpt_run_mc(const fpt_experiment* ex, fpt_table** out, fpt_mc_summary* summary) {
  if (!ex || !out) return null_argument("experiment/out");
  return guard([&] {
    fpt::McSummary s;
    fpt::Table t = fpt::run_mc(ex->ex.config(), &s);
    if (summary) {
      *summary = fpt_mc_summary{s.n_traj,         s.censored,       s.dt,           s.horizon,
                                s.fraction_lower, s.sigma_lower,    s.fraction_upper, s.sigma_upper};
    }
    return emit(std::move(t), out);
  });
}

fpt_status fpt_run_spectrum(const fpt_experiment* ex, fpt_table** out) {
  if (!ex || !out) return null_argument("experiment/out");
  return guard([&] { return emit(fpt::run_spectrum(ex->ex.config()), out); });
}

fpt_status fpt_compare(const fpt_experiment* a, const fpt_experiment* b, fpt_table** out,
                       fpt_compare_report* report) {
  if (!a || !b || !out) return null_argument("experiment/out");
  return guard([&] {
    const fpt::ExperimentConfig ca = a->ex.config();
    const fpt::ExperimentConfig cb = b->ex.config();
    fpt::CompareReport r;
    fpt::Table t = fpt::compare(ca, cb, r);
    if (report) {
      *report = fpt_compare_report{r.sup, r.l1, r.max_abs_z, r.z_points, r.has_mc ? 1 : 0, r.breached ? 1 : 0};
    }
    *out = new fpt_table{std::move(t), r.text, {}};
    if (r.breached) {
      last_error = "compare: tolerance breached";
      return FPT_ERR_TOLERANCE;
    }
    return FPT_OK;
  });
}

const char* fpt_table_report(const fpt_table* t) { return t ? t->report.c_str() : ""; }

fpt_status fpt_splitting_probability(const fpt_experiment* ex, double* out) {
  if (!ex || !out) return null_argument("experiment/out");
  return guard([&] {
    const fpt::ExperimentConfig c = ex->ex.config();
    fpt::require_valid(c.boundaries.is_static(), "splitting probability needs static boundaries");
    *out = fpt::splitting_probability(c.process, c.x0, c.boundaries.L, c.target);
    return FPT_OK;
  });
}

size_t fpt_table_rows(const fpt_table* t) { return t ? t->table.rows() : 0; }

size_t fpt_table_columns(const fpt_table* t) { return t ? t->table.columns() : 0; }

const char* fpt_table_column_name(const fpt_table* t, size_t col) {
  if (!t || col >= t->table.columns()) return nullptr;
  return t->table.name(col).c_str();
}

fpt_status fpt_table_value(const fpt_table* t, size_t row, size_t col, double* out) {
  if (!t || !out) return null_argument("table/out");
  return guard([&] {
    fpt::require_valid(col < t->table.columns() && row < t->table.rows(), "table index out of range");
    const auto* v = std::get_if<std::vector<double>>(&t->table.column(col));
    fpt::require_valid(v != nullptr, "column '" + t->table.name(col) + "' is not numeric");
    *out = (*v)[row];
    return FPT_OK;
  });
}

size_t fpt_table_warning_count(const fpt_table* t) { return t ? t->table.warnings.size() : 0; }

const char* fpt_table_warning(const fpt_table* t, size_t i) {
  if (!t || i >= t->table.warnings.size()) return nullptr;
  return t->table.warnings[i].c_str();
}

fpt_status fpt_table_write_csv(const fpt_table* t, const char* path) {
  if (!t || !path) return null_argument("table/path");
  return guard([&] {
    t->table.write_csv(path);
    return FPT_OK;
  });
}

const char* fpt_table_csv(fpt_table* t) {
  if (!t) return nullptr;
  t->csv = t->table.to_csv();
  return t->csv.c_str();
}

void fpt_table_free(fpt_table* t) { delete t; }

}  // extern "C"
