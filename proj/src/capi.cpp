/*
Copyright 2026 The gapdyn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "gapdyn.h"

#include <cmath>
#include <fstream>
#include <new>
#include <string>

#include "gapdyn/diagnostics.hpp"
#include "gapdyn/error.hpp"
#include "gapdyn/integrators.hpp"
#include "gapdyn/scenario.hpp"
#include "gapdyn/validate.hpp"

struct gd_model {
  gapdyn::HamiltonianModel value;
};
struct gd_law {
  gapdyn::DissipationLaw value;
  std::size_t dim;
};
struct gd_function {
  gapdyn::ConvexFunction value;
};
struct gd_trajectory {
  gapdyn::Trajectory value;
};

namespace {

thread_local std::string last_error;

gd_status status_of(gapdyn::ErrorKind k) {
  using gapdyn::ErrorKind;
  switch (k) {
    case ErrorKind::Usage:
      return GD_ERR_USAGE;
    case ErrorKind::Config:
      return GD_ERR_CONFIG;
    case ErrorKind::Model:
      return GD_ERR_MODEL;
    case ErrorKind::Step:
      return GD_ERR_STEP;
    case ErrorKind::Unsupported:
      return GD_ERR_UNSUPPORTED;
    case ErrorKind::Io:
      return GD_ERR_IO;
  }
  return GD_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes and the thread's message.
template <class F>
gd_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return GD_OK;
  } catch (const gapdyn::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return GD_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) gapdyn::fail(gapdyn::ErrorKind::Usage, std::string(what) + " is NULL");
}

gapdyn::PhaseVector phase(const double* z, std::size_t n) {
  need(z, "phase vector");
  return gapdyn::PhaseVector::unflatten(std::span<const double>(z, 2 * n));
}

void put(const gapdyn::PhaseVector& z, double* out) {
  const gapdyn::Vector f = z.flatten();
  std::copy(f.begin(), f.end(), out);
}

double plain(const gapdyn::ExtendedReal& v) { return v.is_finite() ? v.value() : HUGE_VAL; }

const gapdyn::Trajectory& traj(const gd_trajectory* tr, std::size_t k, bool per_step) {
  need(tr, "trajectory");
  const std::size_t limit = per_step ? tr->value.steps() : tr->value.states.size();
  if (k >= limit)
    gapdyn::fail(gapdyn::ErrorKind::Usage, "index " + std::to_string(k) + " out of range (" + std::to_string(limit) + ")");
  return tr->value;
}

}  // namespace

extern "C" {

const char* gd_version(void) { return GAPDYN_VERSION_STRING; }

const char* gd_last_error(void) { return last_error.c_str(); }

const char* gd_status_name(gd_status status) {
  switch (status) {
    case GD_OK:
      return "ok";
    case GD_ERR_USAGE:
      return "usage error";
    case GD_ERR_CONFIG:
      return "configuration error";
    case GD_ERR_MODEL:
      return "model error";
    case GD_ERR_STEP:
      return "step failure";
    case GD_ERR_UNSUPPORTED:
      return "unsupported";
    case GD_ERR_IO:
      return "i/o error";
    case GD_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

gd_status gd_model_from_json(const char* json, gd_model** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new gd_model{gapdyn::parse_model(json)};
  });
}

void gd_model_free(gd_model* model) { delete model; }

gd_status gd_model_dim(const gd_model* model, size_t* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = model->value.dim();
  });
}

gd_status gd_model_energy(const gd_model* model, const double* z, size_t n, double t, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = model->value.energy(phase(z, n), t);
  });
}

gd_status gd_model_flow(const gd_model* model, const double* z, size_t n, double t, double* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    put(model->value.flow_field(phase(z, n), t), out);
  });
}

gd_status gd_law_from_json(const char* json, const gd_model* model, gd_law** out) {
  return guarded([&] {
    need(json, "json");
    need(model, "model");
    need(out, "out");
    gapdyn::DissipationLaw law = gapdyn::parse_law(json, model->value);
    gapdyn::check_compatible(model->value, law);
    *out = new gd_law{std::move(law), model->value.dim()};
  });
}

void gd_law_free(gd_law* law) { delete law; }

gd_status gd_information_content(const gd_law* law, const double* z, const double* z_dot, const double* eta,
                                 size_t n, double* out) {
  return guarded([&] {
    need(law, "law");
    need(out, "out");
    *out = plain(gapdyn::information_content(law->value, phase(z, n), phase(z_dot, n), phase(eta, n)));
  });
}

gd_status gd_function_from_json(const char* spec, gd_function** out) {
  return guarded([&] {
    need(spec, "spec");
    need(out, "out");
    *out = new gd_function{gapdyn::parse_convex(spec)};
  });
}

void gd_function_free(gd_function* f) { delete f; }

gd_status gd_function_dim(const gd_function* f, size_t* out) {
  return guarded([&] {
    need(f, "function");
    need(out, "out");
    *out = f->value.dim();
  });
}

gd_status gd_function_eval(const gd_function* f, const double* x, size_t n, double* out) {
  return guarded([&] {
    need(f, "function");
    need(x, "x");
    need(out, "out");
    *out = plain(gapdyn::eval(f->value, std::span<const double>(x, n)));
  });
}

gd_status gd_function_polar(const gd_function* f, gd_function** out) {
  return guarded([&] {
    need(f, "function");
    need(out, "out");
    *out = new gd_function{gapdyn::polar(f->value)};
  });
}

gd_status gd_function_prox(const gd_function* f, const double* x, size_t n, double lambda, double* out) {
  return guarded([&] {
    need(f, "function");
    need(x, "x");
    need(out, "out");
    const gapdyn::Vector r = gapdyn::prox(f->value, std::span<const double>(x, n), lambda);
    std::copy(r.begin(), r.end(), out);
  });
}

gd_status gd_conjugate_table(const gd_function* f, double lo, double hi, size_t samples, const char* out_path,
                             double* max_abs_diff) {
  return guarded([&] {
    need(f, "function");
    need(out_path, "out_path");
    const double d = gapdyn::write_conjugate_table(f->value, lo, hi, samples, out_path);
    if (max_abs_diff) *max_abs_diff = d;
  });
}

gd_status gd_integrate(const gd_model* model, const gd_law* law, const double* z0, size_t n, double t0, double t_end,
                       double dt, double step_tol, double restitution, gd_trajectory** out) {
  return guarded([&] {
    need(model, "model");
    need(law, "law");
    need(out, "out");
    gapdyn::StepOptions opt;
    opt.step_tol = step_tol;
    opt.restitution = restitution;
    *out = new gd_trajectory{gapdyn::integrate(model->value, law->value, phase(z0, n), t0, t_end, dt, opt)};
  });
}

void gd_trajectory_free(gd_trajectory* tr) { delete tr; }

gd_status gd_trajectory_steps(const gd_trajectory* tr, size_t* out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(out, "out");
    *out = tr->value.steps();
  });
}

gd_status gd_trajectory_complete(const gd_trajectory* tr, int* out) {
  return guarded([&] {
    need(tr, "trajectory");
    need(out, "out");
    *out = tr->value.complete ? 1 : 0;
  });
}

gd_status gd_trajectory_time(const gd_trajectory* tr, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = traj(tr, k, false).times[k];
  });
}

gd_status gd_trajectory_state(const gd_trajectory* tr, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    put(traj(tr, k, false).states[k], out);
  });
}

gd_status gd_trajectory_energy(const gd_trajectory* tr, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = traj(tr, k, false).energies[k];
  });
}

gd_status gd_trajectory_eta(const gd_trajectory* tr, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    put(traj(tr, k, true).etas[k], out);
  });
}

gd_status gd_trajectory_residual(const gd_trajectory* tr, size_t k, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = plain(traj(tr, k, true).residuals[k]);
  });
}

gd_status gd_run_scenario(const char* config_path, const char* out_dir, int64_t seed_override, int* exit_code,
                          gd_line_sink sink, void* user) {
  return guarded([&] {
    need(config_path, "config_path");
    need(exit_code, "exit_code");
    gapdyn::Scenario sc = gapdyn::load_scenario(config_path);
    if (seed_override >= 0) {
      sc.seed = static_cast<std::uint64_t>(seed_override);
      sc.audit.seed = sc.seed;
    }
    std::string dir = out_dir ? out_dir : sc.output_dir;
    if (dir.empty()) gapdyn::fail(gapdyn::ErrorKind::Config, "no output directory given and none in the scenario");
    const gapdyn::RunOutcome r = gapdyn::run_scenario(sc, dir);
    *exit_code = r.exit_code;
    if (sink) {
      sink(r.summary.c_str(), user);
      for (std::size_t i = 0; i < r.report.violations.size() && i < 10; ++i) {
        const auto& v = r.report.violations[i];
        const std::string line = "  violation: " + v.invariant + " at step " + std::to_string(v.step) +
                                 ", magnitude " + gapdyn::format_number(v.magnitude);
        sink(line.c_str(), user);
      }
    }
  });
}

gd_status gd_validate(uint64_t seed, const char* mutation, const char* json_path, gd_line_sink sink, void* user,
                      int* passed, size_t* suite_count) {
  return guarded([&] {
    gapdyn::ValidationOptions opt;
    opt.seed = seed;
    opt.mutation = gapdyn::parse_mutation(mutation ? mutation : "none");
    if (sink) opt.sink = [&](const std::string& line) { sink(line.c_str(), user); };
    const gapdyn::ValidationReport report = gapdyn::run_validation(opt);
    if (json_path) {
      std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
      if (!out) gapdyn::fail(gapdyn::ErrorKind::Io, std::string("cannot write ") + json_path);
      out << report.to_json() << '\n';
    }
    if (passed) *passed = report.passed() ? 1 : 0;
    if (suite_count) *suite_count = report.suites.size();
  });
}

}  // extern "C"
