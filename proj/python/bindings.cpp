#include "irswpcn/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace irswpcn;

namespace {

ExperimentConfig from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Scheme pick_scheme(const ExperimentConfig& config, const std::optional<std::string>& name) {
  if (!name) return config.schemes.front();
  auto s = parse_scheme(*name);
  if (!s) throw py::value_error("unknown scheme '" + *name + "'");
  return *s;
}

py::dict solve_py(const std::string& text, std::optional<std::string> scheme_name, int realization,
                  std::optional<std::uint64_t> seed, std::optional<double> amax_db) {
  ExperimentConfig config = from_text(text);
  if (seed) config.seed = *seed;
  const Scheme scheme = pick_scheme(config, scheme_name);
  RunTask task{0.0, scheme, 0.0, realization};
  if (is_active(scheme)) task.a_max_db = amax_db ? *amax_db : config.amax_db.front();
  const TaskSetup setup = prepare_task(config, task, false);

  Solution sol;
  {
    py::gil_scoped_release release;
    sol = solve_task(setup, scheme);
  }
  const auto& ch = setup.instance.derived;
  py::list uplink;
  for (const auto& v : sol.reflections.uplink) uplink.append(v.coeffs());
  py::dict out;
  out["scheme"] = to_string(scheme);
  out["a_max_db"] = task.a_max_db;
  out["objective"] = sol.objective;
  out["tau0"] = sol.allocation.tau0;
  out["tau"] = sol.allocation.tau;
  out["power"] = sol.allocation.power;
  out["energy_j"] = total_energy_consumption(sol.params, ch, sol.allocation, sol.reflections,
                                           sol.passive ? EnergyMode::kPassive : EnergyMode::kActive);
  out["downlink"] = sol.reflections.downlink.coeffs();
  out["uplink"] = uplink;
  out["trace"] = sol.objective_trace;
  out["feasible"] = sol.feasibility.feasible;
  out["worst_slack"] = sol.feasibility.worst_slack();
  out["iterations"] = sol.iterations;
  out["converged"] = sol.converged;
  out["note"] = sol.note;
  return out;
}

py::dict sweep_py(const std::string& text, std::optional<int> workers, std::optional<std::uint64_t> seed) {
  ExperimentConfig config = from_text(text);
  if (workers) config.workers = *workers;
  if (seed) config.seed = *seed;
  config.validate();
  SweepResult res;
  {
    py::gil_scoped_release release;
    res = run_sweep(config);
  }
  std::ostringstream records, agg;
  write_records_csv(records, config, res.records);
  write_aggregate_csv(agg, config, res.rows);
  py::dict out;
  out["records_csv"] = records.str();
  out["aggregate_csv"] = agg.str();
  out["aborted"] = res.aborted;
  out["summary"] = res.summary;
  return out;
}

py::dict channels_py(const std::string& text, int realization, std::optional<std::uint64_t> seed) {
  ExperimentConfig config = from_text(text);
  if (seed) config.seed = *seed;
  const TaskSetup setup = prepare_task(config, {0.0, Scheme::kUeActive, 0.0, realization}, false);
  const auto& c = setup.instance.channels;
  CMatrix h_r(c.num_elements(), c.num_devices());
  for (int k = 0; k < c.num_devices(); ++k) h_r.col(k) = c.h_r[k];
  py::dict out;
  out["g"] = c.g;
  out["h_r"] = h_r;
  out["h_d"] = c.h_d;
  return out;
}

std::string default_config() {
  std::ostringstream os;
  write_config(os, ExperimentConfig{});
  return os.str();
}

std::string write_outputs_py(const std::string& text, const std::string& dir, std::optional<int> workers) {
  ExperimentConfig config = from_text(text);
  if (workers) config.workers = *workers;
  config.validate();
  SweepResult res;
  {
    py::gil_scoped_release release;
    res = run_sweep(config);
  }
  write_outputs(dir, config, res);
  return res.aborted ? res.summary : "";
}

}  // namespace

PYBIND11_MODULE(_irswpcn, m) {
  m.doc() = "Active-IRS wireless powered network simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);

  m.def("default_config", &default_config, "default configuration as INI text");
  m.def("solve", &solve_py, py::arg("config"), py::arg("scheme") = py::none(), py::arg("realization") = 0,
        py::arg("seed") = py::none(), py::arg("a_max_db") = py::none(),
        "solve one instance of the base configuration");
  m.def("sweep", &sweep_py, py::arg("config"), py::arg("workers") = py::none(), py::arg("seed") = py::none(),
        "run a sweep, return the CSV text");
  m.def("sweep_to_dir", &write_outputs_py, py::arg("config"), py::arg("out"), py::arg("workers") = py::none(),
        "run a sweep and write records.csv, aggregate.csv, timing.csv and manifest.txt; returns the abort "
        "summary or an empty string");
  m.def("channels", &channels_py, py::arg("config"), py::arg("realization") = 0, py::arg("seed") = py::none(),
        "channel realization of the base configuration");
  m.def("content_hash", &content_hash);
  m.def("version", &version);
  m.attr("csv_schema_version") = kCsvSchemaVersion;
}
