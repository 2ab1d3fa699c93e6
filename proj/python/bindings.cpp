#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmsched/generator.hpp"
#include "pmsched/harness.hpp"
#include "pmsched/io.hpp"
#include "pmsched/lta.hpp"
#include "pmsched/sa.hpp"

namespace py = pybind11;
using namespace pmsched;

namespace {

RuleParams make_rule(const std::string& rule, double k1, double k2, double k3, const std::string& policy) {
  RuleParams p;
  auto r = parse_rule(rule);
  if (!r) throw std::invalid_argument("unknown rule '" + rule + "'");
  p.rule = *r;
  p.k1 = k1;
  p.k2 = k2;
  p.k3 = k3;
  if (policy == "auto") {
    p.machine_policy = p.rule == Rule::kLfo ? MachinePolicy::kLfm : MachinePolicy::kFfm;
  } else if (auto mp = parse_machine_policy(policy)) {
    p.machine_policy = *mp;
  } else {
    throw std::invalid_argument("unknown machine policy '" + policy + "'");
  }
  p.check();
  return p;
}

std::string schedule_json(const Schedule& s, const Instance& inst) { return schedule_to_json(s, inst).dump(); }

Schedule parse_schedule(const std::string& text, const Instance& inst) {
  return schedule_from_json(nlohmann::json::parse(text), inst);
}

}  // namespace

PYBIND11_MODULE(_pmsched, m) {
  m.doc() = "Scheduling core: instances, list rules, simulated annealing, experiments";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<InstanceError>(m, "InstanceError", PyExc_ValueError);
  py::register_exception<DesignError>(m, "DesignError", PyExc_ValueError);

  py::class_<Instance>(m, "Instance")
      .def_static(
          "from_json", [](const std::string& text) { return instance_from_json(nlohmann::json::parse(text)); },
          py::arg("text"))
      .def("to_json", [](const Instance& i) { return instance_to_json(i).dump(); })
      .def_property_readonly("machine_count", &Instance::machine_count)
      .def_property_readonly("job_count", &Instance::job_count)
      .def_property_readonly("operation_count", &Instance::operation_count)
      .def_property_readonly("family_count", &Instance::family_count);

  m.def(
      "generate_instance",
      [](int jobs, int routings, double setup_ratio, double flex_mean, std::uint64_t seed, int machines,
         int column_types, bool unchecked) {
        GenConfig c;
        c.jobs = jobs;
        c.routings = routings;
        c.setup_ratio = setup_ratio;
        c.flex_mean = flex_mean;
        c.seed = seed;
        c.machines = machines;
        c.column_types = column_types;
        c.unchecked = unchecked;
        c.check();
        return generate_instance(c);
      },
      py::arg("jobs") = 70, py::arg("routings") = 10, py::arg("setup_ratio") = 0.5, py::arg("flex_mean") = 2.0,
      py::arg("seed") = 0, py::arg("machines") = 10, py::arg("column_types") = 20, py::arg("unchecked") = false);

  m.def(
      "run_lta",
      [](const Instance& inst, const std::string& rule, double k1, double k2, double k3, const std::string& policy,
         std::uint64_t seed) {
        const RuleParams p = make_rule(rule, k1, k2, k3, policy);
        py::gil_scoped_release nogil;
        return schedule_json(run_lta(inst, p, seed), inst);
      },
      py::arg("instance"), py::arg("rule") = "atcoee", py::arg("k1") = 10.0, py::arg("k2") = 1.0,
      py::arg("k3") = 10.0, py::arg("machine_policy") = "auto", py::arg("seed") = 0,
      "List treatment schedule as a JSON string.");

  m.def(
      "run_sa",
      [](const Instance& inst, const std::string& initial, const std::string& structure, double cooling,
         std::size_t max_iterations, std::uint64_t seed) {
        SaParams p;
        auto st = parse_structure(structure);
        if (!st) throw std::invalid_argument("unknown structure '" + structure + "'");
        p.structure = *st;
        p.cooling = cooling;
        p.max_iterations = max_iterations;
        p.check();
        const Schedule start = parse_schedule(initial, inst);
        SaResult r;
        {
          py::gil_scoped_release nogil;
          r = run_sa(inst, start, p, seed);
        }
        py::dict out;
        out["schedule"] = schedule_json(r.schedule, inst);
        out["tardiness"] = r.tardiness;
        out["iterations"] = r.stats.iterations;
        out["accepted"] = r.stats.accepted;
        out["initial_temperature"] = r.stats.initial_temperature;
        out["stop"] = std::string(to_string(r.stats.stop));
        py::list trace;
        for (const auto& t : r.trace) trace.append(py::make_tuple(t.iteration, t.temperature, t.current, t.best));
        out["trace"] = trace;
        return out;
      },
      py::arg("instance"), py::arg("initial"), py::arg("structure") = "op_pa", py::arg("cooling") = 0.95,
      py::arg("max_iterations") = 15000, py::arg("seed") = 0);

  m.def(
      "solve",
      [](const Instance& inst, const std::string& algorithm, std::uint64_t seed) {
        const AlgorithmSpec spec = parse_algorithm(algorithm);
        py::gil_scoped_release nogil;
        return schedule_json(solve(inst, spec, seed).schedule, inst);
      },
      py::arg("instance"), py::arg("algorithm"), py::arg("seed") = 0,
      "Runs an algorithm label such as 'atcoee.10.1' or 'op_pa_sa'.");

  m.def(
      "validate",
      [](const Instance& inst, const std::string& schedule) {
        std::vector<std::string> out;
        for (const auto& v : validate_schedule(inst, parse_schedule(schedule, inst))) {
          out.push_back(std::string(to_string(v.kind)) + ": " + v.message);
        }
        return out;
      },
      py::arg("instance"), py::arg("schedule"));

  m.def(
      "metrics",
      [](const Instance& inst, const std::string& schedule) {
        const ScheduleMetrics mt = compute_metrics(parse_schedule(schedule, inst), inst);
        py::dict out;
        out["total_tardiness"] = mt.total_tardiness;
        out["late_jobs"] = mt.late_jobs;
        out["setups"] = mt.setups;
        out["makespan"] = mt.makespan;
        return out;
      },
      py::arg("instance"), py::arg("schedule"));

  m.def("initial_temperature", &initial_temperature, py::arg("mean_delta"), py::arg("p0") = 0.8);
  m.def("effect_to_ratio", &effect_to_ratio, py::arg("effect"));
  m.def("f_critical", &f_critical, py::arg("df1"), py::arg("df2"), py::arg("alpha") = 0.05);
  m.def("log_tardiness", &log_tardiness, py::arg("tardiness"));
}
