#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qdv/errors.hpp"
#include "qdv/quantum_core.hpp"
#include "qdv/scenario.hpp"
#include "qdv/simulator.hpp"

#include <sstream>

#include "replay/trace_replay.hpp"

namespace py = pybind11;
using namespace qdv;

namespace {

Projector projector(int which, std::size_t qubit) {
  if (which != 0 && which != 1) throw InputError("projector must be 0 or 1");
  return which == 0 ? Projector::p0(qubit) : Projector::p1(qubit);
}

py::dict table_dict(const RoutingTable& t, const Topology& topo) {
  py::dict out;
  for (const auto& [dest, e] : t.entries()) {
    py::object hop = e.next_hop == kNoNode ? py::none() : py::object(py::str(topo.name(e.next_hop)));
    out[py::str(topo.name(dest))] = py::make_tuple(hop, e.metric);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distance-vector routing simulator with entanglement-assisted failure notification";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<LifecycleError>(m, "LifecycleError", PyExc_RuntimeError);
  py::register_exception<InvalidStateError>(m, "InvalidStateError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<JointState>(m, "JointState")
      .def_static("from_amplitudes", &JointState::from_amplitudes, py::arg("num_qubits"), py::arg("amplitudes"))
      .def_property_readonly("num_qubits", &JointState::num_qubits)
      .def_property_readonly("amplitudes",
                             [](const JointState& s) {
                               return std::vector<Amplitude>(s.amplitudes().begin(), s.amplitudes().end());
                             })
      .def("squared_norm", &JointState::squared_norm)
      .def("__repr__", [](const JointState& s) {
        return "<JointState qubits=" + std::to_string(s.num_qubits()) + ">";
      });

  m.def("basis_state", &basis_state, py::arg("num_qubits"), py::arg("bits"));
  m.def("bell_pair", &bell_pair);
  m.def("tensor", &tensor, py::arg("a"), py::arg("b"));
  m.def(
      "apply_projector",
      [](const JointState& s, int which, std::size_t qubit) { return apply_projector(s, projector(which, qubit)); },
      py::arg("state"), py::arg("which"), py::arg("qubit"), "P0 or P1 on one qubit, not renormalized.");
  m.def(
      "expectation",
      [](const JointState& s, int which, std::size_t qubit) { return expectation(s, projector(which, qubit)); },
      py::arg("state"), py::arg("which"), py::arg("qubit"));
  m.def(
      "measure_sample",
      [](const JointState& s, std::size_t qubit, std::uint64_t seed) {
        RandomStream rng(seed);
        auto r = measure_sample(s, qubit, rng);
        return py::make_tuple(r.bit, r.collapsed);
      },
      py::arg("state"), py::arg("qubit"), py::arg("seed"));

  m.def(
      "run_scenario",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::uint32_t> max_rounds,
         std::optional<std::string> variant) {
        ScenarioConfig cfg = load_scenario(text);
        if (seed) cfg.seed = *seed;
        if (max_rounds) cfg.max_rounds = *max_rounds;
        if (variant) {
          const auto v = parse_protocol_variant(*variant);
          if (!v) throw InputError("unknown variant '" + *variant + "'");
          cfg.variant = *v;
        }
        cfg.validate();
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        py::dict tables;
        for (const auto& t : r.tables) tables[py::str(cfg.topology.name(t.owner()))] = table_dict(t, cfg.topology);
        py::dict out;
        out["trace"] = trace_text(r.trace);
        out["metrics"] = metrics_text(r.metrics);
        out["tables"] = tables;
        return out;
      },
      py::arg("text"), py::arg("seed") = py::none(), py::arg("max_rounds") = py::none(),
      py::arg("variant") = py::none(), "Runs a scenario given as text. Returns trace, metrics and final tables.");

  m.def(
      "replay_metrics",
      [](const std::string& trace) {
        std::istringstream in(trace);
        return replay::replay_metrics(in).dump(2) + "\n";
      },
      py::arg("trace"), "Recomputes the metrics text from a trace.");
}
