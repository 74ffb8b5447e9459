#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ergograph/cli.hpp"
#include "ergograph/io.hpp"

namespace py = pybind11;
using namespace ergograph;

namespace {

// Box-indexed values as an array of shape upper + 1; the first coordinate varies fastest.
py::array_t<double> as_array(const Distribution& d) {
  std::vector<py::ssize_t> shape, strides;
  py::ssize_t stride = sizeof(double);
  for (int u : d.box.upper()) {
    shape.push_back(u + 1);
    strides.push_back(stride);
    stride *= u + 1;
  }
  py::array_t<double> out(shape, strides);
  std::copy(d.p.begin(), d.p.end(), out.mutable_data());
  return out;
}

TruncatedChain closed_chain(const ReactionNetwork& net, const Box& box) {
  auto chain = build_truncated_chain(net, box);
  if (is_irreducible(chain)) return chain;
  return restrict_to_closed_class(chain, State(box.dim(), 0));
}

}  // namespace

PYBIND11_MODULE(_ergograph, m) {
  m.doc() = "Reaction network CTMCs: stationary laws, spectral gaps, mixing";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  py::class_<ReactionNetwork>(m, "ReactionNetwork")
      .def_static("parse", [](const std::string& text) { return parse_network(text); }, py::arg("text"))
      .def_static("load", &load_network, py::arg("path"))
      .def_readonly("species", &ReactionNetwork::species)
      .def_property_readonly("dim", &ReactionNetwork::dim)
      .def_property_readonly("num_reactions", [](const ReactionNetwork& n) { return n.reactions.size(); })
      .def("__str__", &format_network)
      .def("__repr__", [](const ReactionNetwork& n) {
        return "<ReactionNetwork species=" + std::to_string(n.dim()) + " reactions=" +
               std::to_string(n.reactions.size()) + ">";
      });

  m.def(
      "verify_complex_balanced",
      [](const ReactionNetwork& net, const std::vector<double>& c, double rel_tol) {
        auto rep = verify_complex_balanced(net, c, rel_tol);
        return py::dict(py::arg("balanced") = rep.balanced, py::arg("max_abs_residual") = rep.max_abs_residual,
                        py::arg("residuals") = rep.residuals);
      },
      py::arg("net"), py::arg("c"), py::arg("rel_tol") = 1e-12);

  m.def(
      "search_complex_balanced",
      [](const ReactionNetwork& net, const std::vector<double>& initial) { return search_complex_balanced(net, initial); },
      py::arg("net"), py::arg("initial"));

  m.def(
      "catalytic_layers",
      [](const ReactionNetwork& net) -> std::optional<std::vector<std::vector<std::string>>> {
        auto part = derive_catalytic_partition(net);
        if (!part) return std::nullopt;
        std::vector<std::vector<std::string>> names;
        for (const auto& layer : part->layers) {
          auto& out = names.emplace_back();
          for (int s : layer) out.push_back(net.species[static_cast<std::size_t>(s)]);
        }
        return names;
      },
      py::arg("net"));

  m.def(
      "stationary",
      [](const ReactionNetwork& net, const std::vector<int>& box) { return as_array(solve_stationary_truncated(closed_chain(net, Box(box)))); },
      py::arg("net"), py::arg("box"), "Stationary law of the chain truncated to the box.");

  m.def(
      "product_form",
      [](const ReactionNetwork& net, const std::vector<double>& c, const std::vector<int>& box) {
        return as_array(product_form_stationary(net, c, Box(box)).dist);
      },
      py::arg("net"), py::arg("c"), py::arg("box"));

  m.def(
      "spectral_gap",
      [](const ReactionNetwork& net, const std::vector<int>& box) {
        auto chain = closed_chain(net, Box(box));
        auto g = estimate_gap(solve_stationary_truncated(chain), chain);
        return py::dict(py::arg("value") = g.value, py::arg("method") = to_string(g.method),
                        py::arg("residual") = g.residual);
      },
      py::arg("net"), py::arg("box"));

  m.def(
      "mixing_time",
      [](const ReactionNetwork& net, const std::vector<int>& box, const std::vector<int>& x0, double eps) {
        auto chain = closed_chain(net, Box(box));
        return mixing_time_numeric(chain, solve_stationary_truncated(chain), x0, eps);
      },
      py::arg("net"), py::arg("box"), py::arg("x0"), py::arg("eps") = 0.25);

  m.def(
      "simulate",
      [](const ReactionNetwork& net, const std::vector<int>& x0, double horizon, std::uint64_t seed) {
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = ssa_simulate(net, x0, horizon, seed);
        }
        py::array_t<double> times(static_cast<py::ssize_t>(traj.times.size()));
        std::copy(traj.times.begin(), traj.times.end(), times.mutable_data());
        py::array_t<int> states({static_cast<py::ssize_t>(traj.size()), static_cast<py::ssize_t>(traj.dim)});
        std::copy(traj.states.begin(), traj.states.end(), states.mutable_data());
        return py::make_tuple(times, states);
      },
      py::arg("net"), py::arg("x0"), py::arg("horizon"), py::arg("seed") = 1,
      "Gillespie trajectory: jump times and the state after each jump.");

  m.def(
      "main",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> owned{"ergograph"};
        owned.insert(owned.end(), args.begin(), args.end());
        std::vector<char*> argv;
        for (auto& a : owned) argv.push_back(a.data());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line tool in process; returns (exit code, stdout, stderr).");

  m.attr("__version__") = cli::version();
}
