#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "graphlaplace/cli.hpp"
#include "graphlaplace/error.hpp"
#include "graphlaplace/fractional.hpp"
#include "graphlaplace/graph_io.hpp"
#include "graphlaplace/sampler.hpp"
#include "graphlaplace/verify.hpp"

namespace py = pybind11;
using namespace graphlaplace;

namespace {

using BasisPtr = std::shared_ptr<SpectralBasis>;

// Points are (edge, t) with the edge given by name or index.
GraphPoint to_point(const MetricGraph& g, const py::tuple& p) {
  if (p.size() != 2) throw Error(ErrorCode::BadArgument, "python", "points are (edge, t) pairs");
  EdgeId e;
  if (py::isinstance<py::str>(p[0])) {
    const auto name = p[0].cast<std::string>();
    const auto found = g.find_edge(name);
    if (!found) throw Error(ErrorCode::BadArgument, "python", "unknown edge '" + name + "'");
    e = *found;
  } else {
    e = p[0].cast<EdgeId>();
  }
  GraphPoint x{e, p[1].cast<double>()};
  g.check_point(x);
  return x;
}

SpectralCoefficients coeffs(const BasisPtr& b, const std::vector<double>& c) {
  if (c.size() != b->size()) {
    throw Error(ErrorCode::BadArgument, "python",
                "expected " + std::to_string(b->size()) + " coefficients, got " + std::to_string(c.size()));
  }
  SpectralCoefficients out{b, c};
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral methods, fractional operators and Gaussian fields on metric graphs";
  m.attr("__version__") = GRAPHLAPLACE_VERSION;

  static py::exception<Error> py_error(m, "GraphLaplaceError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py_error;
      py::object inst = err(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("module") = e.module();
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  py::class_<GraphFile>(m, "Graph")
      .def_property_readonly("vertex_count", [](const GraphFile& f) { return f.graph.vertex_count(); })
      .def_property_readonly("edge_count", [](const GraphFile& f) { return f.graph.edge_count(); })
      .def_property_readonly("total_length", [](const GraphFile& f) { return f.graph.total_length(); })
      .def_property_readonly("edges",
                             [](const GraphFile& f) {
                               std::vector<std::string> names;
                               for (const auto& e : f.graph.edges()) names.push_back(e.name);
                               return names;
                             })
      .def("edge_length", [](const GraphFile& f, const std::string& name) {
             const auto e = f.graph.find_edge(name);
             if (!e) throw Error(ErrorCode::BadArgument, "python", "unknown edge '" + name + "'");
             return f.graph.edge(*e).length;
           })
      .def("distance", [](const GraphFile& f, const py::tuple& x, const py::tuple& y) {
             return f.graph.distance(to_point(f.graph, x), to_point(f.graph, y));
           })
      .def("to_json", [](const GraphFile& f) { return to_json(f.graph, f.conditions); });

  m.def("load_graph", [](const std::string& path) { return load_graph_file(path); }, py::arg("path"));
  m.def("parse_graph", [](const std::string& text) { return parse_graph_file(text); }, py::arg("text"));

  py::class_<SpectralBasis, BasisPtr>(m, "Basis")
      .def_property_readonly("eigenvalues", [](const SpectralBasis& b) { return b.eigenvalues; })
      .def_property_readonly("multiplicity", [](const SpectralBasis& b) { return b.multiplicity; })
      .def_property_readonly("solver", [](const SpectralBasis& b) { return b.path == SolverPath::Secular ? "secular" : "fem"; })
      .def("__len__", &SpectralBasis::size)
      .def("phi", [](const SpectralBasis& b, std::size_t i, const py::tuple& x) {
             const auto p = to_point(b.graph, x);
             return b.phi(i).value(p.edge, p.t);
           })
      .def("sup_norm_constant", [](const SpectralBasis& b) { return sup_norm_survey(b).constant; })
      .def("weyl_bounds", [](const SpectralBasis& b) {
             const auto w = weyl_fit(b);
             return std::make_pair(w.A, w.B);
           })
      .def("eig_residual", [](const SpectralBasis& b, std::size_t i) { return eig_residual(b, i); });

  m.def(
      "eigensolve",
      [](const GraphFile& f, std::size_t n, double kappa, const std::string& solver, double h) -> BasisPtr {
        if (solver == "secular") return std::make_shared<SpectralBasis>(secular_eigensolve(f.graph, kappa, f.conditions, n));
        if (solver == "fem") {
          return std::make_shared<SpectralBasis>(
              fem_eigensolve(f.graph, CoefficientField::constant(f.graph, kappa), f.conditions, h, n));
        }
        throw Error(ErrorCode::BadArgument, "python", "solver must be 'secular' or 'fem'");
      },
      py::arg("graph"), py::arg("n"), py::arg("kappa") = 1.0, py::arg("solver") = "secular", py::arg("h") = 0.01);

  m.def("dot_h_norm", [](const BasisPtr& b, const std::vector<double>& c, double beta) {
    return dot_h_norm(coeffs(b, c), beta).value;
  });
  m.def("apply_fractional", [](const BasisPtr& b, const std::vector<double>& c, double alpha) {
    return apply_fractional(coeffs(b, c), alpha).c;
  });
  m.def("solve_fractional", [](const BasisPtr& b, const std::vector<double>& c, double alpha) {
    return solve_fractional(coeffs(b, c), alpha).c;
  });
  m.def("synthesize", [](const BasisPtr& b, const std::vector<double>& c, const py::tuple& x) {
    const auto p = to_point(b->graph, x);
    return synthesize(coeffs(b, c)).value(p.edge, p.t);
  });

  m.def(
      "sample_field",
      [](const BasisPtr& b, double alpha, std::uint64_t seed, std::uint64_t stream) {
        return sample_field(b, alpha, RngSpec{seed, stream}).coeffs.c;
      },
      py::arg("basis"), py::arg("alpha"), py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("covariance_series", [](const BasisPtr& b, double alpha, const py::tuple& x, const py::tuple& y) {
    const auto r = covariance_series(*b, alpha, to_point(b->graph, x), to_point(b->graph, y));
    return std::make_pair(r.value, r.tail_bound);
  });

  m.def(
      "verify",
      [](const GraphFile& f, double kappa, std::size_t n, std::size_t samples, std::uint64_t seed) {
        VerifyOptions opt;
        opt.kappa = kappa;
        opt.n = n;
        opt.samples = samples;
        opt.seed = seed;
        std::vector<py::dict> rows;
        for (const auto& r : verify_suite(f.graph, f.conditions, opt)) {
          py::dict d;
          d["module"] = r.module;
          d["check"] = r.name;
          d["value"] = r.value;
          d["threshold"] = r.threshold;
          d["pass"] = r.pass;
          d["note"] = r.note;
          rows.push_back(d);
        }
        return rows;
      },
      py::arg("graph"), py::arg("kappa") = 1.0, py::arg("n") = 80, py::arg("samples") = 2000, py::arg("seed") = 0);

  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "graphlaplace");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        return cli_main(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"));
}
