#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "susyband/analysis.hpp"
#include "susyband/cli.hpp"
#include "susyband/darboux.hpp"
#include "susyband/elliptic.hpp"
#include "susyband/error.hpp"
#include "susyband/floquet.hpp"
#include "susyband/io.hpp"
#include "susyband/potential.hpp"
#include "susyband/scenario.hpp"
#include "susyband/seeds.hpp"

namespace py = pybind11;
using namespace susyband;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict diagnostics_dict(const TransformDiagnostics& d) {
  py::dict out;
  out["min_abs_denominator"] = d.min_abs_denominator;
  out["min_relative_denominator"] = d.min_relative_denominator;
  out["asymptotic_period_residual"] = d.asymptotic_period_residual;
  out["riccati_residual"] = d.riccati_residual;
  out["beta_consistency"] = d.beta_consistency;
  out["wprime_residual"] = d.wprime_residual;
  out["sususy_equation_residual"] = d.sususy_equation_residual;
  return out;
}

py::list kernel_list(const std::vector<KernelState>& ks) {
  py::list out;
  for (const auto& k : ks) {
    py::dict d;
    d["epsilon"] = k.epsilon;
    d["psi"] = to_array(k.psi);
    d["l2_norm"] = k.l2_norm;
    d["normalizable"] = k.normalizable;
    d["expected_decay_rate"] = k.expected_decay_rate;
    d["decay_rate_left"] = k.decay_rate_left;
    d["decay_rate_right"] = k.decay_rate_right;
    out.append(d);
  }
  return out;
}

template <class F>
py::array_t<double> map_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& xs, F f) {
  py::array_t<double> out(xs.request().shape);
  const double* in = xs.data();
  double* dst = out.mutable_data();
  for (py::ssize_t i = 0; i < xs.size(); ++i) dst[i] = f(in[i]);
  return out;
}

std::vector<double> grid_points(const Grid& g) { return g.points(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Band structures of periodic Schrodinger potentials and their Darboux partners";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<SingularTransformError>(m, "SingularTransformError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("complete_k", [](double mm) { return complete_k(EllipticParameter(mm)); }, py::arg("m"));
  m.def(
      "jacobi_sncndn",
      [](double x, double mm) {
        const auto t = jacobi_sncndn(x, EllipticParameter(mm));
        return py::make_tuple(t.sn, t.cn, t.dn);
      },
      py::arg("x"), py::arg("m"));

  py::class_<Potential>(m, "Potential")
      .def_static("lame", [](int n, double mm) { return Potential::lame(n, EllipticParameter(mm)); },
                  py::arg("n"), py::arg("m"))
      .def_static("constant", &Potential::constant, py::arg("value"), py::arg("period"))
      .def_static("shifted", &Potential::shifted, py::arg("base"), py::arg("delta"))
      .def_static("from_json",
                  [](const std::string& text) { return potential_from_json(nlohmann::json::parse(text)); })
      .def("to_json", [](const Potential& v) { return potential_to_json(v).dump(); })
      .def("__call__", [](const Potential& v, double x) { return v(x); }, py::arg("x"))
      .def("__call__",
           [](const Potential& v, py::array_t<double, py::array::c_style | py::array::forcecast> xs) {
             return map_array(xs, [&v](double x) { return v(x); });
           })
      .def("derivative", [](const Potential& v, double x) { return v.derivative(x); }, py::arg("x"))
      .def("derivative",
           [](const Potential& v, py::array_t<double, py::array::c_style | py::array::forcecast> xs) {
             return map_array(xs, [&v](double x) { return v.derivative(x); });
           })
      .def_property_readonly("period", &Potential::period)
      .def_property_readonly("is_periodic", &Potential::is_periodic);

  m.def(
      "transfer_matrix",
      [](const Potential& v, double e, double x0, double x1) {
        const auto b = transfer_matrix(v, e, x0, x1);
        return std::array<std::array<double, 2>, 2>{{{b.a(), b.b()}, {b.c(), b.d()}}};
      },
      py::arg("v"), py::arg("energy"), py::arg("x0"), py::arg("x1"));
  m.def("discriminant", [](const Potential& v, double e) { return discriminant(v, e); }, py::arg("v"),
        py::arg("energy"));
  m.def(
      "classify",
      [](const Potential& v, double e) {
        const auto c = classify(v, e);
        py::dict d;
        d["tag"] = std::string(to_string(c.tag));
        d["discriminant"] = c.discriminant;
        d["beta_plus"] = c.beta_plus;
        d["beta_minus"] = c.beta_minus;
        d["coexistence"] = c.coexistence;
        return d;
      },
      py::arg("v"), py::arg("energy"));

  py::class_<BandStructure>(m, "BandStructure")
      .def_property_readonly("edges",
                             [](const BandStructure& b) {
                               std::vector<double> out;
                               for (const auto& e : b.edges) out.push_back(e.energy);
                               return out;
                             })
      .def_property_readonly("parities",
                             [](const BandStructure& b) {
                               std::vector<std::string> out;
                               for (const auto& e : b.edges) {
                                 out.push_back(e.parity == EdgeParity::Periodic ? "periodic" : "antiperiodic");
                               }
                               return out;
                             })
      .def_property_readonly("touching",
                             [](const BandStructure& b) {
                               std::vector<double> out;
                               for (const auto& e : b.touching) out.push_back(e.energy);
                               return out;
                             })
      .def_property_readonly("bands",
                             [](const BandStructure& b) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& i : b.bands) out.emplace_back(i.lo, i.hi);
                               return out;
                             })
      .def_property_readonly("gaps",
                             [](const BandStructure& b) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& i : b.gaps) out.emplace_back(i.lo, i.hi);
                               return out;
                             })
      .def("to_json", [](const BandStructure& b) { return band_structure_to_json(b).dump(); });
  m.def("band_edges", [](const Potential& v, double lo, double hi) { return band_edges(v, lo, hi); },
        py::arg("v"), py::arg("e_min"), py::arg("e_max"));

  py::class_<SeedSolution>(m, "SeedSolution")
      .def_readonly("epsilon", &SeedSolution::epsilon)
      .def_property_readonly("kind", [](const SeedSolution& s) { return std::string(to_string(s.kind)); })
      .def_readonly("multiplier", &SeedSolution::multiplier)
      .def_readonly("c_plus", &SeedSolution::c_plus)
      .def_readonly("c_minus", &SeedSolution::c_minus)
      .def_readonly("node_count", &SeedSolution::node_count)
      .def_readonly("nodes", &SeedSolution::nodes)
      .def_property_readonly("x", [](const SeedSolution& s) { return to_array(grid_points(s.grid)); })
      .def_property_readonly("u", [](const SeedSolution& s) { return to_array(s.u); })
      .def_property_readonly("du", [](const SeedSolution& s) { return to_array(s.du); });
  m.def(
      "bloch_seed",
      [](const Potential& v, double e) {
        auto p = bloch_seed(v, e);
        return py::make_tuple(p.growing, p.decaying);
      },
      py::arg("v"), py::arg("epsilon"));
  m.def(
      "general_seed",
      [](const Potential& v, double e, double cp, double cm) { return general_seed(v, e, cp, cm); },
      py::arg("v"), py::arg("epsilon"), py::arg("c_plus"), py::arg("c_minus"));
  m.def("riccati_residual", [](const SeedSolution& s) { return riccati_residual(s); }, py::arg("seed"));

  py::class_<TransformResult>(m, "TransformResult")
      .def_readonly("partner", &TransformResult::partner)
      .def_readonly("order", &TransformResult::order)
      .def_readonly("periodic", &TransformResult::periodic)
      .def_readonly("epsilons", &TransformResult::epsilons)
      .def_property_readonly("x", [](const TransformResult& r) { return to_array(grid_points(r.grid)); })
      .def_property_readonly("original", [](const TransformResult& r) { return to_array(r.original); })
      .def_property_readonly("partner_values",
                             [](const TransformResult& r) { return to_array(r.partner_values); })
      .def_property_readonly("intertwiner", [](const TransformResult& r) { return to_array(r.intertwiner); })
      .def_property_readonly("kernel", [](const TransformResult& r) { return kernel_list(r.kernel); })
      .def_property_readonly("diagnostics",
                             [](const TransformResult& r) { return diagnostics_dict(r.diagnostics); })
      .def("factorization_residual",
           [](const TransformResult& r) { return factorization_residual(r, default_test_functions(r)); })
      .def("intertwining_residual",
           [](const TransformResult& r, const SeedSolution& s) { return intertwining_residual(r, s); });
  m.def("susy1", [](const SeedSolution& s) { return susy1(s); }, py::arg("seed"));
  m.def("susy2", [](const SeedSolution& a, const SeedSolution& b) { return susy2(a, b); }, py::arg("seed1"),
        py::arg("seed2"));

  m.def(
      "displacement_fit",
      [](const Potential& v, const Potential& w) {
        const auto f = displacement_fit(v, w);
        return py::make_tuple(f.delta, f.residual);
      },
      py::arg("v"), py::arg("w"));
  m.def(
      "invariance_test",
      [](const Potential& v, double e) { return invariance_to_json(invariance_test(v, e)).dump(); },
      py::arg("v"), py::arg("epsilon"), "Invariance report as a JSON document.");
  m.def(
      "compare_band_structure",
      [](const Potential& v, const Potential& w, const std::vector<double>& energies) {
        return compare_band_structure(v, w, energies);
      },
      py::arg("v"), py::arg("w"), py::arg("energies"));
  m.def("band_comparison_grid", [](const BandStructure& b, std::size_t n) { return band_comparison_grid(b, n); },
        py::arg("bands"), py::arg("count") = 50);
  m.def(
      "shooting_eigenvalue",
      [](const Potential& partner, double guess, double half_width) {
        return shooting_eigenvalue(partner, guess, half_width);
      },
      py::arg("partner"), py::arg("guess"), py::arg("half_width") = 0.02);

  m.def("scenario_names", &scenario_names);
  m.def(
      "run_scenario",
      [](const std::string& name) {
        const auto run = run_transform(builtin_scenario(name));
        py::dict d;
        d["bands"] = run.bands;
        d["result"] = run.result;
        py::list seeds;
        for (const auto& s : run.seeds) seeds.append(s.seed);
        d["seeds"] = seeds;
        if (run.displacement) d["displacement"] = py::make_tuple(run.displacement->delta, run.displacement->residual);
        py::list states;
        for (std::size_t i = 0; i < run.bound_states.size(); ++i) {
          const auto& b = run.bound_states[i];
          py::dict s;
          s["epsilon"] = b.epsilon;
          s["gap_index"] = b.gap_index;
          s["expected_decay_rate"] = b.expected_decay_rate;
          s["decay_rate"] = b.decay_rate;
          s["shooting_eigenvalue"] = i < run.shooting.size() ? py::cast(run.shooting[i]) : py::none();
          states.append(s);
        }
        d["bound_states"] = states;
        return d;
      },
      py::arg("name"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"susyband"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line interface in-process; returns (exit_code, stdout, stderr).");
}
