#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geodesics/census.hpp"
#include "geodesics/error.hpp"
#include "geodesics/group_core.hpp"
#include "geodesics/hyperbolic_geom.hpp"
#include "geodesics/markov_system.hpp"
#include "geodesics/stats_limits.hpp"
#include "geodesics/symbolic_thermo.hpp"

namespace py = pybind11;
using namespace geodesics;

namespace {

std::optional<std::string> maybe_str(const std::optional<CyclicWord>& w) {
  if (!w) return std::nullopt;
  return w->str();
}

py::dict constants_dict(const ThermoConstants& k) {
  py::dict d;
  d["h"] = k.h;
  d["h_std_error"] = k.h_std_error;
  d["A"] = k.A;
  d["sigma2"] = k.sigma2;
  d["D"] = k.D;
  d["A_tilde"] = k.A_tilde;
  d["degenerate"] = k.degenerate;
  d["sigma2_residual"] = k.sigma2_residual;
  d["D_residual"] = k.D_residual;
  d["method"] = k.method;
  return d;
}

ThermoConstants constants_from(const py::dict& d) {
  ThermoConstants k;
  k.h = d["h"].cast<double>();
  k.A = d["A"].cast<double>();
  k.sigma2 = d["sigma2"].cast<double>();
  if (d.contains("A_tilde")) k.A_tilde = d["A_tilde"].cast<double>();
  return k;
}

py::list cdf_rows(const std::vector<CdfRow>& rows) {
  py::list out;
  for (const auto& r : rows) out.append(py::make_tuple(r.x, r.count, r.empirical, r.normal));
  return out;
}

}  // namespace

PYBIND11_MODULE(_geodesics, m) {
  m.doc() = "Closed geodesics on hyperbolic surfaces and their symbolic models";
  m.attr("__version__") = "0.1.0";

  static py::exception<Error> error(m, "GeodesicsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object instance = exc(e.what());
      instance.attr("code") = e.code();
      instance.attr("kind") = kind_name(e.kind());
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  // --- words and presentations
  py::class_<SurfacePresentation>(m, "Presentation")
      .def_static("surface", &SurfacePresentation::surface, py::arg("genus") = 2)
      .def_static("free_group", &SurfacePresentation::free_group, py::arg("rank") = 2)
      .def_property_readonly("is_surface", &SurfacePresentation::is_surface)
      .def_property_readonly("generator_count", &SurfacePresentation::generator_count)
      .def("describe", &SurfacePresentation::describe)
      .def("__repr__", &SurfacePresentation::describe);

  m.def("free_reduce", [](const std::string& w) { return free_reduce(Word::parse(w).letters()).str(); });
  m.def("cyclic_reduce", [](const std::string& w) { return maybe_str(cyclic_reduce(Word::parse(w))); });
  m.def("dehn_reduce", [](const std::string& w, const SurfacePresentation& p) {
    return dehn_reduce(Word::parse(w), p).str();
  });
  m.def("dehn_reduce_cyclic", [](const std::string& w, const SurfacePresentation& p) {
    return maybe_str(dehn_reduce_cyclic(CyclicWord::parse(w), p));
  });
  m.def("geodesic_reduce_cyclic", [](const std::string& w, const SurfacePresentation& p) {
    return geodesic_reduce_cyclic(CyclicWord::parse(w), p).str();
  });
  m.def("canonical_form", [](const std::string& w, const SurfacePresentation& p) {
    return canonical_form(CyclicWord::parse(w), p).str();
  });
  m.def("is_primitive", [](const std::string& w) {
    const auto d = is_primitive(CyclicWord::parse(w));
    return py::make_tuple(d.primitive, d.root.str(), d.power);
  });
  m.def(
      "enumerate_classes",
      [](const SurfacePresentation& p, int n_max, int workers) {
        EnumerationOptions o;
        o.workers = workers;
        py::list out;
        for_each_class(
            p, n_max,
            [&](const ConjugacyClass& c) {
              out.append(py::make_tuple(c.representative.str(), c.n, c.primitive, c.power));
            },
            o);
        return out;
      },
      py::arg("presentation"), py::arg("n_max"), py::arg("workers") = 0,
      "List of (word, n, primitive, power), sorted by (n, word).");

  // --- representations
  py::class_<FuchsianRep>(m, "Representation")
      .def_property_readonly("name", &FuchsianRep::name)
      .def_property_readonly("presentation", &FuchsianRep::presentation)
      .def("matrix",
           [](const FuchsianRep& rep, const std::string& w) {
             const auto x = evaluate_word(rep, Word::parse(w));
             return py::make_tuple(x.a(), x.b(), x.c(), x.d());
           })
      .def("trace", [](const FuchsianRep& rep, const std::string& w) {
        return evaluate_word(rep, Word::parse(w)).trace();
      })
      .def("length", [](const FuchsianRep& rep, const std::string& w) {
        return translation_length(evaluate_word(rep, Word::parse(w)), rep.tolerance());
      });
  m.def("octagon_representation", &octagon_representation);
  m.def("schottky_representation", &schottky_representation, py::arg("separation") = 3.0);

  // --- symbolic systems and pressure
  py::class_<MarkovChainSystem>(m, "MarkovChainSystem")
      .def(py::init<int, std::vector<std::uint8_t>, std::vector<double>>(), py::arg("k"),
           py::arg("transition"), py::arg("roof"))
      .def_static("full_shift", &MarkovChainSystem::full_shift, py::arg("roof"))
      .def_static("from_json", &MarkovChainSystem::from_json)
      .def_static("load", &MarkovChainSystem::load)
      .def("to_json", &MarkovChainSystem::to_json)
      .def("scaled", &MarkovChainSystem::scaled)
      .def_property_readonly("k", &MarkovChainSystem::k)
      .def_property_readonly("roof", &MarkovChainSystem::roof);

  py::class_<PressureEvaluator>(m, "PressureEvaluator")
      .def_static("exact", &PressureEvaluator::exact, py::arg("system"))
      .def_static("from_census", py::overload_cast<const Census&, int>(&PressureEvaluator::from_census),
                  py::arg("census"), py::arg("window") = 5)
      .def_property_readonly("is_exact", &PressureEvaluator::is_exact)
      .def("describe", &PressureEvaluator::describe)
      .def(
          "pressure",
          [](const PressureEvaluator& pe, double s, double z) {
            const auto v = pe.pressure(s, z);
            return py::make_tuple(v.value, v.std_error);
          },
          py::arg("s"), py::arg("z") = 0.0)
      .def("derivative", &PressureEvaluator::derivative);

  m.def("solve_sigma", &solve_sigma, py::arg("pressure"), py::arg("z"), py::arg("delta_num") = kDeltaNum);
  m.def("thermo_constants", [](const PressureEvaluator& pe) { return constants_dict(thermo_constants(pe)); });

  // --- censuses
  py::class_<Census>(m, "Census")
      .def_property_readonly("presentation", &Census::presentation)
      .def_property_readonly("representation", &Census::representation)
      .def_property_readonly("n_max", &Census::n_max)
      .def_property_readonly("T_cert", &Census::T_cert)
      .def_property_readonly("alpha_hat", &Census::alpha_hat)
      .def_property_readonly("checksum", [](const Census& c) { return census_checksum(c); })
      .def("__len__", &Census::size)
      .def("count_by_n", &Census::count_by_n)
      .def(
          "records",
          [](const Census& c) {
            py::list out;
            for (const auto& r : c.records()) {
              out.append(py::make_tuple(r.id, r.n, r.ell, r.primitive, r.power, r.trace, c.word(r)));
            }
            return out;
          },
          "List of (id, n, ell, prime, power, trace, word) sorted by (ell, n, id).")
      .def("__eq__", [](const Census& x, const Census& y) { return x == y; });

  m.def(
      "build_census",
      [](const FuchsianRep& rep, int n_max, int workers) {
        CensusOptions o;
        o.workers = workers;
        py::gil_scoped_release release;
        return build_census(rep.presentation(), rep, n_max, o);
      },
      py::arg("representation"), py::arg("n_max"), py::arg("workers") = 0);
  m.def(
      "build_census_from_system",
      [](const MarkovChainSystem& sys, int n_max, int workers) {
        CensusOptions o;
        o.workers = workers;
        py::gil_scoped_release release;
        return build_census_from_system(sys, n_max, o);
      },
      py::arg("system"), py::arg("n_max"), py::arg("workers") = 0);
  m.def("save_census", &save_census, py::arg("census"), py::arg("path"));
  m.def("load_census", &load_census, py::arg("path"));

  // --- statistics
  m.def("li", &li);
  m.def("count_pi", &count_pi);
  m.def("ratio_average", &ratio_average);
  m.def("average_word_length", [](const Census& c, double T, const py::dict& k) {
    const auto r = average_word_length(c, T, constants_from(k));
    py::dict d;
    d["T"] = r.T;
    d["pi"] = r.pi;
    d["mean"] = r.mean;
    d["model"] = r.model;
    d["ratio"] = r.ratio;
    return d;
  });
  m.def(
      "variance_word_length",
      [](const Census& c, const std::vector<double>& grid, std::size_t min_count) {
        const auto r = variance_word_length(c, grid, min_count);
        py::dict d;
        d["sigma2_hat"] = r.sigma2_hat;
        d["D_hat"] = r.D_hat;
        d["r_squared"] = r.r_squared;
        py::list pts;
        for (const auto& p : r.points) pts.append(py::make_tuple(p.T, p.pi, p.mean, p.variance));
        d["points"] = pts;
        return d;
      },
      py::arg("census"), py::arg("T_grid"), py::arg("min_count") = 30);
  m.def(
      "clt_empirical",
      [](const Census& c, double T, double A, double sigma2) {
        const auto r = clt_empirical(c, T, A, sigma2);
        py::dict d;
        d["T"] = r.T;
        d["pi"] = r.pi;
        d["ks"] = r.ks;
        d["table"] = cdf_rows(r.table);
        return d;
      },
      py::arg("census"), py::arg("T"), py::arg("A"), py::arg("sigma2"));
  m.def(
      "llt_profile",
      [](const Census& c, double T, double A, double sigma2, const std::vector<double>& x_grid) {
        const auto r = llt_profile(c, T, A, sigma2, x_grid);
        py::dict d;
        d["T"] = r.T;
        d["pi"] = r.pi;
        d["peak_model"] = r.peak_model;
        d["window_sum"] = r.window_sum;
        py::list rows;
        for (const auto& x : r.rows) rows.append(py::make_tuple(x.x, x.count, x.frequency, x.scaled));
        d["rows"] = rows;
        return d;
      },
      py::arg("census"), py::arg("T"), py::arg("A"), py::arg("sigma2"), py::arg("x_grid"));
  m.def("word_ordered_stats", [](const Census& c, int n, const py::dict& k) {
    const auto r = word_ordered_stats(c, n, constants_from(k));
    py::dict d;
    d["n"] = r.n;
    d["count"] = r.count;
    d["mean_ell"] = r.mean_ell;
    d["mean_over_n"] = r.mean_over_n;
    d["a0"] = r.a[0];
    d["ks"] = r.ks;
    return d;
  });
  m.def("moment_generating", [](const Census& c, double T, double z, const PressureEvaluator& pe, double h) {
    const auto r = moment_generating(c, T, z, pe, h);
    py::dict d;
    d["log_ratio"] = r.log_ratio;
    d["log_ratio_model"] = r.log_ratio_model;
    d["model_gap"] = r.model_gap;
    return d;
  });
}
