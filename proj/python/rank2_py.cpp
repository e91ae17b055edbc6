// Python bindings. Structured inputs and outputs cross the boundary as JSON
// text; the package wrapper turns them into dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rank2/graphgen.hpp"
#include "rank2/harness.hpp"
#include "rank2/io.hpp"
#include "rank2/levy.hpp"
#include "rank2/sizebias.hpp"
#include "rank2/stats.hpp"

namespace py = pybind11;
using namespace rank2;

namespace {

py::array_t<double> masses_array(const ComponentMassList& c) {
  py::array_t<double> out({static_cast<py::ssize_t>(c.size()), py::ssize_t{2}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < c.size(); ++k) {
    m(k, 0) = c.masses[k][0];
    m(k, 1) = c.masses[k][1];
  }
  return out;
}

py::array_t<std::int64_t> counts_array(const ComponentMassList& c) {
  py::array_t<std::int64_t> out({static_cast<py::ssize_t>(c.size()), py::ssize_t{2}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < c.size(); ++k) {
    m(k, 0) = static_cast<std::int64_t>(c.counts[k][0]);
    m(k, 1) = static_cast<std::int64_t>(c.counts[k][1]);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_rank2, m) {
  m.doc() = "rank-2 multiplicative random graphs and their Levy-process limits";

  static py::exception<Error> error(m, "Rank2Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  m.def("validate_spec", [](const std::string& spec) { return spec_to_json(spec_from_json(Json::parse(spec))).dump(); },
        "Parse, validate and re-encode a spec.");

  m.def(
      "component_masses",
      [](const std::string& spec, std::uint64_t seed, std::size_t top_k) {
        const ModelSpec s = spec_from_json(Json::parse(spec));
        Rng rng = make_rng(seed, 0);
        ComponentMassList c;
        {
          py::gil_scoped_release release;
          c = sample_component_masses(s, rng, top_k);
        }
        return py::make_tuple(masses_array(c), counts_array(c));
      },
      py::arg("spec"), py::arg("seed"), py::arg("top_k") = 0);

  m.def(
      "zeta",
      [](double beta, std::vector<double> theta, double lambda, std::uint64_t seed, std::optional<double> h,
         std::optional<double> T, int max_doublings) {
        LimitTriple t;
        t.beta = beta;
        t.theta = std::move(theta);
        t.lambda = lambda;
        t.validate();
        Rng rng = make_rng(seed, 0);
        ZetaResult z;
        {
          py::gil_scoped_release release;
          z = zeta(t, {h, T, max_doublings}, rng);
        }
        py::dict d;
        d["lengths"] = z.lengths;
        d["horizon"] = z.horizon;
        d["step"] = z.step;
        d["adequate"] = z.adequate;
        d["doublings"] = z.doublings;
        return d;
      },
      py::arg("beta"), py::arg("theta"), py::arg("lam"), py::arg("seed"), py::arg("h") = py::none(),
      py::arg("T") = py::none(), py::arg("max_doublings") = 3);

  m.def(
      "size_biased_order",
      [](const std::vector<double>& sizes, std::uint64_t seed, bool exponential) {
        Rng rng = make_rng(seed, 0);
        const SizeBiasedDraw d = exponential ? exponential_embedding(sizes, rng) : size_biased_permutation(sizes, rng);
        return d.order;
      },
      py::arg("sizes"), py::arg("seed"), py::arg("exponential") = false);

  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const KsResult r = ks_two_sample(a, b);
        return py::make_tuple(r.statistic, r.p_value);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "bip_er_spec",
      [](std::size_t n, std::size_t mm, double lambda12, const std::string& regime, double theta) {
        const BipErConversion c = bip_er_to_rank2(n, mm, lambda12, clustering_from_string(regime), theta);
        Json j;
        j["spec"] = spec_to_json(c.spec);
        j["limits"] = {limit_to_json(c.limits[0]), limit_to_json(c.limits[1])};
        return j.dump();
      },
      py::arg("n"), py::arg("m"), py::arg("lambda12"), py::arg("regime") = "light", py::arg("theta") = 0.0);

  m.def(
      "run_experiment",
      [](const std::string& config) {
        const ExperimentConfig cfg = config_from_json(Json::parse(config));
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_regime_experiment(cfg);
        }
        return report_to_json(r).dump();
      },
      py::arg("config"));
}
