#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matchwelfare/analysis.hpp"
#include "matchwelfare/matching.hpp"
#include "matchwelfare/n3lab.hpp"
#include "matchwelfare/profiles.hpp"

namespace py = pybind11;
using namespace matchwelfare;

namespace {

ValuationProfile profile_from_py(const std::vector<std::vector<double>>& values,
                                 const std::string& normalization, bool allow_ties) {
  return make_profile(values, normalization_from_string(normalization), allow_ties);
}

py::dict result_to_py(const MechanismResult& r) {
  py::dict d;
  d["mechanism"] = r.mechanism;
  d["expected_welfare"] = r.expected_welfare;
  d["per_agent_utility"] = r.per_agent_utility;
  if (r.distribution) {
    d["probs"] = r.distribution->probs;
  }
  d["algorithm"] = r.method.algorithm;
  d["exact"] = r.method.kind == EvalMethod::Kind::Exact;
  if (r.method.kind == EvalMethod::Kind::MonteCarlo) {
    d["samples"] = r.method.samples;
    d["ci_radius"] = r.method.ci_radius;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "mechanism laboratory for one-sided matching without money";
  m.attr("__version__") = "0.1.0";

  py::class_<ValuationProfile>(m, "Profile")
      .def(py::init(&profile_from_py), py::arg("values"), py::arg("normalization") = "unit-range",
           py::arg("allow_ties") = false)
      .def_readonly("n", &ValuationProfile::n)
      .def_readonly("values", &ValuationProfile::values)
      .def_property_readonly("normalization",
                             [](const ValuationProfile& p) { return to_string(p.normalization); })
      .def("has_ties", &ValuationProfile::has_ties);

  m.def("validate", [](const ValuationProfile& p) {
    std::vector<py::dict> out;
    for (const auto& v : validate_profile(p)) {
      py::dict d;
      d["row"] = v.row;
      d["rule"] = v.rule;
      d["magnitude"] = v.magnitude;
      out.push_back(d);
    }
    return out;
  });

  m.def("social_welfare", [](const ValuationProfile& p, const std::vector<int>& assignment) {
    Matching mt;
    mt.assignment = assignment;
    return social_welfare(p, mt);
  });
  m.def("preference_order", &preference_order, py::arg("profile"), py::arg("agent"));

  m.def("optimal_matching", [](const ValuationProfile& p) {
    const OptResult r = optimal_matching(p);
    return py::make_tuple(r.matching.assignment, r.welfare);
  });

  m.def(
      "rp_exact",
      [](const ValuationProfile& p, bool size_guard) {
        RpExactOptions opts;
        opts.size_guard = size_guard;
        return result_to_py(rp_exact(p, opts));
      },
      py::arg("profile"), py::arg("size_guard") = true);
  m.def(
      "rp_montecarlo",
      [](const ValuationProfile& p, std::uint64_t samples, std::uint64_t seed) {
        return result_to_py(rp_montecarlo(p, samples, seed));
      },
      py::arg("profile"), py::arg("samples") = 1'000'000, py::arg("seed") = 1);
  m.def("uniform_mechanism",
        [](const ValuationProfile& p) { return result_to_py(uniform_mechanism(p)); });
  m.def("hybrid_mechanism",
        [](const ValuationProfile& p) { return result_to_py(hybrid_mechanism_exact(p)); });
  m.def("serial_dictatorship", [](const ValuationProfile& p, const std::vector<int>& order) {
    return serial_dictatorship(p, order).assignment;
  });
  m.def("cubic_lottery", [](double alpha) {
    const auto probs = cubic_lottery(alpha);
    return std::vector<double>(probs.begin(), probs.end());
  });

  m.def(
      "generate",
      [](const std::string& family, int n, int k, double eps, std::uint64_t seed) {
        return generate(GeneratorSpec{family, n, k, eps, seed});
      },
      py::arg("family"), py::arg("n") = 0, py::arg("k") = 0, py::arg("eps") = 0.01,
      py::arg("seed") = 1);
  m.def("random_profile", [](int n, const std::string& normalization, std::uint64_t seed) {
    return random_profile(n, normalization_from_string(normalization), seed);
  });
  m.def("is_quasicombinatorial", &is_quasicombinatorial, py::arg("profile"), py::arg("eps"));
  m.def(
      "break_ties",
      [](const ValuationProfile& p, const std::vector<int>& priority, double delta) {
        return break_ties(p, priority, delta);
      },
      py::arg("profile"), py::arg("priority"), py::arg("delta") = kDeltaB);
  m.def("unitsum_to_unitrange_embed", &unitsum_to_unitrange_embed);
  m.def("zeroone_to_unitrange", &zeroone_to_unitrange);

  m.def(
      "approximation_ratio",
      [](const ValuationProfile& p, const std::string& mech) {
        Mechanism m_ = mech == "uniform" ? make_uniform()
                       : mech == "hm"    ? make_hybrid()
                                         : make_rp();
        const RatioReport r = approximation_ratio_on(p, m_);
        return py::make_tuple(r.ratio, r.mech_welfare, r.opt_welfare);
      },
      py::arg("profile"), py::arg("mech") = "rp");

  m.def(
      "n3_sweep",
      [](const std::string& mech, double grid, int refine) {
        const auto sweep =
            n3::sweep_all_classes(n3::n3_mechanism_from_string(mech), grid, refine);
        py::dict d;
        d["min_ratio"] = sweep.global_min;
        d["class_index"] = sweep.global_class;
        d["argmin"] = sweep.global_argmin;
        std::vector<py::dict> classes;
        for (std::size_t i = 0; i < sweep.classes.size(); ++i) {
          py::dict c;
          c["index"] = sweep.classes[i].index;
          c["orbit_size"] = sweep.classes[i].orbit_size;
          c["ratio"] = sweep.per_class[i].ratio;
          c["ratio_extrapolated"] = sweep.per_class[i].ratio_extrapolated;
          c["argmin"] = sweep.per_class[i].argmin;
          classes.push_back(c);
        }
        d["classes"] = classes;
        return d;
      },
      py::arg("mech") = "rp", py::arg("grid") = 0.05, py::arg("refine") = 20);
}
