#include "potsim/error.hpp"
#include "potsim/experiments.hpp"
#include "potsim/interference.hpp"
#include "potsim/network.hpp"
#include "potsim/qlearning.hpp"
#include "potsim/waveform.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace potsim;

namespace {

FilterFamily family(const std::string& name)
{
    return parse_filter_family(name);
}

py::dict rows_to_dict(const ExperimentResult& r)
{
    py::list rows;
    for (const auto& row : r.rows) {
        py::dict d;
        d["grid_value"] = row.grid_value;
        d["filter"] = std::string(to_string(row.filter));
        d["mode"] = std::string(to_string(row.mode));
        d["metric"] = row.metric;
        d["mean"] = row.mean;
        d["ci95"] = row.ci95;
        d["drops"] = row.drops;
        rows.append(d);
    }
    py::dict out;
    out["rows"] = rows;
    out["config_hash"] = r.config_hash;
    out["converged"] = r.converged;
    out["warnings"] = r.warnings;
    out["csv"] = r.csv();
    return out;
}

} // namespace

PYBIND11_MODULE(_potsim, m)
{
    m.doc() = "POT interference simulator core";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterDomainError>(m, "ParameterDomainError", base.ptr());
    py::register_exception<ConfigurationError>(m, "ConfigurationError", base.ptr());
    py::register_exception<NumericalDegeneracyError>(m, "NumericalDegeneracyError", base.ptr());
    py::register_exception<UnavailablePolicyError>(m, "UnavailablePolicyError", base.ptr());
    py::register_exception<MissingArtifactError>(m, "MissingArtifactError", base.ptr());

    py::class_<PrototypeFilter>(m, "PrototypeFilter")
        .def_property_readonly("family", [](const PrototypeFilter& f) { return std::string(to_string(f.family)); })
        .def_readonly("dispersion", &PrototypeFilter::dispersion)
        .def_readonly("sample_rate", &PrototypeFilter::sample_rate)
        .def_readonly("span", &PrototypeFilter::span)
        .def_readonly("samples", &PrototypeFilter::samples)
        .def("energy", &PrototypeFilter::energy);

    m.def("make_filter", [](const std::string& name, double dispersion, int sample_rate) {
        return make_filter(family(name), dispersion, sample_rate);
    }, py::arg("family"), py::arg("dispersion"), py::arg("sample_rate") = 16);

    // delay in tau0, freq in 1/tau0
    m.def("ambiguity", &ambiguity_normalized, py::arg("tx"), py::arg("rx"), py::arg("delay"), py::arg("freq"));

    m.def("ambiguity_surface", [](const std::string& name, double dispersion, double extent, int points) {
        SurfaceGrid g;
        g.extent = extent;
        g.points = points;
        const auto s = export_ambiguity_surface(family(name), dispersion, g);
        py::dict d;
        d["delays"] = s.delays;
        d["freqs"] = s.freqs;
        d["magnitude"] = s.magnitude;
        return d;
    }, py::arg("family"), py::arg("dispersion"), py::arg("extent") = 3.0, py::arg("points") = 61);

    py::class_<InterferenceProfile>(m, "InterferenceProfile")
        .def(py::init([](double s, double si, double oi, double noise) {
            InterferenceProfile p;
            p.e_signal = s;
            p.e_self = si;
            p.e_cci = oi;
            p.noise_var = noise;
            return p;
        }), py::arg("e_signal"), py::arg("e_self") = 0.0, py::arg("e_cci") = 0.0, py::arg("noise_var") = 0.0)
        .def_readwrite("e_signal", &InterferenceProfile::e_signal)
        .def_readwrite("e_self", &InterferenceProfile::e_self)
        .def_readwrite("e_cci", &InterferenceProfile::e_cci)
        .def_readwrite("noise_var", &InterferenceProfile::noise_var)
        .def("sinr_db", [](const InterferenceProfile& p) { return sinr(p); })
        .def("multiuser_efficiency", [](const InterferenceProfile& p) { return multiuser_efficiency(p); })
        .def("outage", [](const InterferenceProfile& p, double t) { return outage(p, t); }, py::arg("threshold_db") = -6.0);

    m.def("update_aggressor_count", &update_aggressor_count, py::arg("count"), py::arg("sinr_before_db"),
          py::arg("sinr_after_db"));
    m.def("q_update", &q_update, py::arg("q_old"), py::arg("reward"), py::arg("max_next"), py::arg("beta"),
          py::arg("gamma"));
    m.def("reward", &reward, py::arg("capacity_now"), py::arg("capacity_prev"), py::arg("lambda1"));

    m.def("generate_scenario", [](int n, double area, double range, std::uint64_t seed) {
        return generate_scenario(n, area, range, seed).to_json();
    }, py::arg("num_links"), py::arg("area_side") = 1000.0, py::arg("max_link_range") = 100.0, py::arg("seed") = 0);

    m.def("config_hash", [](const std::string& json) { return config_hash(ExperimentConfig::from_json(json)); });

    m.def("run_experiment", [](const std::string& json, bool train_if_missing) {
        const auto config = ExperimentConfig::from_json(json);
        RunOptions o;
        o.train_if_missing = train_if_missing;
        ExperimentResult r;
        {
            py::gil_scoped_release release;
            r = run(config, o);
        }
        return rows_to_dict(r);
    }, py::arg("config_json"), py::arg("train_if_missing") = false);
}
