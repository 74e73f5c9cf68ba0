#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gtp/diagnostics.hpp"
#include "gtp/errors.hpp"
#include "gtp/experiment.hpp"
#include "gtp/ladder.hpp"
#include "gtp/measure.hpp"
#include "gtp/rng.hpp"
#include "gtp/single_hedge.hpp"

namespace py = pybind11;

namespace {

// Opaque holder so Python sees one hedge type.
struct Hedge {
    gtp::HedgeKind kind;
};

py::dict report_dict(const gtp::SingleHedgeReport& r) {
    py::dict d;
    d["growth"] = gtp::to_string(r.growth.status);
    d["shape"] = gtp::to_string(r.shape.status);
    d["summable"] = gtp::to_string(r.summable.status);
    d["linear_ratio_increasing"] = r.linear_ratio.increasing;
    d["square_ratio_monotone"] = r.square_ratio.monotone();
    d["usable"] = r.usable();
    d["summary"] = r.summary();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Betting-game simulations with hedges (C++ core)";

    py::register_exception<gtp::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<gtp::PricingError>(m, "PricingError", PyExc_ValueError);
    py::register_exception<gtp::ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

    py::class_<Hedge>(m, "Hedge")
        .def_static("power", [](double p) { return Hedge{gtp::PowerHedge{p}}; }, py::arg("exponent"))
        .def_static("call", [](double k) { return Hedge{gtp::Call{k}}; }, py::arg("strike"))
        .def_static("powered_call", [](double r, double level) { return Hedge{gtp::PoweredCall{r, level}}; },
                    py::arg("r"), py::arg("level"))
        .def_static("bull_spread", [](double r, std::size_t k) { return Hedge{gtp::BullSpread{r, k}}; },
                    py::arg("r"), py::arg("k"))
        .def_static("unit", [] { return Hedge{gtp::UnitPayoff{}}; })
        .def_static("x_log2", [] { return Hedge{gtp::GeneralSymmetric::linear_log_squared()}; })
        .def_static("x_log1p", [] { return Hedge{gtp::GeneralSymmetric::linear_log()}; })
        .def_static("tabulated",
                    [](std::vector<double> x, std::vector<double> y) {
                        return Hedge{gtp::GeneralSymmetric::tabulated(std::move(x), std::move(y))};
                    },
                    py::arg("x"), py::arg("y"))
        .def("__call__", [](const Hedge& h, double x) { return gtp::eval_hedge(h.kind, x); })
        .def("__repr__", [](const Hedge& h) { return "Hedge(" + gtp::describe(h.kind) + ")"; });

    py::class_<gtp::PricingMeasure>(m, "PricingMeasure")
        .def_static("exponential", &gtp::PricingMeasure::exponential, py::arg("rate"))
        .def_static("pareto", &gtp::PricingMeasure::pareto, py::arg("tail_index"), py::arg("scale"))
        .def_static("uniform", &gtp::PricingMeasure::uniform, py::arg("points"))
        .def_static("discrete", &gtp::PricingMeasure::discrete, py::arg("points"), py::arg("weights"))
        .def("price", [](const gtp::PricingMeasure& pm, const Hedge& h) { return gtp::price_hedge(pm, h.kind); })
        .def("price_by_quadrature",
             [](const gtp::PricingMeasure& pm, const Hedge& h) { return gtp::price_by_quadrature(pm, h.kind); })
        .def("has_moment", &gtp::PricingMeasure::has_moment)
        .def("sample", &gtp::PricingMeasure::sample, py::arg("u_magnitude"), py::arg("u_sign"))
        .def("__repr__", &gtp::PricingMeasure::describe);

    m.def(
        "ladder_prices",
        [](const gtp::PricingMeasure& pm, const std::string& family, double r, std::size_t depth) {
            gtp::LadderFamily f = family == "calls"      ? gtp::LadderFamily::calls()
                                  : family == "powered"  ? gtp::LadderFamily::powered(r)
                                  : family == "root_strike" ? gtp::LadderFamily::root_strike(r)
                                  : throw gtp::ConfigError("family must be calls, powered or root_strike");
            return gtp::build_ladder(pm, f, depth).prices();
        },
        py::arg("measure"), py::arg("family") = "calls", py::arg("r") = 1.0, py::arg("depth") = 64,
        "Prices nu_0..nu_depth of a call-type ladder.");

    m.def(
        "check_coherence",
        [](std::vector<double> prices, double tol) {
            const gtp::PriceLadder l(gtp::LadderFamily::calls(), std::move(prices));
            return gtp::check_coherence(l, tol).summary();
        },
        py::arg("prices"), py::arg("tol") = 1e-6);

    m.def(
        "validate_single_hedge", [](const Hedge& h, double c) { return report_dict(gtp::validate_single_hedge(h.kind, c)); },
        py::arg("hedge"), py::arg("c") = 0.0);

    m.def("upcrossing_count", [](std::vector<double> k, double a, double b) { return gtp::upcrossing_count(k, a, b); },
          py::arg("series"), py::arg("a"), py::arg("b"));

    m.def(
        "wilson_interval",
        [](std::size_t s, std::size_t n, double conf) {
            const auto i = gtp::wilson_interval(s, n, conf);
            return py::make_tuple(i.lo, i.hi);
        },
        py::arg("successes"), py::arg("trials"), py::arg("confidence") = 0.99);

    m.def(
        "philox_block",
        [](std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t lane) {
            const auto b = gtp::CounterRng(seed, stream).block(counter, lane);
            return std::vector<std::uint64_t>(b.begin(), b.end());
        },
        py::arg("seed"), py::arg("stream"), py::arg("counter"), py::arg("lane") = 0);

    m.def(
        "run_config",
        [](const std::string& json_text, const std::filesystem::path& out_dir) {
            const auto cfg = gtp::parse_config(json_text);
            gtp::ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = gtp::run_experiment(cfg, out_dir);
            }
            py::dict d;
            d["name"] = res.name;
            d["status"] = gtp::to_string(res.status);
            d["exit_code"] = static_cast<int>(res.status);
            d["message"] = res.message;
            py::list seeds;
            for (const auto& s : res.seeds) {
                py::dict e;
                e["seed"] = s.seed;
                e["rounds"] = s.rounds;
                e["final_capital"] = s.final_capital;
                e["min_capital"] = s.min_capital;
                e["max_capital"] = s.max_capital;
                e["violation_round"] = s.violation ? py::cast(s.violation->round) : py::none();
                e["saturated_round"] = s.saturated ? py::cast(*s.saturated) : py::none();
                seeds.append(e);
            }
            d["seeds"] = seeds;
            if (res.doob) {
                d["doob_estimate"] = res.doob->estimate;
                d["doob_ci"] = py::make_tuple(res.doob->ci.lo, res.doob->ci.hi);
                d["doob_passed"] = res.doob->passed;
            }
            return d;
        },
        py::arg("config_json"), py::arg("out_dir"),
        "Run one experiment config (JSON text); artifacts go to out_dir.");

    m.attr("rng_name") = std::string(gtp::kRngName);
    m.attr("config_schema_version") = gtp::kConfigSchemaVersion;
}
