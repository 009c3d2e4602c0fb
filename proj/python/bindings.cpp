// Python bindings for the cevlab core. Arrays cross the boundary as numpy
// float64 vectors; errors map onto a matching exception hierarchy rooted at
// cevlab.Error.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "cevlab/app.hpp"
#include "cevlab/brownian.hpp"
#include "cevlab/errors.hpp"
#include "cevlab/experiments.hpp"
#include "cevlab/model.hpp"
#include "cevlab/schemes.hpp"

namespace py = pybind11;
using namespace cevlab;

namespace {

py::array_t<double> to_numpy(std::span<const double> v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

IncrementArray from_numpy(double dt, const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 1) throw py::value_error("increments must be one-dimensional");
    return IncrementArray(dt, std::vector<double>(arr.data(), arr.data() + arr.size()));
}

ExecPolicy policy(unsigned threads) { return ExecPolicy{threads}; }

}  // namespace

PYBIND11_MODULE(_cevlab, m) {
    m.doc() = "Positivity-preserving simulation of the mean-reverting CEV model";
    m.attr("__version__") = CEVLAB_VERSION;

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidParams>(m, "InvalidParams", base);
    py::register_exception<NegativeInner>(m, "NegativeInner", base);
    py::register_exception<AssumptionViolation>(m, "AssumptionViolation", base);
    py::register_exception<NonDivisibleFactor>(m, "NonDivisibleFactor", base);
    py::register_exception<GridMismatch>(m, "GridMismatch", base);
    py::register_exception<InfeasibleLevel>(m, "InfeasibleLevel", base);
    py::register_exception<InsufficientPoints>(m, "InsufficientPoints", base);
    py::register_exception<NonPositiveValue>(m, "NonPositiveValue", base);

    py::class_<CevParams>(m, "CevParams")
        .def(py::init([](double k, double l, double sigma, double a, double x0) {
                 return CevParams{k, l, sigma, a, x0};
             }),
             py::arg("k"), py::arg("l"), py::arg("sigma"), py::arg("a") = 0.75, py::arg("x0") = 1.0)
        .def_readwrite("k", &CevParams::k)
        .def_readwrite("l", &CevParams::l)
        .def_readwrite("sigma", &CevParams::sigma)
        .def_readwrite("a", &CevParams::a)
        .def_readwrite("x0", &CevParams::x0)
        .def("check", &CevParams::check)
        .def("valid", &CevParams::valid)
        .def("__repr__", [](const CevParams& p) {
            std::ostringstream os;
            os.precision(17);
            os << "CevParams(k=" << p.k << ", l=" << p.l << ", sigma=" << p.sigma << ", a=" << p.a
               << ", x0=" << p.x0 << ")";
            return os.str();
        });

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<double, std::size_t>(), py::arg("t_end"), py::arg("n_steps"))
        .def_property_readonly("t_end", &TimeGrid::t_end)
        .def_property_readonly("n_steps", &TimeGrid::n_steps)
        .def_property_readonly("dt", &TimeGrid::dt)
        .def("time", &TimeGrid::time);

    py::class_<AssumptionAReport>(m, "AssumptionAReport")
        .def_readonly("feasible", &AssumptionAReport::feasible)
        .def_readonly("drift_condition_ok", &AssumptionAReport::drift_condition_ok)
        .def_readonly("step_condition_ok", &AssumptionAReport::step_condition_ok)
        .def_readonly("max_step", &AssumptionAReport::max_step)
        .def_readonly("margin", &AssumptionAReport::margin);

    m.def("validate_assumption_a", &validate_assumption_a, py::arg("params"), py::arg("dt"));
    m.def("max_stable_step", &max_stable_step, py::arg("params"));
    m.def(
        "inner_value",
        [](double y, double dt, const CevParams& p) {
            const auto r = inner_value(y, dt, p);
            return py::make_tuple(r.value, r.clamped);
        },
        py::arg("y"), py::arg("dt"), py::arg("params"), "Returns (value, clamped).");
    m.def("analytic_mean", &analytic_mean, py::arg("params"), py::arg("t"));
    m.def("step_negativity_prob", &step_negativity_prob, py::arg("y"), py::arg("dt"), py::arg("params"));

    m.def(
        "sample_increments",
        [](std::uint64_t seed, std::uint64_t path, std::size_t n, double dt) {
            return to_numpy(sample_increments(StreamKey{seed, path}, n, dt).values());
        },
        py::arg("master_seed"), py::arg("path_index"), py::arg("n"), py::arg("dt"));
    m.def(
        "coarsen",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& inc, double dt,
           std::size_t factor) { return to_numpy(coarsen(from_numpy(dt, inc), factor).values()); },
        py::arg("increments"), py::arg("dt"), py::arg("factor"));

    py::enum_<SchemeId>(m, "Scheme")
        .value("SEMIDISCRETE", SchemeId::SemiDiscrete)
        .value("EULER_NAIVE", SchemeId::EulerNaive)
        .value("EULER_FULL_TRUNCATION", SchemeId::EulerFullTruncation)
        .value("EULER_REFLECTED", SchemeId::EulerReflected);

    m.def(
        "semidiscrete_step",
        [](double y, double dt, double dw, const CevParams& p) {
            const auto r = semidiscrete_step(y, dt, dw, p);
            return py::make_tuple(r.value, r.z_negative, r.clamped);
        },
        py::arg("y"), py::arg("dt"), py::arg("dw"), py::arg("params"),
        "Returns (value, z_negative, clamped).");
    m.def("euler_step", &euler_step, py::arg("scheme"), py::arg("x"), py::arg("dt"), py::arg("dw"),
          py::arg("params"));

    py::class_<PathResult>(m, "PathResult")
        .def_property_readonly("times", [](const PathResult& r) { return to_numpy(r.times); })
        .def_property_readonly("values", [](const PathResult& r) { return to_numpy(r.values); })
        .def_property_readonly("z_negative",
                               [](const PathResult& r) { return std::vector<bool>(r.z_negative); })
        .def_readonly("sign_flip_count", &PathResult::sign_flip_count)
        .def_readonly("clamp_count", &PathResult::clamp_count)
        .def_readonly("min_value", &PathResult::min_value);

    m.def(
        "simulate_path",
        [](SchemeId scheme, const CevParams& p, const TimeGrid& grid,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& inc) {
            const auto increments = from_numpy(grid.dt(), inc);
            py::gil_scoped_release release;
            return simulate_path(scheme, p, grid, increments);
        },
        py::arg("scheme"), py::arg("params"), py::arg("grid"), py::arg("increments"));

    py::class_<LevelSpec>(m, "LevelSpec")
        .def(py::init([](int ref, std::vector<int> exps, std::size_t n_paths, std::uint64_t seed) {
                 return LevelSpec{ref, std::move(exps), n_paths, seed};
             }),
             py::arg("ref_exponent") = 12, py::arg("test_exponents") = std::vector<int>{4, 5, 6, 7, 8, 9},
             py::arg("n_paths") = 10000, py::arg("master_seed") = 1)
        .def_readwrite("ref_exponent", &LevelSpec::ref_exponent)
        .def_readwrite("test_exponents", &LevelSpec::test_exponents)
        .def_readwrite("n_paths", &LevelSpec::n_paths)
        .def_readwrite("master_seed", &LevelSpec::master_seed);

    py::class_<LevelRecord>(m, "LevelRecord")
        .def_readonly("exponent", &LevelRecord::exponent)
        .def_readonly("dt", &LevelRecord::dt)
        .def_readonly("mse", &LevelRecord::mse)
        .def_readonly("rmse", &LevelRecord::rmse)
        .def_readonly("ci_halfwidth", &LevelRecord::ci_halfwidth);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("levels", &ConvergenceReport::levels)
        .def_readonly("fitted_order", &ConvergenceReport::fitted_order)
        .def_readonly("fit_intercept", &ConvergenceReport::fit_intercept)
        .def_readonly("fit_r2", &ConvergenceReport::fit_r2)
        .def_readonly("theoretical_order", &ConvergenceReport::theoretical_order)
        .def_readonly("max_coupling_discrepancy", &ConvergenceReport::max_coupling_discrepancy);

    m.def(
        "strong_error",
        [](const CevParams& p, SchemeId scheme, const LevelSpec& spec, double t_end, unsigned threads) {
            py::gil_scoped_release release;
            return strong_error(p, scheme, spec, t_end, policy(threads));
        },
        py::arg("params"), py::arg("scheme"), py::arg("spec"), py::arg("t_end") = 1.0, py::arg("threads") = 0);

    m.def(
        "fit_order",
        [](const std::vector<double>& dts, const std::vector<double>& rmses) {
            if (dts.size() != rmses.size()) throw py::value_error("dts and rmses differ in length");
            std::vector<ErrorPoint> pts;
            for (std::size_t i = 0; i < dts.size(); ++i) pts.push_back({dts[i], rmses[i]});
            const auto f = fit_order(pts);
            return py::make_tuple(f.slope, f.intercept, f.r2);
        },
        py::arg("dts"), py::arg("rmses"), "Returns (slope, intercept, r2).");

    py::class_<MomentReport>(m, "MomentReport")
        .def_readonly("sample_mean", &MomentReport::sample_mean)
        .def_readonly("sample_second_moment", &MomentReport::sample_second_moment)
        .def_readonly("se_mean", &MomentReport::se_mean)
        .def_readonly("se_second", &MomentReport::se_second)
        .def_readonly("analytic_mean", &MomentReport::analytic_mean)
        .def_readonly("abs_mean_error", &MomentReport::abs_mean_error);

    m.def(
        "moment_check",
        [](const CevParams& p, SchemeId scheme, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
           unsigned threads) {
            py::gil_scoped_release release;
            return moment_check(p, scheme, grid, n_paths, seed, policy(threads));
        },
        py::arg("params"), py::arg("scheme"), py::arg("grid"), py::arg("n_paths"), py::arg("seed"),
        py::arg("threads") = 0);

    py::class_<NegativityStats>(m, "NegativityStats")
        .def_readonly("total_steps", &NegativityStats::total_steps)
        .def_readonly("z_negative_events", &NegativityStats::z_negative_events)
        .def_readonly("clamp_events", &NegativityStats::clamp_events)
        .def_readonly("max_step_prob", &NegativityStats::max_step_prob)
        .def_readonly("min_visited_state", &NegativityStats::min_visited_state);

    m.def(
        "negativity_stats",
        [](const CevParams& p, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed, unsigned threads) {
            py::gil_scoped_release release;
            return negativity_stats(p, grid, n_paths, seed, policy(threads));
        },
        py::arg("params"), py::arg("grid"), py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 0);

    py::enum_<PayoffKind>(m, "Payoff")
        .value("EUROPEAN_CALL", PayoffKind::EuropeanCall)
        .value("EUROPEAN_PUT", PayoffKind::EuropeanPut)
        .value("ASIAN_ARITHMETIC_CALL", PayoffKind::AsianArithmeticCall);

    py::class_<PriceEstimate>(m, "PriceEstimate")
        .def_readonly("price", &PriceEstimate::price)
        .def_readonly("std_error", &PriceEstimate::std_error)
        .def_readonly("ci_halfwidth", &PriceEstimate::ci_halfwidth)
        .def_readonly("negative_terminal_fraction", &PriceEstimate::negative_terminal_fraction);

    m.def(
        "price_payoff",
        [](const CevParams& p, PayoffKind kind, double strike, const TimeGrid& grid, std::size_t n_paths,
           std::uint64_t seed, SchemeId scheme, unsigned threads) {
            py::gil_scoped_release release;
            return price_payoff(p, PayoffSpec{kind, strike}, grid, n_paths, seed, policy(threads), scheme);
        },
        py::arg("params"), py::arg("payoff"), py::arg("strike"), py::arg("grid"), py::arg("n_paths"),
        py::arg("seed"), py::arg("scheme") = SchemeId::SemiDiscrete, py::arg("threads") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli_main(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
