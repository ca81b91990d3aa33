#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stackre/analysis.hpp"
#include "stackre/config.hpp"
#include "stackre/equilibrium.hpp"
#include "stackre/option_pricing.hpp"
#include "stackre/reproduce.hpp"
#include "stackre/simulation.hpp"

namespace py = pybind11;
using namespace stackre;

PYBIND11_MODULE(_stackre, m) {
    m.doc() = "Stackelberg reinsurance equilibrium with a put on a constant-mix benchmark";

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init<>())
        .def_readwrite("r", &MarketParams::r)
        .def_readwrite("mu1", &MarketParams::mu1)
        .def_readwrite("mu2", &MarketParams::mu2)
        .def_readwrite("sigma1", &MarketParams::sigma1)
        .def_readwrite("sigma2", &MarketParams::sigma2)
        .def_readwrite("rho", &MarketParams::rho)
        .def("validate", &MarketParams::validate)
        .def("volatility", &MarketParams::volatility)
        .def("market_price_of_risk", &MarketParams::market_price_of_risk);

    py::class_<ReinsuranceContract>(m, "ReinsuranceContract")
        .def(py::init<>())
        .def_readwrite("guarantee", &ReinsuranceContract::guarantee)
        .def_readwrite("maturity", &ReinsuranceContract::maturity)
        .def_readwrite("pi_cm", &ReinsuranceContract::pi_cm)
        .def_readwrite("benchmark0", &ReinsuranceContract::benchmark0)
        .def("validate", &ReinsuranceContract::validate);

    py::class_<ContractTerms>(m, "ContractTerms")
        .def(py::init<>())
        .def_readwrite("insurer_wealth", &ContractTerms::insurer_wealth)
        .def_readwrite("reinsurer_wealth", &ContractTerms::reinsurer_wealth)
        .def_readwrite("theta_max", &ContractTerms::theta_max)
        .def_readwrite("xi_bar", &ContractTerms::xi_bar)
        .def_readwrite("s1", &ContractTerms::s1)
        .def_readwrite("s2", &ContractTerms::s2)
        .def_readwrite("contract", &ContractTerms::contract)
        .def("validate", &ContractTerms::validate, py::arg("market"));

    py::class_<PowerUtility>(m, "PowerUtility")
        .def(py::init([](double b) { PowerUtility u{b}; u.validate(); return u; }), py::arg("b"))
        .def_readonly("b", &PowerUtility::b)
        .def("__repr__", [](const PowerUtility& u) { return describe(u); });
    py::class_<LogUtility>(m, "LogUtility")
        .def(py::init<>())
        .def("__repr__", [](const LogUtility& u) { return describe(u); });
    py::class_<HaraUtility>(m, "HaraUtility")
        .def(py::init([](double a, double b) { HaraUtility u{a, b}; u.validate(); return u; }),
             py::arg("a"), py::arg("b"))
        .def_readonly("a", &HaraUtility::a)
        .def_readonly("b", &HaraUtility::b)
        .def("__repr__", [](const HaraUtility& u) { return describe(u); });
    m.def("power_from_rra", &power_from_rra, py::arg("rra"));
    m.def("parse_utility", &parse_utility, py::arg("text"));

    py::class_<StackelbergEquilibrium>(m, "StackelbergEquilibrium")
        .def_readonly("theta_star", &StackelbergEquilibrium::theta_star)
        .def_readonly("xi_star", &StackelbergEquilibrium::xi_star)
        .def_readonly("y_I_star", &StackelbergEquilibrium::y_I_star)
        .def_readonly("y_R_star", &StackelbergEquilibrium::y_R_star)
        .def_readonly("p0", &StackelbergEquilibrium::p0)
        .def_readonly("p0_aux", &StackelbergEquilibrium::p0_aux)
        .def_readonly("critical_loading", &StackelbergEquilibrium::critical_loading)
        .def_readonly("pi_I_0", &StackelbergEquilibrium::pi_I_0)
        .def_readonly("pi_R_0", &StackelbergEquilibrium::pi_R_0)
        .def_readonly("degenerate", &StackelbergEquilibrium::degenerate)
        .def_property_readonly("insurer_indifferent", [](const StackelbergEquilibrium& e) {
            return std::holds_alternative<Indifferent>(e.response);
        });

    m.def("solve_equilibrium", &solve_equilibrium, py::arg("insurer"), py::arg("reinsurer"),
          py::arg("terms"), py::arg("market"));
    m.def("assemble_actions", &assemble_actions, py::arg("theta"), py::arg("xi"), py::arg("insurer"),
          py::arg("reinsurer"), py::arg("terms"), py::arg("market"));
    m.def("insurer_value_nu", &insurer_value_nu, py::arg("xi"), py::arg("theta"), py::arg("utility"),
          py::arg("terms"), py::arg("market"));
    m.def("reinsurer_value", &reinsurer_value, py::arg("theta"), py::arg("xi"), py::arg("utility"),
          py::arg("terms"), py::arg("market"));
    m.def("insurer_merton_fraction", &insurer_merton_fraction, py::arg("insurer"), py::arg("market"));

    m.def("put_price",
          [](double t, double benchmark, const ReinsuranceContract& c, const MarketParams& p) {
              return put_price(t, benchmark, c, p).price;
          },
          py::arg("t"), py::arg("benchmark"), py::arg("contract"), py::arg("market"));
    m.def("put_price_auxiliary",
          [](double t, double benchmark, const ReinsuranceContract& c, const MarketParams& p) {
              return put_price_auxiliary(t, benchmark, c, p, optimal_dual_shift(p));
          },
          py::arg("t"), py::arg("benchmark"), py::arg("contract"), py::arg("market"));

    m.def("loss_probability", &loss_probability, py::arg("alpha"), py::arg("eq"),
          py::arg("reinsurer"), py::arg("terms"), py::arg("market"));

    py::enum_<Party>(m, "Party")
        .value("Insurer", Party::Insurer)
        .value("Reinsurer", Party::Reinsurer);

    py::class_<ActionCombination>(m, "ActionCombination")
        .def_readonly("theta_hat", &ActionCombination::theta_hat)
        .def_readonly("xi_hat", &ActionCombination::xi_hat)
        .def_static("at_equilibrium", &ActionCombination::at_equilibrium, py::arg("eq"))
        .def_static("discounted", &ActionCombination::discounted, py::arg("eq"), py::arg("alpha"))
        .def_static("without_reinsurance", [] { return ActionCombination::without_reinsurance(); })
        .def_static("constant_mix", [](double p1, double p2) {
            return ActionCombination::without_reinsurance(ConstantMix{Eigen::Vector2d(p1, p2)});
        }, py::arg("p1"), py::arg("p2"));

    m.def("weuc",
          [](const ActionCombination& ref, const ActionCombination& alt, Party party,
             const Utility& u, const ContractTerms& t, const MarketParams& p) {
              return weuc(ref, alt, party, u, t, p).value;
          },
          py::arg("reference"), py::arg("alternative"), py::arg("party"), py::arg("utility"),
          py::arg("terms"), py::arg("market"),
          "Relative initial-wealth change that brings the alternative to the reference's expected utility.");

    py::class_<WeucCap>(m, "WeucCap").def(py::init<double>(), py::arg("max_weuc"));
    py::class_<LossProbIncrease>(m, "LossProbIncrease").def(py::init<double>(), py::arg("delta"));
    py::class_<MaxLossProb>(m, "MaxLossProb").def(py::init<double>(), py::arg("probability"));
    m.def("discount_select", &discount_select, py::arg("criterion"), py::arg("eq"),
          py::arg("reinsurer"), py::arg("terms"), py::arg("market"));

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("n_paths", &SimulationConfig::n_paths)
        .def_readwrite("steps", &SimulationConfig::steps)
        .def_readwrite("seed", &SimulationConfig::seed)
        .def_readwrite("antithetic", &SimulationConfig::antithetic);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init([] { RunConfig c; c.finalize(); return c; }))
        .def_readwrite("market", &RunConfig::market)
        .def_readwrite("terms", &RunConfig::terms)
        .def_readwrite("insurer", &RunConfig::insurer)
        .def_readwrite("reinsurer", &RunConfig::reinsurer)
        .def_readwrite("simulation", &RunConfig::simulation);
    m.def("load_config", &load_config, py::arg("path"));

    m.def("verify_all",
          [](const RunConfig& c) {
              const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
              py::list out;
              for (const auto& i : verify_all(eq, c.insurer, c.reinsurer, c.terms, c.market, c.simulation).items)
                  out.append(py::dict(py::arg("name") = i.name, py::arg("closed_form") = i.closed_form,
                                      py::arg("monte_carlo") = i.mc.mean,
                                      py::arg("std_error") = i.mc.std_error, py::arg("pass") = i.pass));
              return out;
          },
          py::arg("config"));

    m.def("reproduce_paper", [](const RunConfig& c) {
        py::list out;
        for (const auto& ch : reproduce_paper(c))
            out.append(py::dict(py::arg("id") = ch.id, py::arg("value") = ch.value,
                                py::arg("target") = ch.target, py::arg("tolerance") = ch.tolerance,
                                py::arg("unit") = ch.unit, py::arg("pass") = ch.pass));
        return out;
    }, py::arg("config"));
}
