#pragma once

#include <istream>
#include <stdexcept>
#include <string>

#include "stackre/equilibrium.hpp"
#include "stackre/market.hpp"
#include "stackre/simulation.hpp"
#include "stackre/utility.hpp"

namespace stackre {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Everything one CLI invocation needs. Defaults reproduce the base case.
struct RunConfig {
    MarketParams market{};
    ContractTerms terms{};
    // pi_cm = auto: the insurer's Merton fraction in S1.
    bool pi_cm_auto = true;
    Utility insurer = PowerUtility{-9.0};
    Utility reinsurer = PowerUtility{-9.0};
    SimulationConfig simulation{1000000, 64, 20240101, false};

    // Resolves pi_cm = auto and checks every invariant; throws ConfigError.
    void finalize();
};

// INI-style text:
//   [market]     r, mu1, mu2, sigma1, sigma2, rho
//   [contract]   guarantee, horizon, pi_cm (number or auto), theta_max, xi_bar,
//                insurer_wealth, reinsurer_wealth, s1, s2
//   [utilities]  insurer, reinsurer = "power <b>" | "rra <1-b>" | "log" | "hara <a> <b>"
//   [simulation] paths, steps, seed, antithetic
// A trailing % divides by 100. Unknown sections or keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// "1.02%" -> 0.0102, "1.5" -> 1.5, "25bp" -> 0.0025. Throws ConfigError.
double parse_number(const std::string& text);

Utility parse_utility(const std::string& text);

}  // namespace stackre
