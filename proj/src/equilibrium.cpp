#include "stackre/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stackre/strategies.hpp"

namespace stackre {

namespace {

void check_range(double value, double hi, const char* name) {
    if (!(value >= 0.0 && value <= hi))
        throw std::invalid_argument(std::string(name) + " outside its admissible range");
}

void check_actions(double theta, double xi, const ContractTerms& terms) {
    check_range(theta, terms.theta_max, "theta");
    check_range(xi, terms.xi_bar, "xi");
}

// E[Z(T)^{b/(b-1)}] for the relevant kernel; equals 1 for log utility.
double terminal_moment(const Utility& u, const MarketParams& params, const DualShift& shift,
                       double horizon) {
    const double b = utility_exponent(u);
    return kernel_moment(params, shift, b / (b - 1.0), horizon);
}

// Closed-form y from E[Z I(y Z)] = wealth, where I(y) = y^{1/(b-1)} - a.
double multiplier_for(double wealth, const Utility& u, const MarketParams& params,
                      const DualShift& shift, double horizon) {
    const double b = utility_exponent(u);
    const double shifted = wealth + utility_shift(u) * std::exp(-params.r * horizon);
    if (!(shifted > 0.0)) throw std::domain_error("budget: wealth below the utility floor");
    return std::pow(shifted / terminal_moment(u, params, shift, horizon), b - 1.0);
}

double priced_terminal_wealth(double y, const Utility& u, const MarketParams& params,
                              const DualShift& shift, double horizon) {
    const double b = utility_exponent(u);
    return std::pow(y, 1.0 / (b - 1.0)) * terminal_moment(u, params, shift, horizon) -
           utility_shift(u) * std::exp(-params.r * horizon);
}

double value_for(double wealth, const Utility& u, const MarketParams& params,
                 const DualShift& shift, double horizon) {
    if (std::holds_alternative<LogUtility>(u)) {
        if (!(wealth > 0.0)) throw std::domain_error("value: wealth must be positive");
        const double g2 = shifted_market_price_of_risk(params, shift).squaredNorm();
        return std::log(wealth) + (params.r + 0.5 * g2) * horizon;
    }
    const double b = utility_exponent(u);
    const double shifted = wealth + utility_shift(u) * std::exp(-params.r * horizon);
    if (!(shifted > 0.0)) throw std::domain_error("value: wealth below the utility floor");
    return std::pow(terminal_moment(u, params, shift, horizon), 1.0 - b) * std::pow(shifted, b) / b;
}

void check_reinsurer_utility(const Utility& u) {
    validate(u);
    if (std::holds_alternative<HaraUtility>(u))
        throw std::invalid_argument("reinsurer: HARA utility is not supported");
}

}  // namespace

void ContractTerms::validate(const MarketParams& params) const {
    params.validate();
    contract.validate();
    if (!(insurer_wealth > 0.0)) throw std::invalid_argument("terms: v_I must be positive");
    if (!(reinsurer_wealth > 0.0)) throw std::invalid_argument("terms: v_R must be positive");
    if (!(theta_max >= 0.0)) throw std::invalid_argument("terms: theta_max must be non-negative");
    if (!(xi_bar > 0.0)) throw std::invalid_argument("terms: xi_bar must be positive");
    if (!(s1 > 0.0 && s2 > 0.0)) throw std::invalid_argument("terms: s1 and s2 must be positive");
    const double p0 = put_price(0.0, contract.benchmark0, contract, params).price;
    if (!(xi_bar * (1.0 + theta_max) * p0 < insurer_wealth))
        throw std::invalid_argument("terms: xi_bar must be below v_I / ((1 + theta_max) P(0))");
}

PutPrices initial_prices(const ContractTerms& terms, const MarketParams& params) {
    const auto& c = terms.contract;
    return {put_price(0.0, c.benchmark0, c, params).price,
            put_price_auxiliary(0.0, c.benchmark0, c, params, optimal_dual_shift(params))};
}

double critical_loading(const PutPrices& prices) {
    if (!(prices.p0 > 0.0)) return 0.0;
    return (prices.p0_aux - prices.p0) / prices.p0;
}

double selected_amount(const BestResponse& response) {
    if (const auto* u = std::get_if<Unique>(&response)) return u->xi;
    return std::get<Indifferent>(response).selected;
}

double insurer_effective_wealth(double xi, double theta, const ContractTerms& terms,
                                const MarketParams& params) {
    const PutPrices pr = initial_prices(terms, params);
    const double w = terms.insurer_wealth - xi * (1.0 + theta) * pr.p0 + xi * pr.p0_aux;
    if (!(w > 0.0)) throw std::domain_error("insurer: effective initial wealth is not positive");
    return w;
}

double insurer_lagrange(double xi, double theta, const Utility& utility,
                        const ContractTerms& terms, const MarketParams& params) {
    validate(utility);
    check_actions(theta, xi, terms);
    const double w = insurer_effective_wealth(xi, theta, terms, params);
    return multiplier_for(w, utility, params, optimal_dual_shift(params), terms.contract.maturity);
}

double insurer_budget_residual(double y, double xi, double theta, const Utility& utility,
                               const ContractTerms& terms, const MarketParams& params) {
    const PutPrices pr = initial_prices(terms, params);
    const double lhs = priced_terminal_wealth(y, utility, params, optimal_dual_shift(params),
                                              terms.contract.maturity) -
                       xi * pr.p0_aux;
    const double rhs = terms.insurer_wealth - xi * (1.0 + theta) * pr.p0;
    return (lhs - rhs) / rhs;
}

double insurer_value_nu(double xi, double theta, const Utility& utility,
                        const ContractTerms& terms, const MarketParams& params) {
    validate(utility);
    check_actions(theta, xi, terms);
    const double w = insurer_effective_wealth(xi, theta, terms, params);
    return value_for(w, utility, params, optimal_dual_shift(params), terms.contract.maturity);
}

BestResponse insurer_best_response(double theta, const Utility& utility,
                                   const ContractTerms& terms, const MarketParams& params) {
    validate(utility);
    check_range(theta, terms.theta_max, "theta");
    const PutPrices pr = initial_prices(terms, params);
    const double gain = pr.p0_aux - (1.0 + theta) * pr.p0;
    if (std::abs(gain) <= kIndifferenceTolerance * pr.p0)
        return Indifferent{0.0, terms.xi_bar, terms.xi_bar};
    if (gain > 0.0) return Unique{terms.xi_bar};
    return Unique{0.0};
}

double reinsurer_cushion(double theta, double xi, const ContractTerms& terms,
                         const MarketParams& params) {
    return terms.reinsurer_wealth + xi * theta * initial_prices(terms, params).p0;
}

double reinsurer_lagrange(double theta, double xi, const Utility& utility,
                          const ContractTerms& terms, const MarketParams& params) {
    check_reinsurer_utility(utility);
    check_actions(theta, xi, terms);
    return multiplier_for(reinsurer_cushion(theta, xi, terms, params), utility, params,
                          DualShift{}, terms.contract.maturity);
}

double reinsurer_budget_residual(double y, double theta, double xi, const Utility& utility,
                                 const ContractTerms& terms, const MarketParams& params) {
    check_reinsurer_utility(utility);
    const double rhs = reinsurer_cushion(theta, xi, terms, params);
    const double lhs =
        priced_terminal_wealth(y, utility, params, DualShift{}, terms.contract.maturity);
    return (lhs - rhs) / rhs;
}

double reinsurer_value(double theta, double xi, const Utility& utility,
                       const ContractTerms& terms, const MarketParams& params) {
    check_reinsurer_utility(utility);
    check_actions(theta, xi, terms);
    return value_for(reinsurer_cushion(theta, xi, terms, params), utility, params, DualShift{},
                     terms.contract.maturity);
}

StackelbergEquilibrium assemble_actions(double theta, double xi, const Utility& insurer,
                                        const Utility& reinsurer, const ContractTerms& terms,
                                        const MarketParams& params) {
    terms.validate(params);
    validate(insurer);
    check_reinsurer_utility(reinsurer);
    check_actions(theta, xi, terms);

    StackelbergEquilibrium eq;
    const PutPrices pr = initial_prices(terms, params);
    eq.theta_star = theta;
    eq.xi_star = xi;
    eq.p0 = pr.p0;
    eq.p0_aux = pr.p0_aux;
    eq.critical_loading = critical_loading(pr);
    eq.degenerate = !(pr.p0 > 0.0);
    eq.response = insurer_best_response(theta, insurer, terms, params);
    eq.y_I_star = insurer_lagrange(xi, theta, insurer, terms, params);
    eq.y_R_star = reinsurer_lagrange(theta, xi, reinsurer, terms, params);

    const MarketState s0 = initial_state(terms);
    eq.pi_I_0 = insurer_portfolio(s0, eq, insurer, terms, params).total;
    eq.pi_R_0 = reinsurer_portfolio(s0, eq, reinsurer, terms, params);
    return eq;
}

StackelbergEquilibrium solve_equilibrium(const Utility& insurer, const Utility& reinsurer,
                                         const ContractTerms& terms,
                                         const MarketParams& params) {
    terms.validate(params);
    const PutPrices pr = initial_prices(terms, params);
    double theta = terms.theta_max;
    if (pr.p0 > 0.0) theta = std::clamp(critical_loading(pr), 0.0, terms.theta_max);
    const BestResponse response = insurer_best_response(theta, insurer, terms, params);
    return assemble_actions(theta, selected_amount(response), insurer, reinsurer, terms, params);
}

}  // namespace stackre
