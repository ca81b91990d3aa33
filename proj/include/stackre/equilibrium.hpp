#pragma once

#include <variant>

#include <Eigen/Dense>

#include "stackre/market.hpp"
#include "stackre/option_pricing.hpp"
#include "stackre/utility.hpp"

namespace stackre {

struct ContractTerms {
    double insurer_wealth = 100.0;
    double reinsurer_wealth = 100.0;
    double theta_max = 0.5;
    double xi_bar = 1.5;
    double s1 = 1.0;
    double s2 = 1.0;
    ReinsuranceContract contract{};

    // Also enforces xi_bar < v_I / ((1 + theta_max) P(0)), so the insurer can
    // always afford the full amount and xi_max = xi_bar.
    void validate(const MarketParams& params) const;
};

// Fair put prices at time 0 under the original and the auxiliary kernel.
struct PutPrices {
    double p0 = 0.0;
    double p0_aux = 0.0;
};

PutPrices initial_prices(const ContractTerms& terms, const MarketParams& params);

// (P_aux - P(0)) / P(0), the loading at which the insurer is indifferent.
double critical_loading(const PutPrices& prices);

struct Unique {
    double xi = 0.0;
};

// Every amount in [lower, upper] is optimal; `selected` is the one that is
// best for the reinsurer.
struct Indifferent {
    double lower = 0.0;
    double upper = 0.0;
    double selected = 0.0;
};

using BestResponse = std::variant<Unique, Indifferent>;

double selected_amount(const BestResponse& response);

// Relative tolerance (times P(0)) of the indifference comparison.
inline constexpr double kIndifferenceTolerance = 1e-12;

// v_I - xi (1 + theta) P(0) + xi P_aux: the wealth the insurer optimises in
// the auxiliary market. Throws std::domain_error if not positive.
double insurer_effective_wealth(double xi, double theta, const ContractTerms& terms,
                                const MarketParams& params);

double insurer_lagrange(double xi, double theta, const Utility& utility,
                        const ContractTerms& terms, const MarketParams& params);

// Relative residual of the insurer's budget constraint
//   E[Z_aux(T) (I(y Z_aux(T)) - xi P(T))] = v_I - xi (1 + theta) P(0)
// evaluated in closed form at multiplier y.
double insurer_budget_residual(double y, double xi, double theta, const Utility& utility,
                               const ContractTerms& terms, const MarketParams& params);

// Expected terminal utility nu(xi) of the insurer.
double insurer_value_nu(double xi, double theta, const Utility& utility,
                        const ContractTerms& terms, const MarketParams& params);

BestResponse insurer_best_response(double theta, const Utility& utility,
                                   const ContractTerms& terms, const MarketParams& params);

// Reinsurer cushion v_R + xi theta P(0).
double reinsurer_cushion(double theta, double xi, const ContractTerms& terms,
                         const MarketParams& params);

// Power or log only; HARA throws std::invalid_argument.
double reinsurer_lagrange(double theta, double xi, const Utility& utility,
                          const ContractTerms& terms, const MarketParams& params);

double reinsurer_budget_residual(double y, double theta, double xi, const Utility& utility,
                                 const ContractTerms& terms, const MarketParams& params);

// Expected terminal utility kappa of the reinsurer after paying the put.
double reinsurer_value(double theta, double xi, const Utility& utility,
                       const ContractTerms& terms, const MarketParams& params);

struct StackelbergEquilibrium {
    double theta_star = 0.0;
    double xi_star = 0.0;
    double y_I_star = 0.0;
    double y_R_star = 0.0;
    double p0 = 0.0;
    double p0_aux = 0.0;
    double critical_loading = 0.0;
    Eigen::Vector2d pi_I_0 = Eigen::Vector2d::Zero();
    Eigen::Vector2d pi_R_0 = Eigen::Vector2d::Zero();
    BestResponse response = Unique{};
    // Set when P(0) = 0: the contract is worthless, theta_star is theta_max
    // and xi_star carries no information.
    bool degenerate = false;
};

// Both parties' optimal investment given fixed contract actions (theta, xi).
// Used for the equilibrium itself and for off-equilibrium comparisons.
StackelbergEquilibrium assemble_actions(double theta, double xi, const Utility& insurer,
                                        const Utility& reinsurer, const ContractTerms& terms,
                                        const MarketParams& params);

StackelbergEquilibrium solve_equilibrium(const Utility& insurer, const Utility& reinsurer,
                                         const ContractTerms& terms,
                                         const MarketParams& params);

}  // namespace stackre
