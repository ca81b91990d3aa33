#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stackre/equilibrium.hpp"
#include "stackre/market.hpp"
#include "stackre/simulation.hpp"
#include "stackre/utility.hpp"

namespace stackre {

// Raised when a root solve cannot be bracketed or does not converge.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a discount criterion has no solution in [0, 1].
class InfeasibleCriterion : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Party { Insurer, Reinsurer };

const char* to_string(Party party);

struct OptimalStrategy {};

// Fixed relative portfolio in (S1, S2), rebalanced continuously.
struct ConstantMix {
    Eigen::Vector2d pi = Eigen::Vector2d::Zero();
};

using InsurerStrategy = std::variant<OptimalStrategy, ConstantMix>;

struct ActionCombination {
    double theta_hat = 0.0;
    double xi_hat = 0.0;
    InsurerStrategy insurer{OptimalStrategy{}};

    void validate(const ContractTerms& terms) const;

    static ActionCombination at_equilibrium(const StackelbergEquilibrium& eq);
    // Equilibrium actions with the loading scaled by alpha.
    static ActionCombination discounted(const StackelbergEquilibrium& eq, double alpha);
    static ActionCombination without_reinsurance(InsurerStrategy strategy = OptimalStrategy{});
};

// Expected terminal utility of a party. `monte_carlo` is set when no closed
// form exists for the utility/strategy pair; `warning` then says why.
struct UtilityEvaluation {
    double value = 0.0;
    double std_error = 0.0;
    bool monte_carlo = false;
    std::string warning;
};

UtilityEvaluation expected_utility_closed_form(const ActionCombination& combination, Party party,
                                               const Utility& utility, const ContractTerms& terms,
                                               const MarketParams& params,
                                               const SimulationConfig& fallback = {});

struct WeucResult {
    double value = 0.0;
    Party party = Party::Insurer;
    bool closed_form = true;

    double basis_points() const { return value * 1e4; }
};

// Relative initial-wealth change that brings `alternative` to the expected
// utility of `reference`. Positive means the reference is better.
WeucResult weuc(const ActionCombination& reference, const ActionCombination& alternative,
                Party party, const Utility& utility, const ContractTerms& terms,
                const MarketParams& params, const SimulationConfig& fallback = {});

// Bracket and tolerance of the generic WEUC root solve.
inline constexpr double kWeucLower = -0.99;
inline constexpr double kWeucUpper = 10.0;
inline constexpr double kWeucTolerance = 1e-10;

struct WeucCap {
    double max_weuc = 0.0;  // relative, 25 bp = 0.0025
};
struct LossProbIncrease {
    double delta = 0.0;  // probability, 0.01 pp = 1e-4
};
struct MaxLossProb {
    double probability = 0.0;
};

using DiscountCriterion = std::variant<WeucCap, LossProbIncrease, MaxLossProb>;

inline constexpr double kDiscountTolerance = 1e-6;

// Discount factor alpha in [0, 1] meeting the criterion. Throws
// InfeasibleCriterion if none exists.
double discount_select(const DiscountCriterion& criterion, const StackelbergEquilibrium& eq,
                       const Utility& reinsurer, const ContractTerms& terms,
                       const MarketParams& params);

// (expected utility selling at loading alpha * theta_star, expected utility
// without selling).
std::pair<double, double> reinsurer_incentive(double alpha, const StackelbergEquilibrium& eq,
                                              const Utility& reinsurer,
                                              const ContractTerms& terms,
                                              const MarketParams& params);

// (mu1 - r) / ((1 - b) sigma1^2): the insurer's optimal weight in S1
// without reinsurance.
double insurer_merton_fraction(const Utility& insurer, const MarketParams& params);

enum class SweepParameter { RraInsurer, RraReinsurer, Rate, Horizon, Guarantee };

SweepParameter parse_sweep_parameter(const std::string& name);
const char* to_string(SweepParameter p);

struct SweepRow {
    double value = 0.0;
    double pi_cm = 0.0;
    StackelbergEquilibrium eq;
};

// One equilibrium per grid value. With `recompute_pi_cm` the benchmark
// weight follows the insurer's Merton fraction at every point.
std::vector<SweepRow> sensitivity_sweep(SweepParameter parameter, const std::vector<double>& grid,
                                        const Utility& insurer, const Utility& reinsurer,
                                        const ContractTerms& terms, const MarketParams& params,
                                        bool recompute_pi_cm = false);

struct BenefitCell {
    double rra = 0.0;
    double horizon = 0.0;
    double theta_star = 0.0;
    WeucResult weuc;
};

// Insurer WEUC of (alpha * theta_star, xi_bar) with optimal investment
// against `alternative` without reinsurance, over an (RRA_I, T) grid. The
// benchmark weight is the insurer's Merton fraction at each RRA.
std::vector<BenefitCell> insurer_benefit_surface(double alpha, const std::vector<double>& rra_grid,
                                                 const std::vector<double>& horizon_grid,
                                                 const InsurerStrategy& alternative,
                                                 const Utility& reinsurer,
                                                 const ContractTerms& terms,
                                                 const MarketParams& params);

}  // namespace stackre
