#include "stackre/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "stackre/option_pricing.hpp"

namespace stackre {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Expected utility as a function of the party's initial wealth, with a
// closed-form inverse when one exists.
struct ValueCurve {
    std::function<double(double)> eu;
    std::optional<std::function<double(double)>> inverse;
    bool monte_carlo = false;
    std::string warning;
};

// Value (1/b) m^{1-b} (w + a e^{-rT})^b, or ln w + (r + |g|^2/2) T for log,
// of optimally invested wealth w, and its inverse.
struct OptimalValue {
    Utility u;
    double moment = 1.0;  // E[Z(T)^{b/(b-1)}]
    double log_drift = 0.0;
    double floor = 0.0;   // a e^{-rT}

    OptimalValue(const Utility& utility, const MarketParams& params, const DualShift& shift,
                 double horizon)
        : u(utility) {
        const double b = utility_exponent(u);
        if (b != 0.0) moment = kernel_moment(params, shift, b / (b - 1.0), horizon);
        const double g2 = shifted_market_price_of_risk(params, shift).squaredNorm();
        log_drift = (params.r + 0.5 * g2) * horizon;
        floor = utility_shift(u) * std::exp(-params.r * horizon);
    }

    double operator()(double w) const {
        if (std::holds_alternative<LogUtility>(u)) {
            if (!(w > 0.0)) throw std::domain_error("value: wealth must be positive");
            return std::log(w) + log_drift;
        }
        const double b = utility_exponent(u);
        if (!(w + floor > 0.0)) throw std::domain_error("value: wealth below the utility floor");
        return std::pow(moment, 1.0 - b) * std::pow(w + floor, b) / b;
    }

    double inverse(double value) const {
        if (std::holds_alternative<LogUtility>(u)) return std::exp(value - log_drift);
        const double b = utility_exponent(u);
        return std::pow(b * value / std::pow(moment, 1.0 - b), 1.0 / b) - floor;
    }
};

ValueCurve reinsurer_curve(const ActionCombination& c, const Utility& u, const ContractTerms& terms,
                           const MarketParams& params) {
    if (std::holds_alternative<HaraUtility>(u))
        throw std::invalid_argument("reinsurer: HARA utility is not supported");
    const double p0 = initial_prices(terms, params).p0;
    const double premium_gain = c.xi_hat * c.theta_hat * p0;
    const OptimalValue value(u, params, DualShift{}, terms.contract.maturity);
    ValueCurve curve;
    curve.eu = [=](double v) { return value(v + premium_gain); };
    curve.inverse = [=](double target) { return value.inverse(target) - premium_gain; };
    return curve;
}

ValueCurve insurer_optimal_curve(const ActionCombination& c, const Utility& u,
                                 const ContractTerms& terms, const MarketParams& params) {
    const PutPrices pr = initial_prices(terms, params);
    const double net = c.xi_hat * (pr.p0_aux - (1.0 + c.theta_hat) * pr.p0);
    const OptimalValue value(u, params, optimal_dual_shift(params), terms.contract.maturity);
    ValueCurve curve;
    curve.eu = [=](double v) {
        if (!(v + net > 0.0)) throw std::domain_error("insurer: effective initial wealth is not positive");
        return value(v + net);
    };
    curve.inverse = [=](double target) { return value.inverse(target) - net; };
    return curve;
}

ValueCurve insurer_constant_mix_curve(const ActionCombination& c, const Eigen::Vector2d& pi,
                                      const Utility& u, const ContractTerms& terms,
                                      const MarketParams& params, const SimulationConfig& fallback) {
    const double horizon = terms.contract.maturity;
    const Eigen::Vector2d vol = params.volatility().transpose() * pi;
    const double growth = params.r + pi.dot(params.excess_return()) - 0.5 * vol.squaredNorm();
    const double var = vol.squaredNorm() * horizon;
    ValueCurve curve;

    if (c.xi_hat == 0.0 && std::holds_alternative<PowerUtility>(u)) {
        const double b = utility_exponent(u);
        const double factor = std::exp(b * growth * horizon + 0.5 * b * b * var);
        curve.eu = [=](double v) {
            if (!(v > 0.0)) throw std::domain_error("constant mix: wealth must be positive");
            return std::pow(v, b) * factor / b;
        };
        curve.inverse = [=](double target) { return std::pow(b * target / factor, 1.0 / b); };
        return curve;
    }
    if (c.xi_hat == 0.0 && std::holds_alternative<LogUtility>(u)) {
        curve.eu = [=](double v) {
            if (!(v > 0.0)) throw std::domain_error("constant mix: wealth must be positive");
            return std::log(v) + growth * horizon;
        };
        curve.inverse = [=](double target) { return std::exp(target - growth * horizon); };
        return curve;
    }

    // No closed form: common random numbers over one exact step, so the
    // estimate stays monotone in initial wealth.
    fallback.validate();
    const auto& k = terms.contract;
    const PathEnsemble ens = simulate(params, uniform_grid(horizon, 1), k.pi_cm,
                                      InitialLevels{terms.s1, terms.s2, k.benchmark0},
                                      fallback.ensemble_options());
    auto growth_factor = std::make_shared<std::vector<double>>(ens.n_paths());
    auto put_leg = std::make_shared<std::vector<double>>(ens.n_paths());
    for (std::size_t p = 0; p < ens.n_paths(); ++p) {
        (*growth_factor)[p] = std::exp(growth * horizon + vol(0) * ens.w1(p, 1) + vol(1) * ens.w2(p, 1));
        (*put_leg)[p] = c.xi_hat * std::max(k.guarantee - ens.benchmark(p, 1), 0.0);
    }
    const double initial_premium = c.xi_hat * (1.0 + c.theta_hat) * initial_prices(terms, params).p0;
    const bool antithetic = ens.antithetic();
    curve.eu = [=](double v) {
        const double invested = v - initial_premium;
        if (!(invested > 0.0)) throw std::domain_error("constant mix: invested wealth must be positive");
        std::vector<double> samples(growth_factor->size());
        for (std::size_t p = 0; p < samples.size(); ++p)
            samples[p] = evaluate(u, invested * (*growth_factor)[p] + (*put_leg)[p]);
        return estimate(samples, antithetic).mean;
    };
    curve.monte_carlo = true;
    std::ostringstream os;
    os << "no closed form for " << describe(u) << " with a constant-mix strategy"
       << (c.xi_hat > 0.0 ? " and reinsurance" : "") << "; using Monte Carlo with "
       << fallback.n_paths << " paths";
    curve.warning = os.str();
    return curve;
}

ValueCurve value_curve(const ActionCombination& c, Party party, const Utility& u,
                       const ContractTerms& terms, const MarketParams& params,
                       const SimulationConfig& fallback) {
    validate(u);
    c.validate(terms);
    if (party == Party::Reinsurer) return reinsurer_curve(c, u, terms, params);
    if (const auto* mix = std::get_if<ConstantMix>(&c.insurer))
        return insurer_constant_mix_curve(c, mix->pi, u, terms, params, fallback);
    return insurer_optimal_curve(c, u, terms, params);
}

double party_wealth(Party party, const ContractTerms& terms) {
    return party == Party::Insurer ? terms.insurer_wealth : terms.reinsurer_wealth;
}

// Smallest alpha in [0, 1] with g(alpha) <= 0 for g decreasing.
template <class G>
double solve_decreasing(G&& g) {
    if (g(0.0) <= 0.0) return 0.0;
    if (g(1.0) > 0.0) throw InfeasibleCriterion("discount criterion not attainable at alpha = 1");
    std::uintmax_t max_iter = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 0.1 * kDiscountTolerance; };
    try {
        const auto r = boost::math::tools::toms748_solve(g, 0.0, 1.0, tol, max_iter);
        return 0.5 * (r.first + r.second);
    } catch (const std::exception& ex) {
        throw NumericalFailure(std::string("discount root solve failed: ") + ex.what());
    }
}

}  // namespace

const char* to_string(Party party) {
    return party == Party::Insurer ? "insurer" : "reinsurer";
}

void ActionCombination::validate(const ContractTerms& terms) const {
    if (!(theta_hat >= 0.0 && theta_hat <= terms.theta_max))
        throw std::invalid_argument("combination: theta outside [0, theta_max]");
    if (!(xi_hat >= 0.0 && xi_hat <= terms.xi_bar))
        throw std::invalid_argument("combination: xi outside [0, xi_bar]");
    if (const auto* mix = std::get_if<ConstantMix>(&insurer); mix && !mix->pi.allFinite())
        throw std::invalid_argument("combination: constant-mix weights must be finite");
}

ActionCombination ActionCombination::at_equilibrium(const StackelbergEquilibrium& eq) {
    return {eq.theta_star, eq.xi_star, OptimalStrategy{}};
}

ActionCombination ActionCombination::discounted(const StackelbergEquilibrium& eq, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    return {alpha * eq.theta_star, eq.xi_star, OptimalStrategy{}};
}

ActionCombination ActionCombination::without_reinsurance(InsurerStrategy strategy) {
    return {0.0, 0.0, strategy};
}

UtilityEvaluation expected_utility_closed_form(const ActionCombination& combination, Party party,
                                               const Utility& utility, const ContractTerms& terms,
                                               const MarketParams& params,
                                               const SimulationConfig& fallback) {
    const ValueCurve curve = value_curve(combination, party, utility, terms, params, fallback);
    UtilityEvaluation out;
    out.monte_carlo = curve.monte_carlo;
    out.warning = curve.warning;
    if (!curve.monte_carlo) {
        out.value = curve.eu(party_wealth(party, terms));
        return out;
    }
    // Re-run the estimator to expose its standard error.
    const auto& k = terms.contract;
    const auto& mix = std::get<ConstantMix>(combination.insurer);
    const PathEnsemble ens = simulate(params, uniform_grid(k.maturity, 1), k.pi_cm,
                                      InitialLevels{terms.s1, terms.s2, k.benchmark0},
                                      fallback.ensemble_options());
    const Eigen::Vector2d vol = params.volatility().transpose() * mix.pi;
    const double growth = params.r + mix.pi.dot(params.excess_return()) - 0.5 * vol.squaredNorm();
    const double invested = terms.insurer_wealth - combination.xi_hat * (1.0 + combination.theta_hat) *
                                                       initial_prices(terms, params).p0;
    const EstimateWithError e = expected_utility_mc(ens, [&](const PathEnsemble& s, std::size_t p) {
        const double x = invested * std::exp(growth * k.maturity + vol(0) * s.w1(p, 1) + vol(1) * s.w2(p, 1)) +
                         combination.xi_hat * std::max(k.guarantee - s.benchmark(p, 1), 0.0);
        return evaluate(utility, x);
    });
    out.value = e.mean;
    out.std_error = e.std_error;
    return out;
}

WeucResult weuc(const ActionCombination& reference, const ActionCombination& alternative,
                Party party, const Utility& utility, const ContractTerms& terms,
                const MarketParams& params, const SimulationConfig& fallback) {
    const double v = party_wealth(party, terms);
    const ValueCurve ref = value_curve(reference, party, utility, terms, params, fallback);
    const ValueCurve alt = value_curve(alternative, party, utility, terms, params, fallback);
    const double target = ref.eu(v);

    WeucResult out;
    out.party = party;
    if (alt.inverse) {
        out.value = (*alt.inverse)(target) / v - 1.0;
        out.closed_form = true;
        return out;
    }

    auto gap = [&](double w) {
        try {
            return alt.eu(v * (1.0 + w)) - target;
        } catch (const std::domain_error&) {
            return kNegInf;
        }
    };
    const double lo = gap(kWeucLower);
    const double hi = gap(kWeucUpper);
    if (!(lo <= 0.0 && hi >= 0.0)) {
        std::ostringstream os;
        os << "weuc: root not bracketed in [" << kWeucLower << ", " << kWeucUpper << "]";
        throw NumericalFailure(os.str());
    }
    auto tol = [](double a, double b) { return std::abs(b - a) <= kWeucTolerance; };
    const auto r = boost::math::tools::bisect(gap, kWeucLower, kWeucUpper, tol);
    out.value = 0.5 * (r.first + r.second);
    out.closed_form = false;
    return out;
}

double discount_select(const DiscountCriterion& criterion, const StackelbergEquilibrium& eq,
                       const Utility& reinsurer, const ContractTerms& terms,
                       const MarketParams& params) {
    if (const auto* cap = std::get_if<WeucCap>(&criterion)) {
        if (!(cap->max_weuc >= 0.0)) throw InfeasibleCriterion("WEUC cap must be non-negative");
        const ActionCombination ref = ActionCombination::at_equilibrium(eq);
        return solve_decreasing([&](double alpha) {
            return weuc(ref, ActionCombination::discounted(eq, alpha), Party::Reinsurer, reinsurer,
                        terms, params)
                       .value -
                   cap->max_weuc;
        });
    }
    auto q = [&](double alpha) { return loss_probability(alpha, eq, reinsurer, terms, params); };
    double target = 0.0;
    if (const auto* inc = std::get_if<LossProbIncrease>(&criterion)) {
        if (!(inc->delta >= 0.0)) throw InfeasibleCriterion("loss-probability increase must be non-negative");
        target = q(1.0) + inc->delta;
    } else {
        target = std::get<MaxLossProb>(criterion).probability;
        if (!(target >= q(1.0))) {
            std::ostringstream os;
            os << "maximum loss probability " << target << " is below Q(1) = " << q(1.0);
            throw InfeasibleCriterion(os.str());
        }
    }
    return solve_decreasing([&](double alpha) { return q(alpha) - target; });
}

std::pair<double, double> reinsurer_incentive(double alpha, const StackelbergEquilibrium& eq,
                                              const Utility& reinsurer,
                                              const ContractTerms& terms,
                                              const MarketParams& params) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    return {reinsurer_value(alpha * eq.theta_star, eq.xi_star, reinsurer, terms, params),
            reinsurer_value(0.0, 0.0, reinsurer, terms, params)};
}

double insurer_merton_fraction(const Utility& insurer, const MarketParams& params) {
    const double b = utility_exponent(insurer);
    return (params.mu1 - params.r) / ((1.0 - b) * params.sigma1 * params.sigma1);
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "rra_i" || name == "RRA_I") return SweepParameter::RraInsurer;
    if (name == "rra_r" || name == "RRA_R") return SweepParameter::RraReinsurer;
    if (name == "r") return SweepParameter::Rate;
    if (name == "T" || name == "horizon") return SweepParameter::Horizon;
    if (name == "G_T" || name == "guarantee") return SweepParameter::Guarantee;
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::RraInsurer: return "rra_i";
        case SweepParameter::RraReinsurer: return "rra_r";
        case SweepParameter::Rate: return "r";
        case SweepParameter::Horizon: return "T";
        case SweepParameter::Guarantee: return "G_T";
    }
    return "?";
}

namespace {

Utility with_rra(const Utility& u, double rra) {
    if (!(rra > 0.0)) throw std::invalid_argument("relative risk aversion must be positive");
    if (rra == 1.0) {
        if (std::holds_alternative<HaraUtility>(u))
            throw std::invalid_argument("hara utility with b = 0 is not supported");
        return LogUtility{};
    }
    if (const auto* h = std::get_if<HaraUtility>(&u)) return HaraUtility{h->a, 1.0 - rra};
    return PowerUtility{1.0 - rra};
}

}  // namespace

std::vector<SweepRow> sensitivity_sweep(SweepParameter parameter, const std::vector<double>& grid,
                                        const Utility& insurer, const Utility& reinsurer,
                                        const ContractTerms& terms, const MarketParams& params,
                                        bool recompute_pi_cm) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double value : grid) {
        Utility u_i = insurer;
        Utility u_r = reinsurer;
        ContractTerms t = terms;
        MarketParams m = params;
        switch (parameter) {
            case SweepParameter::RraInsurer: u_i = with_rra(insurer, value); break;
            case SweepParameter::RraReinsurer: u_r = with_rra(reinsurer, value); break;
            case SweepParameter::Rate: m.r = value; break;
            case SweepParameter::Horizon: t.contract.maturity = value; break;
            case SweepParameter::Guarantee: t.contract.guarantee = value; break;
        }
        if (recompute_pi_cm) t.contract.pi_cm = insurer_merton_fraction(u_i, m);
        SweepRow row;
        row.value = value;
        row.pi_cm = t.contract.pi_cm;
        row.eq = solve_equilibrium(u_i, u_r, t, m);
        rows.push_back(row);
    }
    return rows;
}

std::vector<BenefitCell> insurer_benefit_surface(double alpha, const std::vector<double>& rra_grid,
                                                 const std::vector<double>& horizon_grid,
                                                 const InsurerStrategy& alternative,
                                                 const Utility& reinsurer,
                                                 const ContractTerms& terms,
                                                 const MarketParams& params) {
    std::vector<BenefitCell> cells;
    for (double rra : rra_grid) {
        const Utility u_i = with_rra(PowerUtility{}, rra);
        for (double horizon : horizon_grid) {
            ContractTerms t = terms;
            t.contract.maturity = horizon;
            t.contract.pi_cm = insurer_merton_fraction(u_i, params);
            const StackelbergEquilibrium eq = solve_equilibrium(u_i, reinsurer, t, params);
            BenefitCell cell;
            cell.rra = rra;
            cell.horizon = horizon;
            cell.theta_star = eq.theta_star;
            cell.weuc = weuc(ActionCombination::discounted(eq, alpha),
                             ActionCombination::without_reinsurance(alternative), Party::Insurer,
                             u_i, t, params);
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace stackre
