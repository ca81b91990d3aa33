#include "stackre/strategies.hpp"

#include <cmath>
#include <stdexcept>

#include "stackre/option_pricing.hpp"

namespace stackre {

namespace {

double remaining(const MarketState& state, const ContractTerms& terms) {
    state.validate(terms.contract.maturity);
    return terms.contract.maturity - state.t;
}

// (y Z)^{1/(b-1)} E[Z(T-t)^{b/(b-1)}]: time-t value of I(y Z(T)) + a.
double unfloored_wealth(double y, double kernel, double b, const MarketParams& params,
                        const DualShift& shift, double tau) {
    return std::pow(y * kernel, 1.0 / (b - 1.0)) * kernel_moment(params, shift, b / (b - 1.0), tau);
}

}  // namespace

void MarketState::validate(double horizon) const {
    if (!(t >= 0.0 && t <= horizon)) throw std::domain_error("state: t outside [0, T]");
    if (!(bond > 0.0 && s1 > 0.0 && s2 > 0.0 && benchmark > 0.0 && kernel > 0.0 &&
          kernel_aux > 0.0))
        throw std::domain_error("state: levels must be strictly positive");
}

MarketState initial_state(const ContractTerms& terms) {
    MarketState s;
    s.s1 = terms.s1;
    s.s2 = terms.s2;
    s.benchmark = terms.contract.benchmark0;
    return s;
}

MarketState state_at(const PathEnsemble& ensemble, std::size_t p, std::size_t k) {
    MarketState s;
    s.t = ensemble.grid().at(k);
    s.bond = ensemble.bond(k);
    s.s1 = ensemble.s1(p, k);
    s.s2 = ensemble.s2(p, k);
    s.benchmark = ensemble.benchmark(p, k);
    s.kernel = ensemble.kernel(p, k);
    s.kernel_aux = ensemble.kernel_aux(p, k);
    return s;
}

Eigen::Vector2d merton_portfolio(double b, const MarketParams& params, const DualShift& shift) {
    if (!(b < 1.0)) throw std::invalid_argument("merton: b must be below 1");
    return params.covariance().ldlt().solve(params.excess_return() + shift.vector()) / (1.0 - b);
}

Eigen::Vector2d merton_portfolio(const Utility& u, const MarketParams& params,
                                 const DualShift& shift) {
    return merton_portfolio(utility_exponent(u), params, shift);
}

double insurer_wealth(const MarketState& state, const StackelbergEquilibrium& eq,
                      const Utility& u, const ContractTerms& terms, const MarketParams& params) {
    const double tau = remaining(state, terms);
    const DualShift shift = optimal_dual_shift(params);
    const double b = utility_exponent(u);
    const double x = unfloored_wealth(eq.y_I_star, state.kernel_aux, b, params, shift, tau) -
                     utility_shift(u) * std::exp(-params.r * tau);
    const double p_aux = put_price_auxiliary(state.t, state.benchmark, terms.contract, params, shift);
    return x - eq.xi_star * p_aux;
}

double reinsurer_wealth(const MarketState& state, const StackelbergEquilibrium& eq,
                        const Utility& u, const ContractTerms& terms, const MarketParams& params) {
    if (std::holds_alternative<HaraUtility>(u))
        throw std::invalid_argument("reinsurer: HARA utility is not supported");
    const double tau = remaining(state, terms);
    const double b = utility_exponent(u);
    const double cushion = unfloored_wealth(eq.y_R_star, state.kernel, b, params, DualShift{}, tau);
    const double p = put_price(state.t, state.benchmark, terms.contract, params).price;
    return cushion + eq.xi_star * p;
}

PortfolioDecomposition insurer_portfolio_at(const MarketState& state, double wealth,
                                            const StackelbergEquilibrium& eq, const Utility& u,
                                            const ContractTerms& terms,
                                            const MarketParams& params) {
    const double tau = remaining(state, terms);
    const double v = wealth;
    if (!(v > 0.0)) throw std::domain_error("insurer portfolio: wealth is not positive");
    const double floor = utility_shift(u) * std::exp(-params.r * tau);
    if (!(v + floor > 0.0)) throw std::domain_error("insurer portfolio: wealth below the HARA floor");

    const DualShift shift = optimal_dual_shift(params);
    const double b = utility_exponent(u);
    const Eigen::Vector2d aux = merton_portfolio(b, params, shift);
    const double p_aux = put_price_auxiliary(state.t, state.benchmark, terms.contract, params, shift);

    PortfolioDecomposition d;
    d.merton = merton_portfolio(b, params);
    d.constraint_correction = params.covariance().ldlt().solve(shift.vector()) / (1.0 - b);
    d.reinsurance_correction = aux * (eq.xi_star * p_aux / v);
    d.shift_correction = aux * (floor / v);
    // Scaled from aux directly so the S2 entry does not come out of a sum of
    // cancelling terms.
    d.total = aux * ((v + eq.xi_star * p_aux + floor) / v);
    return d;
}

PortfolioDecomposition insurer_portfolio(const MarketState& state,
                                         const StackelbergEquilibrium& eq, const Utility& u,
                                         const ContractTerms& terms, const MarketParams& params) {
    return insurer_portfolio_at(state, insurer_wealth(state, eq, u, terms, params), eq, u, terms,
                                params);
}

Eigen::Vector2d reinsurer_portfolio_at(const MarketState& state, double wealth,
                                       const StackelbergEquilibrium& eq, const Utility& u,
                                       const ContractTerms& terms, const MarketParams& params) {
    remaining(state, terms);
    const double v = wealth;
    if (!(v > 0.0)) throw std::domain_error("reinsurer portfolio: wealth is not positive");
    const double p = put_price(state.t, state.benchmark, terms.contract, params).price;
    const double exposure = put_hedge_exposure(state.t, state.benchmark, terms.contract, params);
    Eigen::Vector2d pi = merton_portfolio(u, params) * ((v - eq.xi_star * p) / v);
    pi(1) += exposure * eq.xi_star / v;
    return pi;
}

Eigen::Vector2d reinsurer_portfolio(const MarketState& state, const StackelbergEquilibrium& eq,
                                    const Utility& u, const ContractTerms& terms,
                                    const MarketParams& params) {
    return reinsurer_portfolio_at(state, reinsurer_wealth(state, eq, u, terms, params), eq, u,
                                  terms, params);
}

ShareHoldings reinsurer_holdings(const MarketState& state, const StackelbergEquilibrium& eq,
                                 const Utility& u, const ContractTerms& terms,
                                 const MarketParams& params) {
    const double v = reinsurer_wealth(state, eq, u, terms, params);
    const double p = put_price(state.t, state.benchmark, terms.contract, params).price;
    const double cushion = v - eq.xi_star * p;
    const Eigen::Vector2d pi_m = merton_portfolio(u, params);

    ShareHoldings h;
    h.cushion << cushion * (1.0 - pi_m.sum()) / state.bond, cushion * pi_m(0) / state.s1,
        cushion * pi_m(1) / state.s2;
    const ReplicationShares psi =
        replication_strategy(state.t, state.benchmark, state.bond, state.s2, terms.contract, params);
    h.hedge << eq.xi_star * psi.bond, eq.xi_star * psi.asset1, eq.xi_star * psi.asset2;
    h.total = h.cushion + h.hedge;
    return h;
}

}  // namespace stackre
