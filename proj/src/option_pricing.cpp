#include "stackre/option_pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stackre/normal.hpp"

namespace stackre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_infinity(double x) {
    if (x > 0.0) return kInf;
    if (x < 0.0) return -kInf;
    return 0.0;
}

double time_to_maturity(double t, const ReinsuranceContract& contract) {
    if (t > contract.maturity) throw std::domain_error("put: t exceeds maturity");
    if (t < 0.0) throw std::domain_error("put: t must be non-negative");
    return contract.maturity - t;
}

}  // namespace

void ReinsuranceContract::validate() const {
    if (!(guarantee >= 0.0)) throw std::invalid_argument("contract: guarantee must be non-negative");
    if (!(maturity > 0.0)) throw std::invalid_argument("contract: maturity must be positive");
    if (!(pi_cm >= 0.0)) throw std::invalid_argument("contract: pi_cm must be non-negative");
    if (!(benchmark0 > 0.0)) throw std::invalid_argument("contract: benchmark0 must be positive");
}

PutQuote put_with_yield(double tau, double underlying, double strike, double rate, double yield,
                        double vol) {
    if (!(underlying > 0.0)) throw std::invalid_argument("put: underlying must be positive");
    PutQuote q;
    if (strike <= 0.0) {
        q.d1 = q.d2 = q.d_plus = kInf;
        return q;
    }
    const double log_moneyness = std::log(underlying / strike);
    if (tau <= 0.0) {
        q.price = std::max(strike - underlying, 0.0);
        q.d1 = q.d2 = q.d_plus = signed_infinity(log_moneyness);
        return q;
    }
    const double disc_strike = std::exp(-rate * tau) * strike;
    const double fwd_underlying = std::exp(-yield * tau) * underlying;
    const double vol_sqrt = vol * std::sqrt(tau);
    if (vol_sqrt <= 0.0) {
        q.price = std::max(disc_strike - fwd_underlying, 0.0);
        q.d1 = q.d2 = q.d_plus = signed_infinity(log_moneyness + (rate - yield) * tau);
        return q;
    }
    q.d1 = (log_moneyness + (rate - yield - 0.5 * vol * vol) * tau) / vol_sqrt;
    q.d2 = q.d1 + vol_sqrt;
    q.d_plus = q.d2;
    q.price = disc_strike * norm_cdf(-q.d1) - fwd_underlying * norm_cdf(-q.d2);
    q.price = std::clamp(q.price, 0.0, disc_strike);
    return q;
}

PutQuote put_price(double t, double benchmark, const ReinsuranceContract& contract,
                   const MarketParams& params) {
    const double tau = time_to_maturity(t, contract);
    return put_with_yield(tau, benchmark, contract.guarantee, params.r, 0.0,
                          contract.benchmark_volatility(params));
}

double put_price_auxiliary(double t, double benchmark, const ReinsuranceContract& contract,
                           const MarketParams& params, const DualShift& shift) {
    const double tau = time_to_maturity(t, contract);
    return put_with_yield(tau, benchmark, contract.guarantee, params.r,
                          contract.pi_cm * shift.lambda2, contract.benchmark_volatility(params))
        .price;
}

double put_hedge_exposure(double t, double benchmark, const ReinsuranceContract& contract,
                          const MarketParams& params) {
    const PutQuote q = put_price(t, benchmark, contract, params);
    return contract.pi_cm * benchmark * (norm_cdf(q.d_plus) - 1.0);
}

ReplicationShares replication_strategy(double t, double benchmark, double bond_level,
                                       double s2_level, const ReinsuranceContract& contract,
                                       const MarketParams& params) {
    if (t >= contract.maturity) throw std::domain_error("replication: t must be before maturity");
    if (!(bond_level > 0.0 && s2_level > 0.0))
        throw std::invalid_argument("replication: asset levels must be positive");
    const PutQuote q = put_price(t, benchmark, contract, params);
    const double exposure = contract.pi_cm * benchmark * (norm_cdf(q.d_plus) - 1.0);
    return {(q.price - exposure) / bond_level, 0.0, exposure / s2_level};
}

}  // namespace stackre
