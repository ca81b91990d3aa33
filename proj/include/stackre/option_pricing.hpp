#pragma once

#include "stackre/market.hpp"

namespace stackre {

// European put on the constant-mix benchmark (1 - pi_cm in the bank account,
// pi_cm in the second asset), struck at the guarantee.
struct ReinsuranceContract {
    double guarantee = 100.0;
    double maturity = 10.0;
    double pi_cm = 0.2948;
    double benchmark0 = 100.0;

    void validate() const;

    // Volatility of the benchmark, pi_cm * sigma2.
    double benchmark_volatility(const MarketParams& params) const { return pi_cm * params.sigma2; }
};

// d1 and d2 follow the put-formula convention used throughout this library:
//   P = e^{-r tau} G Phi(-d1) - V Phi(-d2),  d2 = d1 + s sqrt(tau),
// so d1 carries the (r - s^2/2) drift and d_plus == d2 is the hedge argument.
struct PutQuote {
    double price = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d_plus = 0.0;
};

// Fair value at time t given the benchmark level. At t == T returns the payoff.
// Throws std::domain_error for t > T and std::invalid_argument for V_B <= 0.
PutQuote put_price(double t, double benchmark, const ReinsuranceContract& contract,
                   const MarketParams& params);

// Z_lambda(t)^{-1} E[Z_lambda(T) P(T) | F_t]: under the shifted kernel the
// benchmark grows at r - pi_cm * lambda2, so this is a put with continuous
// yield q = pi_cm * lambda2.
double put_price_auxiliary(double t, double benchmark, const ReinsuranceContract& contract,
                           const MarketParams& params, const DualShift& shift);

// Black-Scholes put on an underlying with continuous yield.
PutQuote put_with_yield(double tau, double underlying, double strike, double rate,
                        double yield, double vol);

// Shares held in (S0, S1, S2).
struct ReplicationShares {
    double bond = 0.0;
    double asset1 = 0.0;
    double asset2 = 0.0;
};

// Self-financing replication of the put using the bank account and S2 only.
// Throws std::domain_error for t >= T.
ReplicationShares replication_strategy(double t, double benchmark, double bond_level,
                                       double s2_level, const ReinsuranceContract& contract,
                                       const MarketParams& params);

// Money amount pi_cm * V_B * (Phi(d_plus) - 1) held in S2 by the replicating
// portfolio; non-positive.
double put_hedge_exposure(double t, double benchmark, const ReinsuranceContract& contract,
                          const MarketParams& params);

}  // namespace stackre
