#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stackre/equilibrium.hpp"
#include "stackre/market.hpp"
#include "stackre/strategies.hpp"
#include "stackre/utility.hpp"

namespace stackre {

struct SimulationConfig {
    std::size_t n_paths = 10000;
    std::size_t steps = 64;
    std::uint64_t seed = 20240101;
    bool antithetic = false;

    void validate() const;
    EnsembleOptions ensemble_options(Measure measure = Measure::Physical) const;
};

struct EstimateWithError {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;

    // |mean - target| / std_error; 0 when both coincide exactly.
    double z_score(double target) const;
    bool within(double target, double n_se = 3.0) const;
};

// Raised when a Monte Carlo expression is not finite on some paths.
class NonFiniteSamples : public std::runtime_error {
public:
    explicit NonFiniteSamples(std::vector<std::size_t> paths);
    const std::vector<std::size_t>& paths() const { return paths_; }

private:
    std::vector<std::size_t> paths_;
};

// Mean and standard error with compensated summation. With `antithetic`,
// consecutive pairs are averaged first and the error is taken over pairs.
EstimateWithError estimate(std::span<const double> samples, bool antithetic = false);

using TerminalExpression = std::function<double(const PathEnsemble&, std::size_t path)>;

EstimateWithError expected_utility_mc(const PathEnsemble& ensemble,
                                      const TerminalExpression& expression);

// Relative portfolio (weights in S1, S2) as a function of the state and the
// current wealth.
using PortfolioRule = std::function<Eigen::Vector2d(const MarketState&, double wealth)>;

struct WealthPaths {
    std::size_t n_paths = 0;
    std::size_t points = 0;
    std::vector<double> wealth;          // path-major, like PathEnsemble
    std::vector<unsigned char> absorbed; // 1 if the path hit zero

    double at(std::size_t p, std::size_t k) const { return wealth[p * points + k]; }
    double terminal(std::size_t p) const { return at(p, points - 1); }
    std::size_t absorbed_count() const;
};

// Self-financing wealth under `rule`, rebalanced on the ensemble grid with
// log-Euler steps driven by the ensemble's own Brownian increments.
WealthPaths evolve_wealth(const PathEnsemble& ensemble, const PortfolioRule& rule,
                          double initial_wealth);

// Probability that the reinsurer's terminal wealth after paying the put is
// below v_R when the loading is alpha * theta_star.
double loss_probability(double alpha, const StackelbergEquilibrium& eq, const Utility& reinsurer,
                        const ContractTerms& terms, const MarketParams& params);

// Same probability estimated from the terminal kernel values of `ensemble`.
EstimateWithError loss_probability_mc(double alpha, const StackelbergEquilibrium& eq,
                                      const Utility& reinsurer, const ContractTerms& terms,
                                      const MarketParams& params, const PathEnsemble& ensemble);

struct HedgeErrorPoint {
    std::size_t rebalances = 0;
    double rms = 0.0;
    double initial_cost = 0.0;
};

// RMS terminal error of the put replication rebalanced `rebalances` times.
// Each entry must divide the ensemble's step count.
std::vector<HedgeErrorPoint> hedge_error(const PathEnsemble& ensemble,
                                         const ReinsuranceContract& contract,
                                         const MarketParams& params,
                                         const std::vector<std::size_t>& rebalances);

struct WealthGapPoint {
    std::size_t rebalances = 0;
    // RMS of evolved minus closed-form terminal wealth.
    double rms_insurer = 0.0;
    double rms_reinsurer = 0.0;
    std::size_t absorbed_insurer = 0;
    std::size_t absorbed_reinsurer = 0;
};

// Both parties' feedback strategies run on coarsened copies of `ensemble`
// and compared with the closed-form optimal terminal wealth on the same paths.
std::vector<WealthGapPoint> strategy_wealth_gap(const PathEnsemble& ensemble,
                                                const StackelbergEquilibrium& eq,
                                                const Utility& insurer, const Utility& reinsurer,
                                                const ContractTerms& terms,
                                                const MarketParams& params,
                                                const std::vector<std::size_t>& rebalances);

struct VerificationItem {
    std::string name;
    double closed_form = 0.0;
    EstimateWithError mc;
    bool pass = false;
};

struct VerificationReport {
    std::vector<VerificationItem> items;
    // Paths on which the insurer's guaranteed floor xi P(T) exceeded the
    // unconstrained optimum.
    std::size_t insurer_floor_binding = 0;
    bool pass() const;
    const VerificationItem* worst() const;
};

// Closed form versus Monte Carlo for P(0), P_aux(0), both equilibrium
// expected utilities and Q(1), at 3 standard errors. The two prices are
// averaged under their own pricing measures; the rest under the physical one.
VerificationReport verify_all(const StackelbergEquilibrium& eq, const Utility& insurer,
                              const Utility& reinsurer, const ContractTerms& terms,
                              const MarketParams& params, const SimulationConfig& config);

}  // namespace stackre
