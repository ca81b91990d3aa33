#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "stackre/equilibrium.hpp"
#include "stackre/market.hpp"
#include "stackre/utility.hpp"

namespace stackre {

// Everything the optimal strategies depend on at time t.
struct MarketState {
    double t = 0.0;
    double bond = 1.0;
    double s1 = 1.0;
    double s2 = 1.0;
    double benchmark = 100.0;
    double kernel = 1.0;
    double kernel_aux = 1.0;

    void validate(double horizon) const;
};

MarketState initial_state(const ContractTerms& terms);

// State of path p at grid point k.
MarketState state_at(const PathEnsemble& ensemble, std::size_t p, std::size_t k);

// merton + constraint_correction is the auxiliary-market Merton portfolio;
// shift_correction is non-zero only for HARA utility (the a e^{-r(T-t)} floor).
struct PortfolioDecomposition {
    Eigen::Vector2d merton = Eigen::Vector2d::Zero();
    Eigen::Vector2d constraint_correction = Eigen::Vector2d::Zero();
    Eigen::Vector2d reinsurance_correction = Eigen::Vector2d::Zero();
    Eigen::Vector2d shift_correction = Eigen::Vector2d::Zero();
    Eigen::Vector2d total = Eigen::Vector2d::Zero();
};

// (sigma sigma^T)^{-1} (mu + lambda - r) / (1 - b); log utility is b = 0.
Eigen::Vector2d merton_portfolio(double b, const MarketParams& params,
                                 const DualShift& shift = {});
Eigen::Vector2d merton_portfolio(const Utility& u, const MarketParams& params,
                                 const DualShift& shift = {});

// Throws std::domain_error if the insurer's wealth at the state is not positive.
PortfolioDecomposition insurer_portfolio(const MarketState& state,
                                         const StackelbergEquilibrium& eq, const Utility& u,
                                         const ContractTerms& terms, const MarketParams& params);

// Generalized CPPI: Merton on the cushion V_R - xi P(t) plus the put hedge.
Eigen::Vector2d reinsurer_portfolio(const MarketState& state, const StackelbergEquilibrium& eq,
                                    const Utility& u, const ContractTerms& terms,
                                    const MarketParams& params);

// Feedback forms of the two strategies: the same formulas evaluated at a
// given current wealth instead of the closed-form optimal wealth.
PortfolioDecomposition insurer_portfolio_at(const MarketState& state, double wealth,
                                            const StackelbergEquilibrium& eq, const Utility& u,
                                            const ContractTerms& terms,
                                            const MarketParams& params);
Eigen::Vector2d reinsurer_portfolio_at(const MarketState& state, double wealth,
                                       const StackelbergEquilibrium& eq, const Utility& u,
                                       const ContractTerms& terms, const MarketParams& params);

double insurer_wealth(const MarketState& state, const StackelbergEquilibrium& eq,
                      const Utility& u, const ContractTerms& terms, const MarketParams& params);

double reinsurer_wealth(const MarketState& state, const StackelbergEquilibrium& eq,
                        const Utility& u, const ContractTerms& terms, const MarketParams& params);

// Reinsurer share holdings in (S0, S1, S2): the Merton holdings zeta on the
// cushion plus xi times the put's replicating shares.
struct ShareHoldings {
    Eigen::Vector3d cushion = Eigen::Vector3d::Zero();
    Eigen::Vector3d hedge = Eigen::Vector3d::Zero();
    Eigen::Vector3d total = Eigen::Vector3d::Zero();
};

// Requires t < T.
ShareHoldings reinsurer_holdings(const MarketState& state, const StackelbergEquilibrium& eq,
                                 const Utility& u, const ContractTerms& terms,
                                 const MarketParams& params);

}  // namespace stackre
