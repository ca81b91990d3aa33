#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stackre/analysis.hpp"
#include "stackre/equilibrium.hpp"
#include "stackre/market.hpp"

namespace stackre::test {

// Values printed by tests/oracle/base_case.py.
namespace oracle {
inline constexpr double pi_cm = 0.29475044105384;
inline constexpr double lambda2 = 0.00931115976331;
inline constexpr double p0 = 3.85329640242068;
inline constexpr double p0_aux = 4.65714447105736;
inline constexpr double theta = 0.20861308985514;
inline constexpr double pi_i1 = 0.31688728936829;
inline constexpr double pi_r1 = 0.31672331462046;
inline constexpr double pi_r2 = -0.16420994567865;
inline constexpr double v_i0 = 93.01428329341395;
inline constexpr double v_r0 = 106.98571670658605;
inline constexpr double y_i = 4.4756346422264e-22;
inline constexpr double y_r = 3.88157125649865e-22;
inline constexpr double nu = -4.97292738025155e-21;
inline constexpr double q1 = 0.00439602696655;
inline constexpr double alpha_increase = 0.85723894485569;
inline constexpr double alpha_max = 0.18154397651388;
inline constexpr double weuc_r_95 = 0.00060288605148;
inline constexpr double alpha_cap25 = 0.7926639707559;
inline constexpr double moment_aux_09 = 0.73296875625723;
// Insurer WEUC in bp at alpha = 0.8673, (RRA, T).
inline constexpr double benefit_merton_10_10 = 16.0005958062;
inline constexpr double benefit_merton_5_20 = 60.3988248156;
inline constexpr double benefit_merton_15_20 = 10.3889721483;
inline constexpr double benefit_mix_5_20 = 7274.9982608150;
inline constexpr double benefit_mix_15_20 = 193.8026376097;
}  // namespace oracle

inline MarketParams base_market() { return MarketParams{}; }

inline ContractTerms base_terms() {
    ContractTerms t;
    t.contract.pi_cm = insurer_merton_fraction(PowerUtility{-9.0}, base_market());
    return t;
}

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct LatticeResult {
    double theta = 0.0;
    double xi = 0.0;
    double theta_step = 0.0;
    double xi_step = 0.0;
};

// Leader-follower search over an n x n (theta, xi) lattice using only the two
// closed-form value functions. The follower's ties go to the amount the
// leader prefers.
inline LatticeResult lattice_equilibrium(const Utility& insurer, const Utility& reinsurer,
                                         const ContractTerms& terms, const MarketParams& params,
                                         std::size_t n = 200) {
    LatticeResult out;
    out.theta_step = terms.theta_max / static_cast<double>(n - 1);
    out.xi_step = terms.xi_bar / static_cast<double>(n - 1);
    double best_leader = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = out.theta_step * static_cast<double>(i);
        std::vector<double> nu(n);
        double best = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            nu[j] = insurer_value_nu(out.xi_step * static_cast<double>(j), theta, insurer, terms, params);
            best = std::max(best, nu[j]);
        }
        double xi = 0.0, leader = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(nu[j] - best) > 1e-12 * std::abs(best)) continue;
            const double x = out.xi_step * static_cast<double>(j);
            const double k = reinsurer_value(theta, x, reinsurer, terms, params);
            if (k > leader) {
                leader = k;
                xi = x;
            }
        }
        if (leader > best_leader) {
            best_leader = leader;
            out.theta = theta;
            out.xi = xi;
        }
    }
    return out;
}

}  // namespace stackre::test
