#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "stackre/analysis.hpp"
#include "support.hpp"

using namespace stackre;
using stackre::test::base_market;
using stackre::test::base_terms;
using stackre::test::rel_diff;

namespace {

const Utility kPower = PowerUtility{-9.0};

StackelbergEquilibrium base_eq() {
    return solve_equilibrium(kPower, kPower, base_terms(), base_market());
}

ConstantMix mix(double a, double b) { return ConstantMix{Eigen::Vector2d(a, b)}; }

std::vector<double> range(double from, double to, int count) {
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(from + (to - from) * i / (count - 1));
    return g;
}

}  // namespace

TEST_CASE("constant mix utilities") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    const double T = t.contract.maturity;
    SUBCASE("bank account only") {
        const auto c = ActionCombination::without_reinsurance(mix(0.0, 0.0));
        for (const Utility& u : {Utility{kPower}, Utility{LogUtility{}}}) {
            const UtilityEvaluation ev = expected_utility_closed_form(c, Party::Insurer, u, t, m);
            CHECK_FALSE(ev.monte_carlo);
            CHECK(rel_diff(ev.value, evaluate(u, t.insurer_wealth * std::exp(m.r * T))) < 1e-13);
        }
    }
    SUBCASE("closed form agrees with Monte Carlo") {
        const auto c = ActionCombination::without_reinsurance(mix(0.15, 0.0));
        const double closed = expected_utility_closed_form(c, Party::Insurer, kPower, t, m).value;
        SimulationConfig cfg;
        cfg.n_paths = 400000;
        cfg.seed = 21;
        const PathEnsemble e = simulate(m, uniform_grid(T, 1), t.contract.pi_cm, {}, cfg.ensemble_options());
        const Eigen::Vector2d pi(0.15, 0.0);
        const Eigen::Vector2d vol = m.volatility().transpose() * pi;
        const double g = m.r + pi.dot(m.excess_return()) - 0.5 * vol.squaredNorm();
        const EstimateWithError est = expected_utility_mc(e, [&](const PathEnsemble& s, std::size_t p) {
            const Eigen::Vector2d w(s.w1(p, 1), s.w2(p, 1));
            return evaluate(kPower, t.insurer_wealth * std::exp(g * T + vol.dot(w)));
        });
        CHECK(est.within(closed));
    }
    SUBCASE("no closed form falls back to Monte Carlo") {
        SimulationConfig cfg;
        cfg.n_paths = 1000;
        const UtilityEvaluation ev = expected_utility_closed_form(
            ActionCombination::without_reinsurance(mix(0.2, 0.0)), Party::Insurer, HaraUtility{10.0, -9.0}, t, m, cfg);
        CHECK(ev.monte_carlo);
        CHECK(ev.std_error > 0.0);
        CHECK(ev.warning.find("Monte Carlo") != std::string::npos);
    }
}

TEST_CASE("optimal expected utility matches the equilibrium value") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    const StackelbergEquilibrium eq = base_eq();
    const auto c = ActionCombination::at_equilibrium(eq);
    CHECK(rel_diff(expected_utility_closed_form(c, Party::Insurer, kPower, t, m).value, test::oracle::nu) < 1e-10);
    CHECK(rel_diff(expected_utility_closed_form(c, Party::Reinsurer, kPower, t, m).value,
                   reinsurer_value(eq.theta_star, eq.xi_star, kPower, t, m)) < 1e-13);
}

TEST_CASE("wealth-equivalent utility change") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    const StackelbergEquilibrium eq = base_eq();
    const auto ref = ActionCombination::at_equilibrium(eq);
    const auto disc = ActionCombination::discounted(eq, 0.95);

    SUBCASE("same combination") {
        for (Party party : {Party::Insurer, Party::Reinsurer})
            CHECK(std::abs(weuc(ref, ref, party, kPower, t, m).value) < 1e-14);
    }
    SUBCASE("5% discount costs the reinsurer about 6 bp") {
        const WeucResult w = weuc(ref, disc, Party::Reinsurer, kPower, t, m);
        CHECK(w.closed_form);
        CHECK(w.value == doctest::Approx(test::oracle::weuc_r_95).epsilon(1e-10));
        CHECK(w.basis_points() == doctest::Approx(1e4 * test::oracle::weuc_r_95).epsilon(1e-10));
    }
    SUBCASE("swapping the combinations flips the sign") {
        const auto none = ActionCombination::without_reinsurance();
        for (Party party : {Party::Insurer, Party::Reinsurer}) {
            const double ab = weuc(ref, none, party, kPower, t, m).value;
            const double ba = weuc(none, ref, party, kPower, t, m).value;
            CHECK(std::abs(ab + ba) < 1e-13);
        }
    }
    SUBCASE("scaled wealth restores the reference utility") {
        const auto alt = ActionCombination::without_reinsurance(mix(0.15, 0.0));
        const WeucResult w = weuc(ref, alt, Party::Insurer, kPower, t, m);
        ContractTerms scaled = t;
        scaled.insurer_wealth *= 1.0 + w.value;
        CHECK(rel_diff(expected_utility_closed_form(alt, Party::Insurer, kPower, scaled, m).value,
                       expected_utility_closed_form(ref, Party::Insurer, kPower, t, m).value) < 1e-12);
    }
    SUBCASE("reinsurer result does not depend on its risk aversion") {
        const double base = weuc(ref, disc, Party::Reinsurer, kPower, t, m).value;
        for (const Utility& u : {Utility{PowerUtility{-2.0}}, Utility{PowerUtility{-14.0}}, Utility{LogUtility{}}})
            CHECK(rel_diff(weuc(ref, disc, Party::Reinsurer, u, t, m).value, base) < 1e-12);
    }
    SUBCASE("bisection when no inverse exists") {
        SimulationConfig cfg;
        cfg.n_paths = 20000;
        cfg.seed = 33;
        const Utility hara = HaraUtility{10.0, -9.0};
        const StackelbergEquilibrium eq_h = solve_equilibrium(hara, kPower, t, m);
        const auto alt = ActionCombination::without_reinsurance(mix(0.2, 0.0));
        const WeucResult w = weuc(ActionCombination::at_equilibrium(eq_h), alt, Party::Insurer, hara, t, m, cfg);
        CHECK_FALSE(w.closed_form);
        ContractTerms scaled = t;
        scaled.insurer_wealth *= 1.0 + w.value;
        const double target =
            expected_utility_closed_form(ActionCombination::at_equilibrium(eq_h), Party::Insurer, hara, t, m).value;
        CHECK(rel_diff(expected_utility_closed_form(alt, Party::Insurer, hara, scaled, m, cfg).value, target) < 1e-8);

        // Log utility with reinsurance under a constant mix also needs the solver.
        const ActionCombination with_put{0.1, 1.0, mix(0.3, 0.0)};
        const WeucResult wl = weuc(ActionCombination::without_reinsurance(), with_put, Party::Insurer,
                                   LogUtility{}, t, m, cfg);
        CHECK_FALSE(wl.closed_form);
        CHECK(std::isfinite(wl.value));
    }
    CHECK_THROWS_AS(weuc(ref, ActionCombination{0.6, 1.0}, Party::Insurer, kPower, t, m), std::invalid_argument);
    CHECK_THROWS_AS(weuc(ref, disc, Party::Reinsurer, HaraUtility{}, t, m), std::invalid_argument);
}

TEST_CASE("discount selection") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    const StackelbergEquilibrium eq = base_eq();
    CHECK(discount_select(LossProbIncrease{1e-4}, eq, kPower, t, m) ==
          doctest::Approx(test::oracle::alpha_increase).epsilon(1e-6));
    CHECK(discount_select(MaxLossProb{0.005}, eq, kPower, t, m) ==
          doctest::Approx(test::oracle::alpha_max).epsilon(1e-6));
    CHECK(discount_select(WeucCap{0.0025}, eq, kPower, t, m) ==
          doctest::Approx(test::oracle::alpha_cap25).epsilon(1e-6));

    const double a = discount_select(LossProbIncrease{1e-4}, eq, kPower, t, m);
    CHECK(loss_probability(a, eq, kPower, t, m) ==
          doctest::Approx(loss_probability(1.0, eq, kPower, t, m) + 1e-4).epsilon(1e-6));

    CHECK(discount_select(LossProbIncrease{0.5}, eq, kPower, t, m) == 0.0);
    CHECK(discount_select(WeucCap{1.0}, eq, kPower, t, m) == 0.0);
    CHECK(discount_select(LossProbIncrease{0.0}, eq, kPower, t, m) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(discount_select(MaxLossProb{0.001}, eq, kPower, t, m), InfeasibleCriterion);
    CHECK_THROWS_AS(discount_select(WeucCap{-0.1}, eq, kPower, t, m), InfeasibleCriterion);
}

TEST_CASE("reinsurer incentive") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    const StackelbergEquilibrium eq = base_eq();
    for (double alpha : {0.2, 0.5, 1.0}) {
        const auto [sell, keep] = reinsurer_incentive(alpha, eq, kPower, t, m);
        CHECK(sell > keep);
    }
    const auto [sell0, keep0] = reinsurer_incentive(0.0, eq, kPower, t, m);
    CHECK(sell0 == keep0);
    CHECK_THROWS_AS(reinsurer_incentive(1.5, eq, kPower, t, m), std::invalid_argument);
}

TEST_CASE("merton fraction") {
    CHECK(insurer_merton_fraction(kPower, base_market()) == doctest::Approx(test::oracle::pi_cm).epsilon(1e-12));
    CHECK(std::abs(100 * insurer_merton_fraction(kPower, base_market()) - 29.48) <= 0.005);
}

TEST_CASE("sensitivity sweeps") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    auto check_xi = [&](const std::vector<SweepRow>& rows) {
        for (const auto& row : rows) CHECK(row.eq.xi_star == t.xi_bar);
    };
    SUBCASE("increasing in the interest rate") {
        const auto rows = sensitivity_sweep(SweepParameter::Rate, range(-0.02, 0.02, 9), kPower, kPower, t, m);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].eq.theta_star > rows[i - 1].eq.theta_star);
        check_xi(rows);
    }
    SUBCASE("increasing in the horizon") {
        const auto rows = sensitivity_sweep(SweepParameter::Horizon, range(1.0, 20.0, 20), kPower, kPower, t, m);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].eq.theta_star > rows[i - 1].eq.theta_star);
        check_xi(rows);
    }
    SUBCASE("decreasing in the guarantee") {
        const auto rows = sensitivity_sweep(SweepParameter::Guarantee, range(60.0, 110.0, 11), kPower, kPower, t, m);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].eq.theta_star < rows[i - 1].eq.theta_star);
        check_xi(rows);
    }
    SUBCASE("flat in risk aversion at a fixed benchmark") {
        for (SweepParameter p : {SweepParameter::RraInsurer, SweepParameter::RraReinsurer}) {
            const auto rows = sensitivity_sweep(p, range(1.0, 20.0, 20), kPower, kPower, t, m);
            for (const auto& row : rows) {
                CHECK(rel_diff(row.eq.theta_star, rows[0].eq.theta_star) <= 1e-12);
                CHECK(row.pi_cm == t.contract.pi_cm);
            }
            check_xi(rows);
        }
    }
    SUBCASE("benchmark weight can follow the insurer") {
        const auto rows =
            sensitivity_sweep(SweepParameter::RraInsurer, {5.0, 10.0}, kPower, kPower, t, m, true);
        CHECK(rows[0].pi_cm == doctest::Approx(2.0 * rows[1].pi_cm).epsilon(1e-14));
        CHECK(rows[0].eq.theta_star != rows[1].eq.theta_star);
    }
    CHECK_THROWS_AS(sensitivity_sweep(SweepParameter::RraInsurer, {0.0}, kPower, kPower, t, m), std::invalid_argument);
}

TEST_CASE("sweep parameter names") {
    for (SweepParameter p : {SweepParameter::RraInsurer, SweepParameter::RraReinsurer, SweepParameter::Rate,
                             SweepParameter::Horizon, SweepParameter::Guarantee})
        CHECK(parse_sweep_parameter(to_string(p)) == p);
    CHECK(parse_sweep_parameter("horizon") == SweepParameter::Horizon);
    CHECK(parse_sweep_parameter("guarantee") == SweepParameter::Guarantee);
    CHECK_THROWS_AS(parse_sweep_parameter("sigma"), std::invalid_argument);
}

TEST_CASE("insurer benefit surface") {
    const MarketParams m = base_market();
    const ContractTerms t = base_terms();
    const double alpha = 0.8673;
    SUBCASE("against optimal investment without reinsurance") {
        const auto cells = insurer_benefit_surface(alpha, {10.0, 5.0, 15.0}, {10.0, 20.0}, OptimalStrategy{}, kPower, t, m);
        REQUIRE(cells.size() == 6);
        CHECK(cells[0].rra == 10.0);
        CHECK(cells[0].horizon == 10.0);
        CHECK(cells[0].weuc.basis_points() == doctest::Approx(test::oracle::benefit_merton_10_10).epsilon(1e-8));
        CHECK(cells[3].weuc.basis_points() == doctest::Approx(test::oracle::benefit_merton_5_20).epsilon(1e-8));
        CHECK(cells[5].weuc.basis_points() == doctest::Approx(test::oracle::benefit_merton_15_20).epsilon(1e-8));
        for (const auto& c : cells) CHECK(c.weuc.closed_form);
    }
    SUBCASE("against a 15% constant mix") {
        const auto cells = insurer_benefit_surface(alpha, {5.0, 15.0}, {20.0}, mix(0.15, 0.0), kPower, t, m);
        REQUIRE(cells.size() == 2);
        CHECK(cells[0].weuc.basis_points() == doctest::Approx(test::oracle::benefit_mix_5_20).epsilon(1e-8));
        CHECK(cells[1].weuc.basis_points() == doctest::Approx(test::oracle::benefit_mix_15_20).epsilon(1e-8));
    }
}
