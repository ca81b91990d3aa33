#include "stackre/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "stackre/analysis.hpp"
#include "stackre/simulation.hpp"
#include "stackre/strategies.hpp"

namespace stackre {

namespace {

class CheckList {
public:
    void absolute(std::string id, std::string quantity, double value, double target, double tol,
                  std::string unit) {
        push(std::move(id), std::move(quantity), value, target, tol, std::move(unit),
             std::abs(value - target) <= tol);
    }

    void relative(std::string id, std::string quantity, double value, double target, double rel,
                  std::string unit) {
        const double tol = rel * std::abs(target);
        absolute(std::move(id), std::move(quantity), value, target, tol, std::move(unit));
    }

    // Qualitative claims: value 1 when the claim holds.
    void claim(std::string id, std::string quantity, bool holds) {
        push(std::move(id), std::move(quantity), holds ? 1.0 : 0.0, 1.0, 0.0, "", holds);
    }

    std::vector<PaperCheck> take() { return std::move(checks_); }

private:
    void push(std::string id, std::string quantity, double value, double target, double tol,
              std::string unit, bool pass) {
        checks_.push_back({std::move(id), std::move(quantity), value, target, tol, std::move(unit), pass});
    }

    std::vector<PaperCheck> checks_;
};

template <class Cmp>
bool sorted_strictly(const std::vector<SweepRow>& rows, Cmp cmp) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!cmp(rows[i - 1].eq.theta_star, rows[i].eq.theta_star)) return false;
    return true;
}

}  // namespace

std::vector<PaperCheck> reproduce_paper(const RunConfig& cfg) {
    const MarketParams& m = cfg.market;
    const ContractTerms& t = cfg.terms;
    const Utility& ui = cfg.insurer;
    const Utility& ur = cfg.reinsurer;
    const StackelbergEquilibrium eq = solve_equilibrium(ui, ur, t, m);
    CheckList c;

    c.absolute("eq.theta", "equilibrium safety loading", 100 * eq.theta_star, 20.86, 0.005, "%");
    c.absolute("eq.xi", "equilibrium reinsurance amount", eq.xi_star, 1.5, 0.0, "");
    c.absolute("eq.pi_I.1", "insurer portfolio at 0, S1", 100 * eq.pi_I_0(0), 31.69, 0.005, "%");
    c.absolute("eq.pi_I.2", "insurer portfolio at 0, S2", 100 * eq.pi_I_0(1), 0.0, 0.005, "%");
    c.absolute("eq.pi_R.1", "reinsurer portfolio at 0, S1", 100 * eq.pi_R_0(0), 31.67, 0.005, "%");
    c.absolute("eq.pi_R.2", "reinsurer portfolio at 0, S2", 100 * eq.pi_R_0(1), -16.42, 0.005, "%");
    c.absolute("merton.pi_cm", "insurer Merton fraction in S1", 100 * insurer_merton_fraction(ui, m),
               29.48, 0.005, "%");

    const double crit = eq.critical_loading;
    const BestResponse low = insurer_best_response(0.10, ui, t, m);
    const BestResponse high = insurer_best_response(0.30, ui, t, m);
    const BestResponse at = insurer_best_response(eq.theta_star, ui, t, m);
    c.claim("br.low", "best response at loading 10% is the full amount",
            0.10 < crit && std::holds_alternative<Unique>(low) && selected_amount(low) == t.xi_bar);
    c.claim("br.high", "best response at loading 30% is no reinsurance",
            0.30 > crit && std::holds_alternative<Unique>(high) && selected_amount(high) == 0.0);
    c.claim("br.indifferent", "insurer indifferent at the equilibrium loading",
            std::holds_alternative<Indifferent>(at) && selected_amount(at) == t.xi_bar);
    c.claim("nu.zero_loading", "full reinsurance preferred at zero loading",
            insurer_value_nu(t.xi_bar, 0.0, ui, t, m) > insurer_value_nu(0.0, 0.0, ui, t, m));

    c.absolute("loss.q1", "loss probability Q(1)", 100 * loss_probability(1.0, eq, ur, t, m), 0.4413,
               0.003, "%");
    c.absolute("loss.alpha_increase", "alpha for Q(1) + 0.01 pp",
               100 * discount_select(LossProbIncrease{1e-4}, eq, ur, t, m), 86.73, 0.1, "%");
    c.absolute("loss.alpha_max", "alpha for Q = 0.5%",
               100 * discount_select(MaxLossProb{0.005}, eq, ur, t, m), 20.74, 0.1, "%");

    const auto ref = ActionCombination::at_equilibrium(eq);
    const auto disc = ActionCombination::discounted(eq, 0.95);
    const WeucResult wr = weuc(ref, disc, Party::Reinsurer, ur, t, m);
    const WeucResult wi = weuc(ref, disc, Party::Insurer, ui, t, m);
    c.absolute("weuc.discount5", "reinsurer WEUC of a 5% discount", wr.basis_points(), 6.0, 0.5, "bp");
    c.absolute("weuc.zero_sum", "insurer gain plus reinsurer loss", wr.value + wi.value, 0.0, 1e-9, "");
    c.absolute("weuc.cap25", "alpha for a 25 bp WEUC cap",
               100 * discount_select(WeucCap{25e-4}, eq, ur, t, m), 79.27, 0.1, "%");

    const WeucResult base_benefit = weuc(ActionCombination::discounted(eq, kPublishedAlpha),
                                         ActionCombination::without_reinsurance(), Party::Insurer,
                                         ui, t, m);
    c.absolute("weuc.benefit", "insurer benefit vs Merton (RRA 10, T 10)",
               base_benefit.basis_points(), 16.0, 1.0, "bp");
    const auto merton = insurer_benefit_surface(kPublishedAlpha, {5.0, 15.0}, {20.0},
                                                OptimalStrategy{}, ur, t, m);
    const auto mix = insurer_benefit_surface(kPublishedAlpha, {5.0, 15.0}, {20.0},
                                             ConstantMix{Eigen::Vector2d(0.15, 0.0)}, ur, t, m);
    c.relative("weuc.merton.5_20", "insurer benefit vs Merton (RRA 5, T 20)",
               merton[0].weuc.basis_points(), 60.0, 0.02, "bp");
    c.relative("weuc.merton.15_20", "insurer benefit vs Merton (RRA 15, T 20)",
               merton[1].weuc.basis_points(), 10.0, 0.02, "bp");
    c.relative("weuc.mix.5_20", "insurer benefit vs constant mix (RRA 5, T 20)",
               mix[0].weuc.basis_points(), 7275.0, 0.02, "bp");
    c.relative("weuc.mix.15_20", "insurer benefit vs constant mix (RRA 15, T 20)",
               mix[1].weuc.basis_points(), 287.0, 0.02, "bp");

    auto xi_full = [&](const std::vector<SweepRow>& rows) {
        return std::all_of(rows.begin(), rows.end(),
                           [&](const SweepRow& r) { return r.eq.xi_star == t.xi_bar; });
    };
    const auto by_r = sensitivity_sweep(SweepParameter::Rate, {-0.02, -0.01, 0.0, 0.01, 0.02}, ui, ur, t, m);
    const auto by_t = sensitivity_sweep(SweepParameter::Horizon, {1, 5, 10, 15, 20}, ui, ur, t, m);
    const auto by_g = sensitivity_sweep(SweepParameter::Guarantee, {60, 70, 80, 90, 100, 110}, ui, ur, t, m);
    c.claim("sweep.r", "equilibrium loading increasing in r", sorted_strictly(by_r, std::less<>{}));
    c.claim("sweep.T", "equilibrium loading increasing in T", sorted_strictly(by_t, std::less<>{}));
    c.claim("sweep.G", "equilibrium loading decreasing in G_T, full reinsurance throughout",
            sorted_strictly(by_g, std::greater<>{}) && xi_full(by_g));
    return c.take();
}

}  // namespace stackre
