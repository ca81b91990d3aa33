// Acceptance run: one PASS/FAIL line per criterion, details after the colon.
// Exit status is 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "stackre/analysis.hpp"
#include "stackre/config.hpp"
#include "stackre/option_pricing.hpp"
#include "stackre/simulation.hpp"
#include "support.hpp"

using namespace stackre;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class Report {
public:
    // Appends "name=value (target +/- tol)" and folds the comparison into the verdict.
    void near(const std::string& name, double value, double target, double tol) {
        const bool ok = std::abs(value - target) <= tol;
        add(name, value, ok, " (" + fmt(target) + " +/- " + fmt(tol) + ")");
    }

    void near_rel(const std::string& name, double value, double target, double rel) {
        near(name, value, target, rel * std::abs(target));
    }

    void at_most(const std::string& name, double value, double limit) {
        add(name, value, value <= limit, " (<= " + fmt(limit) + ")");
    }

    void within(const std::string& name, double value, double lo, double hi) {
        add(name, value, value >= lo && value <= hi, " (in [" + fmt(lo) + ", " + fmt(hi) + "])");
    }

    void holds(const std::string& name, bool ok) {
        parts_.push_back(name + (ok ? " ok" : " VIOLATED"));
        pass_ = pass_ && ok;
    }

    bool emit(const char* id, const char* title) const {
        std::printf("%s %s  %s:", id, pass_ ? "PASS" : "FAIL", title);
        for (std::size_t i = 0; i < parts_.size(); ++i) std::printf("%s %s", i ? ";" : "", parts_[i].c_str());
        std::printf("\n");
        std::fflush(stdout);
        return pass_;
    }

private:
    static std::string fmt(double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    }

    void add(const std::string& name, double value, bool ok, const std::string& rule) {
        parts_.push_back(name + "=" + fmt(value) + rule + (ok ? "" : " MISS"));
        pass_ = pass_ && ok;
    }

    std::vector<std::string> parts_;
    bool pass_ = true;
};

std::vector<double> range(double from, double to, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

bool ac1(const RunConfig& c) {
    Report r;
    const auto start = Clock::now();
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    const double elapsed = seconds_since(start);
    r.near("theta*[%]", 100 * eq.theta_star, 20.86, 0.005);
    r.near("xi*", eq.xi_star, 1.5, 0.0);
    r.near("pi_I1[%]", 100 * eq.pi_I_0(0), 31.69, 0.005);
    r.near("pi_I2[%]", 100 * eq.pi_I_0(1), 0.0, 0.005);
    r.near("pi_R1[%]", 100 * eq.pi_R_0(0), 31.67, 0.005);
    r.near("pi_R2[%]", 100 * eq.pi_R_0(1), -16.42, 0.005);
    r.at_most("runtime[s]", elapsed, 1.0);
    return r.emit("AC1", "equilibrium reproduction");
}

bool ac2(const RunConfig& c) {
    Report r;
    r.near("merton_fraction[%]", 100 * insurer_merton_fraction(c.insurer, c.market), 29.48, 0.005);
    return r.emit("AC2", "benchmark weight consistency");
}

bool ac3(const RunConfig& c) {
    Report r;
    const auto start = Clock::now();
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    const double q1 = loss_probability(1.0, eq, c.reinsurer, c.terms, c.market);
    const double a_inc = discount_select(LossProbIncrease{1e-4}, eq, c.reinsurer, c.terms, c.market);
    const double a_max = discount_select(MaxLossProb{0.005}, eq, c.reinsurer, c.terms, c.market);
    const double elapsed = seconds_since(start);
    r.near("Q(1)[%]", 100 * q1, 0.4413, 0.003);
    r.near("alpha(Q(1)+0.01pp)[%]", 100 * a_inc, 86.73, 0.1);
    r.near("alpha(Q=0.5%)[%]", 100 * a_max, 20.74, 0.1);
    r.at_most("runtime[s]", elapsed, 1.0);
    return r.emit("AC3", "loss probability suite");
}

bool ac4(const RunConfig& c) {
    Report r;
    const MarketParams& m = c.market;
    const ContractTerms& t = c.terms;
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, t, m);
    const WeucResult disc = weuc(ActionCombination::at_equilibrium(eq),
                                 ActionCombination::discounted(eq, 0.95), Party::Reinsurer,
                                 c.reinsurer, t, m);
    r.near("reinsurer_5%_discount[bp]", disc.basis_points(), 6.0, 0.5);
    r.near("alpha(cap 25bp)[%]", 100 * discount_select(WeucCap{25e-4}, eq, c.reinsurer, t, m), 79.27, 0.1);
    const double alpha = 0.8673;
    const WeucResult benefit = weuc(ActionCombination::discounted(eq, alpha),
                                    ActionCombination::without_reinsurance(), Party::Insurer,
                                    c.insurer, t, m);
    r.near("insurer_benefit_base[bp]", benefit.basis_points(), 16.0, 1.0);
    const auto merton = insurer_benefit_surface(alpha, {5.0, 15.0}, {20.0}, OptimalStrategy{},
                                                c.reinsurer, t, m);
    const auto mix = insurer_benefit_surface(alpha, {5.0, 15.0}, {20.0},
                                             ConstantMix{Eigen::Vector2d(0.15, 0.0)}, c.reinsurer, t, m);
    r.near_rel("(5,20)_vs_merton[bp]", merton[0].weuc.basis_points(), 60.0, 0.02);
    r.near_rel("(5,20)_vs_mix[bp]", mix[0].weuc.basis_points(), 7275.0, 0.02);
    r.near_rel("(15,20)_vs_merton[bp]", merton[1].weuc.basis_points(), 10.0, 0.02);
    r.near_rel("(15,20)_vs_mix[bp]", mix[1].weuc.basis_points(), 287.0, 0.02);
    return r.emit("AC4", "wealth-equivalent utility suite");
}

bool ac5(const RunConfig& c) {
    Report r;
    SimulationConfig sim = c.simulation;
    sim.n_paths = 1000000;
    const auto start = Clock::now();
    const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, c.terms, c.market);
    const VerificationReport rep = verify_all(eq, c.insurer, c.reinsurer, c.terms, c.market, sim);
    const double elapsed = seconds_since(start);
    for (const auto& i : rep.items) r.at_most("|z| " + i.name, std::abs(i.mc.z_score(i.closed_form)), 3.0);
    r.at_most("runtime[s]", elapsed, 120.0);
    return r.emit("AC5", "Monte Carlo verification gate, 1e6 paths");
}

bool ac6(const RunConfig& c) {
    Report r;
    const std::vector<std::pair<std::string, Utility>> utilities = {
        {"power(-4)", PowerUtility{-4.0}},   {"power(-9)", PowerUtility{-9.0}},
        {"power(-14)", PowerUtility{-14.0}}, {"log", LogUtility{}},
        {"hara(10,-9)", HaraUtility{10.0, -9.0}}};
    for (const auto& [name, u] : utilities) {
        const StackelbergEquilibrium eq = solve_equilibrium(u, c.reinsurer, c.terms, c.market);
        r.holds(name + " interior", eq.theta_star > 0.0 && eq.theta_star < c.terms.theta_max);
        const double nu0 = insurer_value_nu(0.0, eq.theta_star, u, c.terms, c.market);
        double worst = 0.0;
        for (int j = 0; j < 20; ++j) {
            const double xi = c.terms.xi_bar * j / 19.0;
            worst = std::max(worst, test::rel_diff(insurer_value_nu(xi, eq.theta_star, u, c.terms, c.market), nu0));
        }
        r.at_most(name + " spread", worst, 1e-12);
    }
    return r.emit("AC6", "insurer indifference at the equilibrium loading");
}

bool ac7(const RunConfig& c) {
    Report r;
    const std::vector<std::size_t> counts = {64, 256, 1024};
    const auto& k = c.terms.contract;
    EnsembleOptions opt = c.simulation.ensemble_options();
    opt.n_paths = 10000;
    const PathEnsemble ens = simulate(c.market, uniform_grid(k.maturity, 1024), k.pi_cm,
                                      {c.terms.s1, c.terms.s2, k.benchmark0}, opt);
    const auto pts = hedge_error(ens, k, c.market, counts);
    const double p0 = put_price(0.0, k.benchmark0, k, c.market).price;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        r.at_most("|cost-P(0)| M=" + std::to_string(pts[i].rebalances), std::abs(pts[i].initial_cost - p0), 1e-10);
        if (i > 0)
            r.within("ratio " + std::to_string(pts[i - 1].rebalances) + "/" + std::to_string(pts[i].rebalances),
                     pts[i - 1].rms / pts[i].rms, 1.6, 2.6);
    }
    return r.emit("AC7", "hedging convergence, 1e4 paths");
}

bool ac8(const RunConfig& c) {
    Report r;
    const MarketParams& m = c.market;
    const ContractTerms& t = c.terms;
    auto monotone = [](const std::vector<SweepRow>& rows, auto cmp) {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!cmp(rows[i - 1].eq.theta_star, rows[i].eq.theta_star)) return false;
        return true;
    };
    auto full = [&](const std::vector<SweepRow>& rows) {
        for (const auto& row : rows)
            if (row.eq.xi_star != t.xi_bar) return false;
        return true;
    };
    const auto by_r = sensitivity_sweep(SweepParameter::Rate, range(-0.02, 0.02, 9), c.insurer, c.reinsurer, t, m);
    const auto by_t = sensitivity_sweep(SweepParameter::Horizon, range(1.0, 20.0, 20), c.insurer, c.reinsurer, t, m);
    const auto by_g = sensitivity_sweep(SweepParameter::Guarantee, range(60.0, 110.0, 11), c.insurer, c.reinsurer, t, m);
    r.holds("increasing in r", monotone(by_r, std::less<>{}));
    r.holds("increasing in T", monotone(by_t, std::less<>{}));
    r.holds("decreasing in G_T", monotone(by_g, std::greater<>{}));
    bool xi_ok = full(by_r) && full(by_t) && full(by_g);
    for (SweepParameter p : {SweepParameter::RraInsurer, SweepParameter::RraReinsurer}) {
        const auto rows = sensitivity_sweep(p, range(1.0, 20.0, 20), c.insurer, c.reinsurer, t, m);
        double worst = 0.0;
        for (const auto& row : rows) worst = std::max(worst, test::rel_diff(row.eq.theta_star, rows[0].eq.theta_star));
        r.at_most(std::string("spread in ") + to_string(p), worst, 1e-12);
        xi_ok = xi_ok && full(rows);
    }
    r.holds("xi*=xi_bar throughout", xi_ok);
    return r.emit("AC8", "sensitivity monotonicity");
}

bool ac9(const RunConfig& c) {
    Report r;
    MarketParams perturbed1 = c.market;
    perturbed1.mu2 = 0.14;
    perturbed1.rho = 0.6;
    MarketParams perturbed2 = c.market;
    perturbed2.r = 0.03;
    perturbed2.sigma1 = 0.2;
    const std::vector<std::pair<std::string, MarketParams>> cases = {
        {"base", c.market}, {"perturbed1", perturbed1}, {"perturbed2", perturbed2}};
    for (const auto& [name, m] : cases) {
        ContractTerms t = c.terms;
        t.contract.pi_cm = insurer_merton_fraction(c.insurer, m);
        const StackelbergEquilibrium eq = solve_equilibrium(c.insurer, c.reinsurer, t, m);
        const test::LatticeResult lat = test::lattice_equilibrium(c.insurer, c.reinsurer, t, m);
        r.at_most(name + " |dtheta|/step", std::abs(lat.theta - eq.theta_star) / lat.theta_step, 1.0);
        r.at_most(name + " |dxi|/step", std::abs(lat.xi - eq.xi_star) / lat.xi_step, 1.0);
    }
    return r.emit("AC9", "lattice search equivalence, 200x200");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : STACKRE_SOURCE_DIR "/configs/table1.cfg";
    RunConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    const std::vector<std::function<bool(const RunConfig&)>> criteria = {ac1, ac2, ac3, ac4, ac5,
                                                                        ac6, ac7, ac8, ac9};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        bool ok = false;
        try {
            ok = criteria[i](cfg);
        } catch (const std::exception& e) {
            std::printf("AC%zu FAIL  error: %s\n", i + 1, e.what());
        }
        failed += ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
