#include "stackre/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stackre/normal.hpp"
#include "stackre/option_pricing.hpp"
#include "stackre/parallel.hpp"

namespace stackre {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::string list_paths(const std::vector<std::size_t>& paths) {
    std::ostringstream os;
    os << "non-finite Monte Carlo samples on " << paths.size() << " path(s):";
    const std::size_t shown = std::min<std::size_t>(paths.size(), 10);
    for (std::size_t i = 0; i < shown; ++i) os << ' ' << paths[i];
    if (shown < paths.size()) os << " ...";
    return os.str();
}

void require_physical(const PathEnsemble& ensemble, const char* who) {
    if (ensemble.measure() != Measure::Physical)
        throw std::invalid_argument(std::string(who) + ": needs paths sampled under the physical measure");
}

void check_horizon(const PathEnsemble& ensemble, double maturity) {
    if (std::abs(ensemble.horizon() - maturity) > 1e-12 * maturity)
        throw std::invalid_argument("ensemble horizon differs from the contract maturity");
}

std::vector<double> collect(const PathEnsemble& ensemble, const TerminalExpression& expression) {
    std::vector<double> samples(ensemble.n_paths());
    parallel_for(ensemble.n_paths(), [&](std::size_t p) { samples[p] = expression(ensemble, p); });
    std::vector<std::size_t> bad;
    for (std::size_t p = 0; p < samples.size(); ++p)
        if (!std::isfinite(samples[p])) bad.push_back(p);
    if (!bad.empty()) throw NonFiniteSamples(std::move(bad));
    return samples;
}

}  // namespace

void SimulationConfig::validate() const {
    if (n_paths < 2) throw std::invalid_argument("simulation: n_paths must be >= 2");
    if (steps < 1) throw std::invalid_argument("simulation: steps must be >= 1");
    if (antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("simulation: antithetic sampling needs an even n_paths");
}

EnsembleOptions SimulationConfig::ensemble_options(Measure measure) const {
    EnsembleOptions o;
    o.measure = measure;
    o.n_paths = n_paths;
    o.seed = seed;
    o.antithetic = antithetic;
    return o;
}

double EstimateWithError::z_score(double target) const {
    const double diff = std::abs(mean - target);
    if (std_error > 0.0) return diff / std_error;
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

bool EstimateWithError::within(double target, double n_se) const {
    return z_score(target) <= n_se;
}

NonFiniteSamples::NonFiniteSamples(std::vector<std::size_t> paths)
    : std::runtime_error(list_paths(paths)), paths_(std::move(paths)) {}

EstimateWithError estimate(std::span<const double> samples, bool antithetic) {
    std::vector<double> paired;
    if (antithetic) {
        if (samples.size() % 2 != 0)
            throw std::invalid_argument("estimate: antithetic samples come in pairs");
        paired.resize(samples.size() / 2);
        for (std::size_t i = 0; i < paired.size(); ++i)
            paired[i] = 0.5 * (samples[2 * i] + samples[2 * i + 1]);
        samples = paired;
    }
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("estimate: at least two samples required");

    CompensatedSum sum;
    for (double x : samples) sum.add(x);
    const double mean = sum.value() / static_cast<double>(n);
    CompensatedSum sq;
    for (double x : samples) sq.add((x - mean) * (x - mean));
    const double var = sq.value() / static_cast<double>(n - 1);

    EstimateWithError e;
    e.mean = mean;
    e.std_error = std::sqrt(var / static_cast<double>(n));
    e.n = antithetic ? 2 * n : n;
    return e;
}

EstimateWithError expected_utility_mc(const PathEnsemble& ensemble,
                                      const TerminalExpression& expression) {
    const std::vector<double> samples = collect(ensemble, expression);
    return estimate(samples, ensemble.antithetic());
}

std::size_t WealthPaths::absorbed_count() const {
    return static_cast<std::size_t>(std::count(absorbed.begin(), absorbed.end(), 1));
}

WealthPaths evolve_wealth(const PathEnsemble& ensemble, const PortfolioRule& rule,
                          double initial_wealth) {
    if (!(initial_wealth > 0.0)) throw std::invalid_argument("evolve_wealth: initial wealth must be positive");
    const MarketParams& params = ensemble.params();
    const Eigen::Matrix2d sigma = params.volatility();
    const Eigen::Vector2d excess = params.excess_return();
    const auto& grid = ensemble.grid();

    WealthPaths out;
    out.n_paths = ensemble.n_paths();
    out.points = ensemble.points();
    out.wealth.assign(out.n_paths * out.points, 0.0);
    out.absorbed.assign(out.n_paths, 0);

    parallel_for(out.n_paths, [&](std::size_t p) {
        double v = initial_wealth;
        out.wealth[p * out.points] = v;
        for (std::size_t k = 0; k + 1 < out.points; ++k) {
            if (v > 0.0) {
                Eigen::Vector2d pi;
                try {
                    pi = rule(state_at(ensemble, p, k), v);
                } catch (const std::exception& ex) {
                    std::ostringstream os;
                    os << "evolve_wealth: rule failed on path " << p << " at t = " << grid[k]
                       << ": " << ex.what();
                    throw std::runtime_error(os.str());
                }
                if (!pi.allFinite()) {
                    std::ostringstream os;
                    os << "evolve_wealth: rule returned non-finite weights on path " << p
                       << " at t = " << grid[k];
                    throw std::runtime_error(os.str());
                }
                const double dt = grid[k + 1] - grid[k];
                const Eigen::Vector2d dw(ensemble.w1(p, k + 1) - ensemble.w1(p, k),
                                         ensemble.w2(p, k + 1) - ensemble.w2(p, k));
                const Eigen::Vector2d vol = sigma.transpose() * pi;
                const double drift = params.r + pi.dot(excess) - 0.5 * vol.squaredNorm();
                v *= std::exp(drift * dt + vol.dot(dw));
                if (!(v > 0.0) || !std::isfinite(v)) {
                    v = 0.0;
                    out.absorbed[p] = 1;
                }
            }
            out.wealth[p * out.points + k + 1] = v;
        }
    });
    return out;
}

namespace {

struct LossModel {
    double cushion = 0.0;
    double moment = 0.0;
    double exponent = 0.0;  // b - 1
};

LossModel loss_model(double alpha, const StackelbergEquilibrium& eq, const Utility& reinsurer,
                     const ContractTerms& terms, const MarketParams& params) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("loss probability: alpha must lie in [0, 1]");
    if (std::holds_alternative<HaraUtility>(reinsurer))
        throw std::invalid_argument("reinsurer: HARA utility is not supported");
    const double b = utility_exponent(reinsurer);
    LossModel m;
    m.cushion = terms.reinsurer_wealth + eq.xi_star * alpha * eq.theta_star * eq.p0;
    m.moment = kernel_moment(params, b / (b - 1.0), terms.contract.maturity);
    m.exponent = b - 1.0;
    return m;
}

}  // namespace

double loss_probability(double alpha, const StackelbergEquilibrium& eq, const Utility& reinsurer,
                        const ContractTerms& terms, const MarketParams& params) {
    const LossModel m = loss_model(alpha, eq, reinsurer, terms, params);
    const double horizon = terms.contract.maturity;
    const double g = params.market_price_of_risk().norm();
    // Terminal net wealth cushion/moment * Z(T)^{1/(b-1)} falls below v_R
    // exactly when ln Z(T) exceeds this threshold.
    const double threshold = m.exponent * std::log(terms.reinsurer_wealth * m.moment / m.cushion);
    const double mean = -(params.r + 0.5 * g * g) * horizon;
    return norm_cdf((mean - threshold) / (g * std::sqrt(horizon)));
}

EstimateWithError loss_probability_mc(double alpha, const StackelbergEquilibrium& eq,
                                      const Utility& reinsurer, const ContractTerms& terms,
                                      const MarketParams& params, const PathEnsemble& ensemble) {
    const LossModel m = loss_model(alpha, eq, reinsurer, terms, params);
    check_horizon(ensemble, terms.contract.maturity);
    require_physical(ensemble, "loss_probability_mc");
    const std::size_t last = ensemble.points() - 1;
    return expected_utility_mc(ensemble, [&](const PathEnsemble& e, std::size_t p) {
        const double net = m.cushion / m.moment * std::pow(e.kernel(p, last), 1.0 / m.exponent);
        return net < terms.reinsurer_wealth ? 1.0 : 0.0;
    });
}

std::vector<HedgeErrorPoint> hedge_error(const PathEnsemble& ensemble,
                                         const ReinsuranceContract& contract,
                                         const MarketParams& params,
                                         const std::vector<std::size_t>& rebalances) {
    contract.validate();
    check_horizon(ensemble, contract.maturity);
    require_physical(ensemble, "hedge_error");
    if (std::abs(ensemble.pi_cm() - contract.pi_cm) > 1e-15 ||
        std::abs(ensemble.initial().benchmark - contract.benchmark0) > 1e-12 * contract.benchmark0)
        throw std::invalid_argument("hedge_error: ensemble benchmark does not match the contract");

    const auto& grid = ensemble.grid();
    const std::size_t steps = ensemble.steps();
    const std::size_t last = ensemble.points() - 1;
    std::vector<HedgeErrorPoint> out;
    for (std::size_t m : rebalances) {
        if (m == 0 || steps % m != 0)
            throw std::invalid_argument("hedge_error: rebalance count must divide the grid steps");
        const std::size_t stride = steps / m;

        const ReplicationShares psi0 =
            replication_strategy(0.0, contract.benchmark0, 1.0, ensemble.initial().s2, contract, params);
        HedgeErrorPoint pt;
        pt.rebalances = m;
        pt.initial_cost = psi0.bond + psi0.asset2 * ensemble.initial().s2;

        std::vector<double> sq(ensemble.n_paths());
        parallel_for(ensemble.n_paths(), [&](std::size_t p) {
            double value = pt.initial_cost;
            for (std::size_t k = 0; k < steps; k += stride) {
                const std::size_t next = k + stride;
                const ReplicationShares psi = replication_strategy(
                    grid[k], ensemble.benchmark(p, k), ensemble.bond(k), ensemble.s2(p, k),
                    contract, params);
                const double in_s2 = psi.asset2 * ensemble.s2(p, k);
                value = (value - in_s2) * ensemble.bond(next) / ensemble.bond(k) +
                        psi.asset2 * ensemble.s2(p, next);
            }
            const double payoff = std::max(contract.guarantee - ensemble.benchmark(p, last), 0.0);
            sq[p] = (value - payoff) * (value - payoff);
        });
        CompensatedSum sum;
        for (double x : sq) sum.add(x);
        pt.rms = std::sqrt(sum.value() / static_cast<double>(sq.size()));
        out.push_back(pt);
    }
    return out;
}

std::vector<WealthGapPoint> strategy_wealth_gap(const PathEnsemble& ensemble,
                                                const StackelbergEquilibrium& eq,
                                                const Utility& insurer, const Utility& reinsurer,
                                                const ContractTerms& terms,
                                                const MarketParams& params,
                                                const std::vector<std::size_t>& rebalances) {
    check_horizon(ensemble, terms.contract.maturity);
    require_physical(ensemble, "strategy_wealth_gap");
    const MarketState s0 = initial_state(terms);
    const double v_i0 = insurer_wealth(s0, eq, insurer, terms, params);
    const double v_r0 = reinsurer_wealth(s0, eq, reinsurer, terms, params);
    const PortfolioRule rule_i = [&](const MarketState& s, double v) {
        return insurer_portfolio_at(s, v, eq, insurer, terms, params).total;
    };
    const PortfolioRule rule_r = [&](const MarketState& s, double v) {
        return reinsurer_portfolio_at(s, v, eq, reinsurer, terms, params);
    };

    std::vector<WealthGapPoint> out;
    for (std::size_t m : rebalances) {
        if (m == 0 || ensemble.steps() % m != 0)
            throw std::invalid_argument("strategy_wealth_gap: rebalance count must divide the grid steps");
        const PathEnsemble coarse = ensemble.coarsened(ensemble.steps() / m);
        const WealthPaths wi = evolve_wealth(coarse, rule_i, v_i0);
        const WealthPaths wr = evolve_wealth(coarse, rule_r, v_r0);
        const std::size_t last = coarse.points() - 1;
        std::vector<double> sq_i(coarse.n_paths()), sq_r(coarse.n_paths());
        parallel_for(coarse.n_paths(), [&](std::size_t p) {
            const MarketState s = state_at(coarse, p, last);
            const double di = wi.terminal(p) - insurer_wealth(s, eq, insurer, terms, params);
            const double dr = wr.terminal(p) - reinsurer_wealth(s, eq, reinsurer, terms, params);
            sq_i[p] = di * di;
            sq_r[p] = dr * dr;
        });
        CompensatedSum si, sr;
        for (std::size_t p = 0; p < sq_i.size(); ++p) {
            si.add(sq_i[p]);
            sr.add(sq_r[p]);
        }
        const double n = static_cast<double>(sq_i.size());
        out.push_back({m, std::sqrt(si.value() / n), std::sqrt(sr.value() / n), wi.absorbed_count(),
                       wr.absorbed_count()});
    }
    return out;
}

bool VerificationReport::pass() const {
    return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

const VerificationItem* VerificationReport::worst() const {
    const VerificationItem* w = nullptr;
    for (const auto& i : items)
        if (!w || i.mc.z_score(i.closed_form) > w->mc.z_score(w->closed_form)) w = &i;
    return w;
}

VerificationReport verify_all(const StackelbergEquilibrium& eq, const Utility& insurer,
                              const Utility& reinsurer, const ContractTerms& terms,
                              const MarketParams& params, const SimulationConfig& config) {
    config.validate();
    const auto& c = terms.contract;
    InitialLevels init{terms.s1, terms.s2, c.benchmark0};
    // Only terminal values enter, so a single exact step suffices.
    auto sample = [&](Measure measure) {
        return simulate(params, uniform_grid(c.maturity, 1), c.pi_cm, init,
                        config.ensemble_options(measure));
    };
    const std::size_t last = 1;
    const double b_i = utility_exponent(insurer);
    const double b_r = utility_exponent(reinsurer);
    const double a_i = utility_shift(insurer);
    const double discount = std::exp(-params.r * c.maturity);

    VerificationReport rep;
    auto add = [&](std::string name, double closed, const PathEnsemble& ens,
                   const TerminalExpression& f) {
        VerificationItem item;
        item.name = std::move(name);
        item.closed_form = closed;
        item.mc = expected_utility_mc(ens, f);
        item.pass = item.mc.within(closed);
        rep.items.push_back(std::move(item));
    };
    auto payoff = [&](const PathEnsemble& e, std::size_t p) {
        return std::max(c.guarantee - e.benchmark(p, last), 0.0);
    };
    auto insurer_optimum = [&](const PathEnsemble& e, std::size_t p) {
        return std::pow(eq.y_I_star * e.kernel_aux(p, last), 1.0 / (b_i - 1.0)) - a_i;
    };
    auto discounted_payoff = [&](const PathEnsemble& e, std::size_t p) { return discount * payoff(e, p); };

    add("P(0)", eq.p0, sample(Measure::RiskNeutral), discounted_payoff);
    add("P_aux(0)", eq.p0_aux, sample(Measure::Auxiliary), discounted_payoff);

    const PathEnsemble ens = sample(Measure::Physical);
    add("insurer expected utility", insurer_value_nu(eq.xi_star, eq.theta_star, insurer, terms, params), ens,
        [&](const PathEnsemble& e, std::size_t p) {
            return evaluate(insurer, std::max(insurer_optimum(e, p), eq.xi_star * payoff(e, p)));
        });
    add("reinsurer expected utility", reinsurer_value(eq.theta_star, eq.xi_star, reinsurer, terms, params), ens,
        [&](const PathEnsemble& e, std::size_t p) {
            return evaluate(reinsurer, std::pow(eq.y_R_star * e.kernel(p, last), 1.0 / (b_r - 1.0)));
        });
    VerificationItem q;
    q.name = "Q(1)";
    q.closed_form = loss_probability(1.0, eq, reinsurer, terms, params);
    q.mc = loss_probability_mc(1.0, eq, reinsurer, terms, params, ens);
    q.pass = q.mc.within(q.closed_form);
    rep.items.push_back(q);

    for (std::size_t p = 0; p < ens.n_paths(); ++p)
        if (eq.xi_star * payoff(ens, p) > insurer_optimum(ens, p)) ++rep.insurer_floor_binding;
    return rep;
}

}  // namespace stackre
