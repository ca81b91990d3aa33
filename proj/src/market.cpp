#include "stackre/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stackre/parallel.hpp"

namespace stackre {

void MarketParams::validate() const {
    if (!(sigma1 > 0.0)) throw std::invalid_argument("market: sigma1 must be positive");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("market: sigma2 must be positive");
    if (!(std::abs(rho) < 1.0 - kCorrelationMargin))
        throw std::invalid_argument("market: rho must lie strictly inside (-1, 1)");
    if (!(mu1 > r)) throw std::invalid_argument("market: mu1 must exceed r");
    if (!(mu2 > r)) throw std::invalid_argument("market: mu2 must exceed r");
    if (!std::isfinite(r)) throw std::invalid_argument("market: r must be finite");
}

Eigen::Matrix2d MarketParams::volatility() const {
    Eigen::Matrix2d s;
    s << sigma1, 0.0, sigma2 * rho, sigma2 * std::sqrt(1.0 - rho * rho);
    return s;
}

Eigen::Matrix2d MarketParams::covariance() const {
    const Eigen::Matrix2d s = volatility();
    return s * s.transpose();
}

Eigen::Vector2d MarketParams::market_price_of_risk() const {
    return volatility().triangularView<Eigen::Lower>().solve(excess_return());
}

DualShift optimal_dual_shift(const MarketParams& params) {
    return DualShift{params.sigma2 * params.rho / params.sigma1 * (params.mu1 - params.r) -
                     params.mu2 + params.r};
}

Eigen::Vector2d shifted_market_price_of_risk(const MarketParams& params, const DualShift& shift) {
    const Eigen::Matrix2d s = params.volatility();
    return params.market_price_of_risk() + s.triangularView<Eigen::Lower>().solve(shift.vector());
}

double kernel_moment(const MarketParams& params, const DualShift& shift, double k, double t) {
    if (t < 0.0) throw std::invalid_argument("kernel_moment: t must be non-negative");
    const double g2 = shifted_market_price_of_risk(params, shift).squaredNorm();
    return std::exp(-k * params.r * t + 0.5 * k * (k - 1.0) * g2 * t);
}

double PathEnsemble::bond(std::size_t k) const {
    return std::exp(params_.r * grid_.at(k));
}

PathEnsemble PathEnsemble::coarsened(std::size_t stride) const {
    if (stride == 0 || steps() % stride != 0)
        throw std::invalid_argument("coarsened: stride must divide the number of steps");
    PathEnsemble c;
    c.params_ = params_;
    c.initial_ = initial_;
    c.pi_cm_ = pi_cm_;
    c.seed_ = seed_;
    c.antithetic_ = antithetic_;
    c.measure_ = measure_;
    c.n_paths_ = n_paths_;
    for (std::size_t k = 0; k < grid_.size(); k += stride) c.grid_.push_back(grid_[k]);
    const std::size_t pts = c.grid_.size();
    auto thin = [&](const std::vector<double>& src, std::vector<double>& dst) {
        dst.resize(n_paths_ * pts);
        for (std::size_t p = 0; p < n_paths_; ++p)
            for (std::size_t j = 0; j < pts; ++j) dst[p * pts + j] = src[at(p, j * stride)];
    };
    thin(w1_, c.w1_);
    thin(w2_, c.w2_);
    thin(s1_, c.s1_);
    thin(s2_, c.s2_);
    thin(benchmark_, c.benchmark_);
    thin(kernel_, c.kernel_);
    thin(kernel_aux_, c.kernel_aux_);
    return c;
}

std::vector<double> uniform_grid(double horizon, std::size_t steps) {
    if (steps < 1) throw std::invalid_argument("grid: at least one step required");
    if (!(horizon > 0.0)) throw std::invalid_argument("grid: horizon must be positive");
    std::vector<double> g(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
        g[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
    g.back() = horizon;
    return g;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// SplitMix64 sequence started at the path seed, turned into normals by
// Box-Muller on 53-bit uniforms; u1 is shifted into (0, 1] so log(u1) is finite.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : state_(seed) {}

    void pair(double& z1, double& z2) {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        z1 = radius * std::cos(angle);
        z2 = radius * std::sin(angle);
    }

private:
    std::uint64_t next() {
        const std::uint64_t out = splitmix64(state_);
        state_ += 0x9E3779B97F4A7C15ULL;
        return out;
    }

    std::uint64_t state_;
};

}  // namespace

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
    return splitmix64(master_seed ^ splitmix64(path_index));
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("STACKRE_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

PathEnsemble simulate(const MarketParams& params, std::vector<double> grid, double pi_cm,
                      const InitialLevels& initial, const EnsembleOptions& options) {
    params.validate();
    if (grid.size() < 2) throw std::invalid_argument("simulate: grid needs at least two points");
    if (grid.front() != 0.0) throw std::invalid_argument("simulate: grid must start at 0");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1]))
            throw std::invalid_argument("simulate: grid not strictly increasing");
    if (options.n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (!(initial.s1 > 0.0 && initial.s2 > 0.0 && initial.benchmark > 0.0))
        throw std::invalid_argument("simulate: initial levels must be positive");
    if (pi_cm < 0.0) throw std::invalid_argument("simulate: pi_cm must be non-negative");
    if (options.antithetic && options.first_path % 2 != 0)
        throw std::invalid_argument("simulate: antithetic batches must start at an even path");

    PathEnsemble e;
    e.params_ = params;
    e.initial_ = initial;
    e.pi_cm_ = pi_cm;
    e.seed_ = options.seed;
    e.antithetic_ = options.antithetic;
    e.measure_ = options.measure;
    e.n_paths_ = options.n_paths;
    e.grid_ = std::move(grid);

    const std::size_t pts = e.grid_.size();
    const std::size_t total = options.n_paths * pts;
    for (auto* v : {&e.w1_, &e.w2_, &e.s1_, &e.s2_, &e.benchmark_, &e.kernel_, &e.kernel_aux_})
        v->assign(total, 0.0);

    const double rho_bar = std::sqrt(1.0 - params.rho * params.rho);
    const Eigen::Vector2d gamma = params.market_price_of_risk();
    const Eigen::Vector2d gamma_aux =
        shifted_market_price_of_risk(params, optimal_dual_shift(params));
    const double s_b = pi_cm * params.sigma2;
    const double drift1 = params.mu1 - 0.5 * params.sigma1 * params.sigma1;
    const double drift2 = params.mu2 - 0.5 * params.sigma2 * params.sigma2;
    const double drift_b = params.r + pi_cm * (params.mu2 - params.r) - 0.5 * s_b * s_b;
    const double drift_z = -(params.r + 0.5 * gamma.squaredNorm());
    const double drift_za = -(params.r + 0.5 * gamma_aux.squaredNorm());
    // Physical Brownian motion expressed through the sampling measure's one.
    Eigen::Vector2d w_drift = Eigen::Vector2d::Zero();
    if (options.measure == Measure::RiskNeutral) w_drift = -gamma;
    else if (options.measure == Measure::Auxiliary) w_drift = -gamma_aux;

    auto fill_path = [&](std::size_t p) {
        const std::size_t global = options.first_path + p;
        const std::uint64_t stream_index = options.antithetic ? global / 2 : global;
        const double sign = (options.antithetic && (global % 2 == 1)) ? -1.0 : 1.0;
        NormalStream normals(path_seed(options.seed, stream_index));
        const std::size_t base = p * pts;
        double w1 = 0.0, w2 = 0.0;
        for (std::size_t k = 0; k < pts; ++k) {
            if (k > 0) {
                const double dt = e.grid_[k] - e.grid_[k - 1];
                double z1, z2;
                normals.pair(z1, z2);
                w1 += sign * std::sqrt(dt) * z1 + w_drift(0) * dt;
                w2 += sign * std::sqrt(dt) * z2 + w_drift(1) * dt;
            }
            const double t = e.grid_[k];
            const double shock2 = params.rho * w1 + rho_bar * w2;
            e.w1_[base + k] = w1;
            e.w2_[base + k] = w2;
            e.s1_[base + k] = initial.s1 * std::exp(drift1 * t + params.sigma1 * w1);
            e.s2_[base + k] = initial.s2 * std::exp(drift2 * t + params.sigma2 * shock2);
            e.benchmark_[base + k] = initial.benchmark * std::exp(drift_b * t + s_b * shock2);
            e.kernel_[base + k] = std::exp(drift_z * t - gamma(0) * w1 - gamma(1) * w2);
            e.kernel_aux_[base + k] = std::exp(drift_za * t - gamma_aux(0) * w1 - gamma_aux(1) * w2);
        }
    };

    parallel_for(options.n_paths, fill_path, options.threads);
    return e;
}

PathEnsemble simulate(const MarketParams& params, double horizon, double pi_cm,
                      std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                      const InitialLevels& initial, bool antithetic) {
    EnsembleOptions opts;
    opts.n_paths = n_paths;
    opts.seed = seed;
    opts.antithetic = antithetic;
    return simulate(params, uniform_grid(horizon, steps), pi_cm, initial, opts);
}

}  // namespace stackre
