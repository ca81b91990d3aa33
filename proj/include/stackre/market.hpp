#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace stackre {

// Two risky assets driven by correlated Brownian motions plus a bank account.
// All rates and volatilities are per-year decimals (0.0102, not 1.02).
struct MarketParams {
    double r = 0.0102;
    double mu1 = 0.1752;
    double mu2 = 0.1237;
    double sigma1 = 0.2366;
    double sigma2 = 0.2198;
    double rho = 0.8012;

    // Throws std::invalid_argument naming the violated condition.
    void validate() const;

    Eigen::Vector2d drift() const { return {mu1, mu2}; }
    Eigen::Vector2d excess_return() const { return {mu1 - r, mu2 - r}; }

    // Lower-triangular sigma with sigma * sigma^T the instantaneous covariance.
    Eigen::Matrix2d volatility() const;
    Eigen::Matrix2d covariance() const;

    // gamma solving sigma * gamma = mu - r.
    Eigen::Vector2d market_price_of_risk() const;
};

// Tolerance for rejecting |rho| too close to 1.
inline constexpr double kCorrelationMargin = 1e-9;

// Drift shift of the auxiliary market. Only the second asset is shifted, so
// the shift lies in {0} x R by construction.
struct DualShift {
    double lambda2 = 0.0;

    Eigen::Vector2d vector() const { return {0.0, lambda2}; }
};

// Shift that makes the unconstrained auxiliary-market Merton portfolio hold
// nothing in the second asset.
DualShift optimal_dual_shift(const MarketParams& params);

// gamma + sigma^{-1} lambda.
Eigen::Vector2d shifted_market_price_of_risk(const MarketParams& params, const DualShift& shift);

// E[Z_lambda(t)^k] for the (lognormal) pricing kernel of the shifted market.
double kernel_moment(const MarketParams& params, const DualShift& shift, double k, double t);

// Same for the basic market kernel.
inline double kernel_moment(const MarketParams& params, double k, double t) {
    return kernel_moment(params, DualShift{}, k, t);
}

struct InitialLevels {
    double s1 = 1.0;
    double s2 = 1.0;
    double benchmark = 100.0;
};

// Measure the paths are sampled under. The stored Brownian paths are always
// the physical ones, so every derived level is correct pathwise; under the
// risk-neutral (auxiliary) measure E[Z(T) X] is the plain average of
// e^{-rT} X (e^{-rT} X with Z_aux).
enum class Measure { Physical, RiskNeutral, Auxiliary };

struct EnsembleOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    bool antithetic = false;
    // Global index of the first path, so large runs can be generated in
    // batches that reproduce the corresponding slice of one big ensemble.
    std::size_t first_path = 0;
    Measure measure = Measure::Physical;
    // 0 reads STACKRE_THREADS from the environment, falling back to 1.
    unsigned threads = 0;
};

// Sampled paths of every driving process on a common grid. Storage is
// path-major: path p occupies [p * points(), (p + 1) * points()).
class PathEnsemble {
public:
    PathEnsemble() = default;

    std::uint64_t seed() const { return seed_; }
    bool antithetic() const { return antithetic_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t steps() const { return grid_.empty() ? 0 : grid_.size() - 1; }
    std::size_t points() const { return grid_.size(); }
    const std::vector<double>& grid() const { return grid_; }
    double horizon() const { return grid_.back(); }
    double pi_cm() const { return pi_cm_; }
    Measure measure() const { return measure_; }
    const MarketParams& params() const { return params_; }
    const InitialLevels& initial() const { return initial_; }

    double bond(std::size_t k) const;
    double w1(std::size_t p, std::size_t k) const { return w1_[at(p, k)]; }
    double w2(std::size_t p, std::size_t k) const { return w2_[at(p, k)]; }
    double s1(std::size_t p, std::size_t k) const { return s1_[at(p, k)]; }
    double s2(std::size_t p, std::size_t k) const { return s2_[at(p, k)]; }
    double benchmark(std::size_t p, std::size_t k) const { return benchmark_[at(p, k)]; }
    double kernel(std::size_t p, std::size_t k) const { return kernel_[at(p, k)]; }
    double kernel_aux(std::size_t p, std::size_t k) const { return kernel_aux_[at(p, k)]; }

    std::span<const double> benchmark_path(std::size_t p) const { return row(benchmark_, p); }
    std::span<const double> kernel_path(std::size_t p) const { return row(kernel_, p); }
    std::span<const double> kernel_aux_path(std::size_t p) const { return row(kernel_aux_, p); }
    std::span<const double> s1_path(std::size_t p) const { return row(s1_, p); }
    std::span<const double> s2_path(std::size_t p) const { return row(s2_, p); }
    std::span<const double> w1_path(std::size_t p) const { return row(w1_, p); }
    std::span<const double> w2_path(std::size_t p) const { return row(w2_, p); }

    // Same paths observed on every `stride`-th grid point; stride must divide steps().
    PathEnsemble coarsened(std::size_t stride) const;

private:
    friend PathEnsemble simulate(const MarketParams&, std::vector<double>, double,
                                 const InitialLevels&, const EnsembleOptions&);

    std::size_t at(std::size_t p, std::size_t k) const { return p * grid_.size() + k; }
    std::span<const double> row(const std::vector<double>& v, std::size_t p) const {
        return {v.data() + p * grid_.size(), grid_.size()};
    }

    MarketParams params_{};
    InitialLevels initial_{};
    double pi_cm_ = 0.0;
    Measure measure_ = Measure::Physical;
    std::uint64_t seed_ = 0;
    bool antithetic_ = false;
    std::size_t n_paths_ = 0;
    std::vector<double> grid_;
    std::vector<double> w1_, w2_, s1_, s2_, benchmark_, kernel_, kernel_aux_;
};

std::vector<double> uniform_grid(double horizon, std::size_t steps);

// Exact lognormal sampling of S1, S2, the constant-mix benchmark and both
// pricing kernels. Throws std::invalid_argument for a grid that does not start
// at 0 or is not strictly increasing.
PathEnsemble simulate(const MarketParams& params, std::vector<double> grid, double pi_cm,
                      const InitialLevels& initial, const EnsembleOptions& options);

PathEnsemble simulate(const MarketParams& params, double horizon, double pi_cm,
                      std::size_t steps, std::size_t n_paths, std::uint64_t seed,
                      const InitialLevels& initial = {}, bool antithetic = false);

// Seed of the generator used for path `path_index` (antithetic partners share it).
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_index);

unsigned default_thread_count();

}  // namespace stackre
