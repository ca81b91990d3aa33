#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "stackre/market.hpp"
#include "stackre/normal.hpp"
#include "stackre/simulation.hpp"
#include "support.hpp"

using namespace stackre;
using stackre::test::base_market;

namespace {

std::vector<MarketParams> parameter_sets() {
    std::vector<MarketParams> sets{base_market()};
    sets.push_back({0.03, 0.08, 0.11, 0.15, 0.30, -0.4});
    sets.push_back({-0.01, 0.2, 0.05, 0.35, 0.12, 0.95});
    sets.push_back({0.0, 0.06, 0.06, 0.2, 0.2, 0.0});
    return sets;
}

}  // namespace

TEST_CASE("normal cdf") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(norm_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-15));
    for (double x : {-7.5, -3.0, -0.3, 0.8, 4.0})
        CHECK(norm_cdf(-x) == doctest::Approx(1.0 - norm_cdf(x)).epsilon(1e-14));
    CHECK(norm_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-12));
}

TEST_CASE("market validation") {
    MarketParams m;
    CHECK_NOTHROW(m.validate());
    m.rho = 1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.rho = -1.0 + 1e-10;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = MarketParams{};
    m.sigma2 = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = MarketParams{};
    m.mu1 = NAN;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("market price of risk solves sigma gamma = mu - r") {
    for (const auto& m : parameter_sets()) {
        const Eigen::Vector2d residual = m.volatility() * m.market_price_of_risk() - m.excess_return();
        CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK((m.volatility() * m.volatility().transpose() - m.covariance()).norm() < 1e-15);
    }
}

TEST_CASE("optimal dual shift") {
    SUBCASE("base case value") {
        CHECK(optimal_dual_shift(base_market()).lambda2 ==
              doctest::Approx(test::oracle::lambda2).epsilon(1e-12));
    }
    SUBCASE("auxiliary Merton portfolio holds nothing in the second asset") {
        for (const auto& m : parameter_sets()) {
            const DualShift l = optimal_dual_shift(m);
            const Eigen::Vector2d pi = m.covariance().ldlt().solve(m.excess_return() + l.vector());
            CHECK(std::abs(pi(1)) < 1e-10);
            CHECK(l.vector()(0) == 0.0);
        }
    }
    SUBCASE("unconstrained case") {
        MarketParams m;
        m.mu2 = m.r + m.sigma2 * m.rho * (m.mu1 - m.r) / m.sigma1;
        CHECK(std::abs(optimal_dual_shift(m).lambda2) < 1e-15);
    }
    SUBCASE("independent assets") {
        MarketParams m;
        m.rho = 0.0;
        CHECK(optimal_dual_shift(m).lambda2 == doctest::Approx(m.r - m.mu2).epsilon(1e-15));
    }
}

TEST_CASE("kernel moments") {
    const MarketParams m = base_market();
    const DualShift l = optimal_dual_shift(m);
    for (double t : {0.5, 1.0, 10.0, 30.0}) {
        CHECK(kernel_moment(m, 1.0, t) == doctest::Approx(std::exp(-m.r * t)).epsilon(1e-15));
        CHECK(kernel_moment(m, l, 1.0, t) == doctest::Approx(std::exp(-m.r * t)).epsilon(1e-15));
        CHECK(kernel_moment(m, l, 0.0, t) == 1.0);
    }
    CHECK(kernel_moment(m, l, 0.9, 10.0) ==
          doctest::Approx(test::oracle::moment_aux_09).epsilon(1e-12));
}

TEST_CASE("auxiliary kernel moment against Monte Carlo") {
    const MarketParams m = base_market();
    const PathEnsemble e = simulate(m, 10.0, 0.3, 1, 1000000, 77);
    std::vector<double> x(e.n_paths());
    for (std::size_t p = 0; p < e.n_paths(); ++p) x[p] = std::pow(e.kernel_aux(p, 1), 0.9);
    const EstimateWithError est = estimate(x);
    const double closed = kernel_moment(m, optimal_dual_shift(m), 0.9, 10.0);
    CHECK(est.within(closed));
}

TEST_CASE("ensemble shape and exact transitions") {
    const MarketParams m = base_market();
    const PathEnsemble e = simulate(m, 2.0, 0.25, 8, 50, 3, InitialLevels{2.0, 3.0, 100.0});
    CHECK(e.n_paths() == 50);
    CHECK(e.steps() == 8);
    CHECK(e.points() == 9);
    CHECK(e.horizon() == 2.0);
    for (std::size_t p = 0; p < e.n_paths(); ++p) {
        CHECK(e.s1(p, 0) == 2.0);
        CHECK(e.s2(p, 0) == 3.0);
        CHECK(e.benchmark(p, 0) == 100.0);
        CHECK(e.kernel(p, 0) == 1.0);
        const double t = e.grid()[8];
        const double expected = 2.0 * std::exp((m.mu1 - 0.5 * m.sigma1 * m.sigma1) * t + m.sigma1 * e.w1(p, 8));
        CHECK(e.s1(p, 8) == doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK(e.bond(8) == doctest::Approx(std::exp(m.r * 2.0)).epsilon(1e-15));
}

TEST_CASE("deterministic limit of tiny volatility") {
    MarketParams m = base_market();
    m.sigma1 = 1e-12;
    m.sigma2 = 1e-12;
    m.rho = 0.0;
    const PathEnsemble e = simulate(m, 10.0, 0.3, 4, 100, 11);
    for (std::size_t p = 0; p < e.n_paths(); ++p)
        CHECK(std::abs(e.s1(p, 4) / std::exp(m.mu1 * 10.0) - 1.0) < 1e-6);
}

TEST_CASE("seed contract") {
    const MarketParams m = base_market();
    const PathEnsemble a = simulate(m, 1.0, 0.3, 4, 40, 99);
    const PathEnsemble b = simulate(m, 1.0, 0.3, 4, 40, 99);
    const PathEnsemble c = simulate(m, 1.0, 0.3, 4, 25, 99);
    const PathEnsemble d = simulate(m, 1.0, 0.3, 4, 40, 100);

    SUBCASE("identical seed gives bit-identical paths") {
        for (std::size_t p = 0; p < 40; ++p)
            for (std::size_t k = 0; k < 5; ++k) {
                CHECK(a.w1(p, k) == b.w1(p, k));
                CHECK(a.kernel_aux(p, k) == b.kernel_aux(p, k));
            }
    }
    SUBCASE("shorter runs are prefixes") {
        for (std::size_t p = 0; p < 25; ++p)
            for (std::size_t k = 0; k < 5; ++k) CHECK(a.w2(p, k) == c.w2(p, k));
    }
    SUBCASE("different seed differs") { CHECK(a.w1(0, 1) != d.w1(0, 1)); }
    SUBCASE("batches reproduce slices") {
        EnsembleOptions opt;
        opt.n_paths = 15;
        opt.seed = 99;
        opt.first_path = 10;
        const PathEnsemble s = simulate(m, uniform_grid(1.0, 4), 0.3, {}, opt);
        for (std::size_t p = 0; p < 15; ++p)
            for (std::size_t k = 0; k < 5; ++k) CHECK(s.w1(p, k) == a.w1(p + 10, k));
    }
    SUBCASE("thread count does not change the paths") {
        EnsembleOptions opt;
        opt.n_paths = 40;
        opt.seed = 99;
        opt.threads = 3;
        const PathEnsemble t = simulate(m, uniform_grid(1.0, 4), 0.3, {}, opt);
        for (std::size_t p = 0; p < 40; ++p) CHECK(t.benchmark(p, 4) == a.benchmark(p, 4));
    }
    SUBCASE("path seeds are distinct") { CHECK(path_seed(99, 0) != path_seed(99, 1)); }
}

TEST_CASE("antithetic pairs") {
    const PathEnsemble e = simulate(base_market(), 1.0, 0.3, 3, 10, 5, {}, true);
    for (std::size_t p = 0; p < 10; p += 2)
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(e.w1(p, k) == -e.w1(p + 1, k));
            CHECK(e.w2(p, k) == -e.w2(p + 1, k));
        }
    EnsembleOptions opt;
    opt.n_paths = 4;
    opt.antithetic = true;
    opt.first_path = 3;
    CHECK_THROWS_AS(simulate(base_market(), uniform_grid(1.0, 2), 0.3, {}, opt), std::invalid_argument);
}

TEST_CASE("coarsened ensembles keep the same Brownian paths") {
    const PathEnsemble fine = simulate(base_market(), 1.0, 0.3, 12, 20, 8);
    const PathEnsemble coarse = fine.coarsened(4);
    REQUIRE(coarse.steps() == 3);
    for (std::size_t p = 0; p < 20; ++p)
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(coarse.grid()[k] == fine.grid()[4 * k]);
            CHECK(coarse.w1(p, k) == fine.w1(p, 4 * k));
            CHECK(coarse.benchmark(p, k) == fine.benchmark(p, 4 * k));
            CHECK(coarse.kernel_aux(p, k) == fine.kernel_aux(p, 4 * k));
        }
    CHECK(fine.coarsened(1).steps() == 12);
    CHECK_THROWS_AS(fine.coarsened(5), std::invalid_argument);
    CHECK_THROWS_AS(fine.coarsened(0), std::invalid_argument);
}

TEST_CASE("simulate rejects bad grids") {
    CHECK_THROWS_AS(simulate(base_market(), {0.0}, 0.3, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(simulate(base_market(), {0.1, 0.5}, 0.3, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(simulate(base_market(), {0.0, 0.5, 0.5}, 0.3, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid(1.0, 0), std::invalid_argument);
}
