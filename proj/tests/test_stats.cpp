#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "edgar/stats.hpp"
#include "edgar/synth/oracle.hpp"

using namespace edgar;
using namespace edgar::stats;

namespace {

EnrichmentCounts c(std::int64_t N, std::int64_t K, std::int64_t n, std::int64_t k) { return {N, K, n, k}; }

double rel_err(double got, double want) {
    if (want == 0) return std::fabs(got);
    return std::fabs(got - want) / want;
}

} // namespace

TEST(Exact, ZeroObservedIsOne) {
    EXPECT_EQ(hypergeom_sf_exact(c(100, 10, 5, 0)).value, 1.0);
    EXPECT_EQ(hypergeom_sf_exact(c(0, 0, 0, 0)).value, 1.0);
}

TEST(Exact, SmallCaseMatchesHandCount) {
    // N=10, K=5, n=4: P(X>=3) = (C(5,3)C(5,1) + C(5,4)) / C(10,4) = 55/210
    EXPECT_NEAR(hypergeom_sf_exact(c(10, 5, 4, 3)).value, 55.0 / 210.0, 1e-15);
}

TEST(Exact, FullOverlapIsReciprocalBinomial) {
    // K = k = n: a single configuration out of C(N, n)
    EXPECT_NEAR(hypergeom_sf_exact(c(20, 3, 3, 3)).value, 1.0 / 1140.0, 1e-18);
}

TEST(Exact, ObservedAboveMinRaisesNamingK) {
    try {
        hypergeom_sf_exact(c(10, 3, 4, 4));
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.field(), "k");
    }
    EXPECT_THROW(hypergeom_sf_exact(c(10, 11, 4, 1)), DomainError);
    EXPECT_THROW(hypergeom_sf_exact(c(10, 3, 11, 1)), DomainError);
    EXPECT_THROW(hypergeom_sf_exact(c(10, 3, 4, -1)), DomainError);
}

TEST(Exact, ForcedLowerBoundIsOne) {
    // n + K - N = 3, so X >= 3 always holds
    EXPECT_EQ(hypergeom_sf_exact(c(10, 7, 6, 3)).value, 1.0);
}

TEST(Exact, AgreesWithRationalOracleUpToSixty) {
    for (std::int64_t N = 1; N <= 60; N += 7) {
        for (std::int64_t K = 0; K <= N; K += 3) {
            for (std::int64_t n = 0; n <= N; n += 4) {
                for (std::int64_t k = 0; k <= std::min(n, K); ++k) {
                    const double want = synth::rational_sf_double(N, K, n, k);
                    ASSERT_LE(rel_err(hypergeom_sf_exact(c(N, K, n, k)).value, want), 1e-12)
                        << N << " " << K << " " << n << " " << k;
                }
            }
        }
    }
}

TEST(Exact, RandomLargeAgreeWithOracle) {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 200; ++t) {
        const std::int64_t N = 100 + static_cast<std::int64_t>(rng() % 5000);
        const std::int64_t K = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(N / 4 + 1));
        const std::int64_t n = static_cast<std::int64_t>(rng() % 40);
        const std::int64_t k = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(std::min(n, K) + 1));
        const double want = synth::rational_sf_double(N, K, n, k);
        ASSERT_LE(rel_err(hypergeom_sf_exact(c(N, K, n, k)).value, want), 1e-11) << N << " " << K << " " << n << " " << k;
    }
}

TEST(Exact, SymmetricInDrawsAndSuccesses) {
    for (auto [N, K, n, k] : {std::tuple{50, 10, 7, 3}, {3000, 12, 14, 4}, {200, 60, 20, 9}}) {
        EXPECT_EQ(hypergeom_sf_exact(c(N, K, n, k)).value, hypergeom_sf_exact(c(N, n, K, k)).value);
    }
}

TEST(Exact, MonotoneInObservedAndSuccesses) {
    const std::int64_t N = 300, n = 20;
    for (std::int64_t K = 1; K <= 60; ++K) {
        double prev = 2.0;
        for (std::int64_t k = 0; k <= std::min(n, K); ++k) {
            const double p = hypergeom_sf_exact(c(N, K, n, k)).value;
            ASSERT_LE(p, prev) << K << " " << k;
            ASSERT_GE(p, 0.0);
            ASSERT_LE(p, 1.0);
            prev = p;
        }
    }
    for (std::int64_t k = 1; k <= 5; ++k) {
        double prev = -1.0;
        for (std::int64_t K = k; K <= 100; ++K) {
            const double p = hypergeom_sf_exact(c(N, K, n, k)).value;
            ASSERT_GE(p, prev) << K << " " << k;
            prev = p;
        }
    }
}

TEST(Exact, TinyTailsStayPositive) {
    const double p = hypergeom_sf_exact(c(1000000, 50, 50, 50)).value;
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1e-200);
}

TEST(Poisson, ZeroObservedIsOne) { EXPECT_EQ(hypergeom_sf_poisson(c(1000000, 10, 10, 0)).value, 1.0); }

TEST(Poisson, NoSuccessesIsZero) {
    EXPECT_EQ(hypergeom_sf_poisson(c(1000000, 0, 10, 1)).value, 0.0);
    EXPECT_EQ(hypergeom_sf_poisson(c(1000000, 0, 10, 0)).value, 1.0);
    EXPECT_THROW(hypergeom_sf_poisson(c(1000000, 0, 10, -1)), DomainError);
    EXPECT_THROW(hypergeom_sf_poisson(c(10, 0, 11, 1)), DomainError);
    EXPECT_THROW(hypergeom_sf_poisson(c(1000000, 5, 10, 6)), DomainError);
}

TEST(Poisson, ClosedFormForKOne) {
    // P(X >= 1) = 1 - exp(-lambda)
    const double lambda = 10.0 * 20.0 / 1e6;
    EXPECT_NEAR(hypergeom_sf_poisson(c(1000000, 20, 10, 1)).value, -std::expm1(-lambda), 1e-18);
}

TEST(Poisson, SpotValue) {
    // N=1e6, K=100, n=50, k=3: lambda = 0.005
    const auto cc = c(1000000, 100, 50, 3);
    const double p = hypergeom_sf_poisson(cc).value;
    EXPECT_NEAR(p, 2.08e-8, 0.01e-8);
    EXPECT_EQ(hypergeom_sf_poisson(cc).method, Method::poisson);
    EXPECT_LE(rel_err(p, synth::rational_sf_double(1000000, 100, 50, 3)), 0.10);
}

TEST(Poisson, CloseToExactWhenDrawsTiny) {
    for (std::int64_t k = 1; k <= 3; ++k) {
        // sampling without replacement costs about k^2 / K + k^2 / n in relative terms
        const auto cc = c(10000000000, 3000, 3000, k);
        EXPECT_LE(rel_err(hypergeom_sf_poisson(cc).value, hypergeom_sf_exact(cc).value), 5e-3) << k;
    }
}

TEST(SelectMethod, AutoPolicy) {
    const StatsConfig cfg;
    EXPECT_EQ(select_method(c(1000000, 50, 50, 3), cfg), Method::poisson);
    EXPECT_EQ(select_method(c(100000, 50, 50, 3), cfg), Method::exact);   // N not above threshold
    EXPECT_EQ(select_method(c(1000000, 50, 1001, 3), cfg), Method::exact); // n > sqrt(N)
    EXPECT_EQ(select_method(c(1000000, 50, 1000, 3), cfg), Method::poisson);
    EXPECT_EQ(select_method(c(3000, 5, 14, 3), cfg), Method::exact);
    EXPECT_EQ(select_method(c(1000, 5, 14, 3), cfg), Method::exact);
    EXPECT_EQ(select_method(c(1000000, 50, 2000, 3), cfg), Method::exact);
}

TEST(SelectMethod, ForcedPolicies) {
    EXPECT_EQ(select_method(c(10, 5, 4, 3), {MethodPolicy::poisson, 100000}), Method::poisson);
    EXPECT_EQ(select_method(c(1000000, 50, 50, 3), {MethodPolicy::exact, 100000}), Method::exact);
    EXPECT_EQ(enrichment_pvalue(c(1000000, 50, 50, 3), {}).method, Method::poisson);
}

TEST(SelectMethod, PolicyParsing) {
    EXPECT_EQ(parse_method_policy("auto"), MethodPolicy::automatic);
    EXPECT_EQ(parse_method_policy("exact"), MethodPolicy::exact);
    EXPECT_FALSE(parse_method_policy("fisher"));
}
