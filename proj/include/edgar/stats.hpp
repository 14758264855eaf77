#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "edgar/error.hpp"

/**
 * @file stats.hpp
 *
 * @brief Right-tail hypergeometric p-values for over-representation tests.
 *
 * Two routes are provided. The exact route evaluates P(X >= k) from a
 * log-space point mass (log-gamma with Stirling-series correction and
 * deviance terms) followed by a ratio recurrence over the shorter tail,
 * accumulated with compensated summation. The Poisson route uses
 * lambda = nK/N and is meant for very large populations with small draws.
 */

namespace edgar::stats {

/// (N, K, n, k): population, successes in population, draws, observed successes.
struct EnrichmentCounts {
    std::int64_t population_n = 0;
    std::int64_t successes_k = 0;
    std::int64_t draws = 0;
    std::int64_t observed = 0;

    friend bool operator==(const EnrichmentCounts&, const EnrichmentCounts&) = default;

    /// Throws DomainError naming the first offending field. Never clamps.
    void validate() const {
        if (population_n < 0) throw DomainError("N", "must be non-negative");
        if (successes_k < 0) throw DomainError("K", "must be non-negative");
        if (draws < 0) throw DomainError("n", "must be non-negative");
        if (observed < 0) throw DomainError("k", "must be non-negative");
        if (successes_k > population_n) {
            throw DomainError("K", "K=" + std::to_string(successes_k) + " exceeds N=" + std::to_string(population_n));
        }
        if (draws > population_n) {
            throw DomainError("n", "n=" + std::to_string(draws) + " exceeds N=" + std::to_string(population_n));
        }
        if (observed > std::min(draws, successes_k)) {
            throw DomainError("k", "k=" + std::to_string(observed) + " exceeds min(n, K)=" +
                                       std::to_string(std::min(draws, successes_k)));
        }
    }
};

enum class Method { exact, poisson };

inline std::string_view to_string(Method m) { return m == Method::exact ? "exact" : "poisson"; }

struct PValue {
    double value = 1.0;
    Method method = Method::exact;
};

enum class MethodPolicy { automatic, exact, poisson };

inline std::string_view to_string(MethodPolicy m) {
    switch (m) {
        case MethodPolicy::automatic: return "auto";
        case MethodPolicy::exact: return "exact";
        case MethodPolicy::poisson: return "poisson";
    }
    return "auto";
}

inline std::optional<MethodPolicy> parse_method_policy(std::string_view s) {
    if (s == "auto") return MethodPolicy::automatic;
    if (s == "exact") return MethodPolicy::exact;
    if (s == "poisson") return MethodPolicy::poisson;
    return std::nullopt;
}

struct StatsConfig {
    MethodPolicy method = MethodPolicy::automatic;
    std::int64_t poisson_threshold_n = 100000;
};

namespace detail {

/// Adds terms with Neumaier's compensation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline constexpr double ln_sqrt_2pi = 0.918938533204672741780329736406;

/// log(n!) - log(sqrt(2 pi n) (n/e)^n): the error of Stirling's formula.
inline double stirlerr(double n) {
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n <= 15.0) {
        return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - ln_sqrt_2pi;
    }
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

/// Deviance term x log(x/np) + np - x, evaluated without cancellation near x = np.
inline double bd0(double x, double np) {
    if (std::fabs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2 * x * v;
        v = v * v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

/// log of the binomial point mass C(n,x) p^x q^(n-x).
inline double log_binom_raw(double x, double n, double p, double q) {
    const double ninf = -std::numeric_limits<double>::infinity();
    if (p == 0) return x == 0 ? 0.0 : ninf;
    if (q == 0) return x == n ? 0.0 : ninf;
    if (x == 0) {
        if (n == 0) return 0.0;
        return p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
    }
    if (x == n) return q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
    if (x < 0 || x > n) return ninf;
    const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    const double lf = 2 * ln_sqrt_2pi + std::log(x) + std::log1p(-x / n);
    return lc - 0.5 * lf;
}

} // namespace detail

/// log P(X = x) for X ~ Hypergeometric(N, K, n). Returns -inf outside the support.
inline double hypergeom_log_pmf(std::int64_t x, std::int64_t N, std::int64_t K, std::int64_t n) {
    const double ninf = -std::numeric_limits<double>::infinity();
    if (x < 0 || x > K || x > n || n - x > N - K) return ninf;
    if (N == 0) return 0.0;
    const double r = static_cast<double>(K);
    const double b = static_cast<double>(N - K);
    const double draws = static_cast<double>(n);
    const double p = draws / static_cast<double>(N);
    const double q = static_cast<double>(N - n) / static_cast<double>(N);
    const double xd = static_cast<double>(x);
    return detail::log_binom_raw(xd, r, p, q) + detail::log_binom_raw(draws - xd, b, p, q) -
           detail::log_binom_raw(draws, r + b, p, q);
}

namespace detail {

/// P(X >= k) before clamping to [0, 1].
inline double hypergeom_sf_unclamped(const EnrichmentCounts& c) {
    c.validate();
    // The distribution is symmetric in (K, n); fixing the order makes equal
    // tails produce bit-identical results.
    const std::int64_t N = c.population_n;
    const std::int64_t K = std::min(c.successes_k, c.draws);
    const std::int64_t n = std::max(c.successes_k, c.draws);
    const std::int64_t k = c.observed;
    const std::int64_t lo = std::max<std::int64_t>(0, n + K - N);
    const std::int64_t hi = std::min(n, K);
    if (k <= lo) return 1.0;
    if (k > hi) return 0.0;

    const double Nd = static_cast<double>(N);
    const double Kd = static_cast<double>(K);
    const double nd = static_cast<double>(n);
    const auto mode = static_cast<std::int64_t>(std::floor((nd + 1) * (Kd + 1) / (Nd + 2)));

    // Sum pmf(i)/pmf(start) along the tail that moves away from the mode;
    // those terms decrease monotonically, so the remainder is bounded by a
    // geometric series with the current ratio.
    CompensatedSum sum;
    sum.add(1.0);
    double term = 1.0;
    constexpr double tol = 1e-18;
    if (k > mode) {
        for (std::int64_t i = k; i < hi; ++i) {
            const double id = static_cast<double>(i);
            const double ratio = (Kd - id) * (nd - id) / ((id + 1) * (Nd - Kd - nd + id + 1));
            term *= ratio;
            sum.add(term);
            if (ratio < 1 && term * ratio / (1 - ratio) < tol * sum.value()) break;
        }
        return std::exp(hypergeom_log_pmf(k, N, K, n) + std::log(sum.value()));
    }
    for (std::int64_t i = k - 1; i > lo; --i) {
        const double id = static_cast<double>(i);
        const double ratio = id * (Nd - Kd - nd + id) / ((Kd - id + 1) * (nd - id + 1));
        term *= ratio;
        sum.add(term);
        if (ratio < 1 && term * ratio / (1 - ratio) < tol * sum.value()) break;
    }
    return 1.0 - std::exp(hypergeom_log_pmf(k - 1, N, K, n) + std::log(sum.value()));
}

inline double poisson_sf_unclamped(const EnrichmentCounts& c) {
    // lambda = 0 puts all mass on X = 0, so any k >= 1 has probability 0 even
    // though k then exceeds min(n, K). Every other violation still raises.
    if (c.observed > 0 && (c.successes_k == 0 || c.draws == 0)) {
        EnrichmentCounts base = c;
        base.observed = 0;
        base.validate();
        return 0.0;
    }
    c.validate();
    const std::int64_t k = c.observed;
    if (k == 0) return 1.0;
    const double lambda = static_cast<double>(c.draws) * static_cast<double>(c.successes_k) /
                          static_cast<double>(c.population_n);
    const double kd = static_cast<double>(k);
    CompensatedSum sum;
    sum.add(1.0);
    double term = 1.0;
    constexpr double tol = 1e-18;
    if (kd > lambda) {
        // Upper tail directly: no cancellation for small lambda.
        for (std::int64_t i = k;; ++i) {
            const double ratio = lambda / static_cast<double>(i + 1);
            term *= ratio;
            sum.add(term);
            if (term * ratio / (1 - ratio) < tol * sum.value() || term == 0) break;
        }
        const double log_first = -lambda + kd * std::log(lambda) - std::lgamma(kd + 1);
        return std::exp(log_first + std::log(sum.value()));
    }
    for (std::int64_t i = k - 1; i > 0; --i) {
        const double ratio = static_cast<double>(i) / lambda;
        term *= ratio;
        sum.add(term);
        if (ratio < 1 && term * ratio / (1 - ratio) < tol * sum.value()) break;
    }
    const double km1 = kd - 1;
    const double log_first = -lambda + km1 * std::log(lambda) - std::lgamma(km1 + 1);
    return 1.0 - std::exp(log_first + std::log(sum.value()));
}

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

} // namespace detail

/// P(X >= k) under the hypergeometric null, computed exactly.
inline PValue hypergeom_sf_exact(const EnrichmentCounts& counts) {
    return {detail::clamp_unit(detail::hypergeom_sf_unclamped(counts)), Method::exact};
}

/// P(X >= k) under the Poisson approximation with lambda = nK/N.
inline PValue hypergeom_sf_poisson(const EnrichmentCounts& counts) {
    return {detail::clamp_unit(detail::poisson_sf_unclamped(counts)), Method::poisson};
}

/// Auto policy: Poisson only when N exceeds the threshold and both n and k
/// are at most sqrt(N). Forced policies are honoured as-is.
inline Method select_method(const EnrichmentCounts& c, const StatsConfig& config) {
    if (config.method == MethodPolicy::exact) return Method::exact;
    if (config.method == MethodPolicy::poisson) return Method::poisson;
    const auto N = c.population_n;
    const bool large = N > config.poisson_threshold_n;
    const bool small_draws = c.draws * c.draws <= N;
    const bool small_hits = c.observed * c.observed <= N;
    return large && small_draws && small_hits ? Method::poisson : Method::exact;
}

inline PValue enrichment_pvalue(const EnrichmentCounts& counts, const StatsConfig& config) {
    return select_method(counts, config) == Method::poisson ? hypergeom_sf_poisson(counts)
                                                            : hypergeom_sf_exact(counts);
}

} // namespace edgar::stats
