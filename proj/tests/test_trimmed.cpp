#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "affmed/geometry.hpp"
#include "affmed/rng.hpp"
#include "affmed/trimmed.hpp"

using namespace affmed;

namespace {

// Direct recomputation of the trimmed statistics of a subset.
TrimmedStats stats_of(const std::vector<double>& y, const std::vector<int>& subset) {
    TrimmedStats s;
    s.subset = subset;
    for (int i : subset) s.mu += y[i];
    s.mu /= static_cast<double>(subset.size());
    for (int i : subset) s.sigma1 += std::abs(y[i] - s.mu);
    s.sigma1 /= static_cast<double>(subset.size());
    return s;
}

// Minimum sigma1 over every subset of size >= m, by bitmask enumeration.
double brute_min_sigma(const std::vector<double>& y, int m) {
    const int k = static_cast<int>(y.size());
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        if (__builtin_popcount(mask) < m) continue;
        std::vector<int> subset;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i)) subset.push_back(i);
        best = std::min(best, stats_of(y, subset).sigma1);
    }
    return best;
}

std::vector<double> random_sample(Rng& rng, int k) {
    std::vector<double> y(k);
    const int style = static_cast<int>(rng.bounded(3));
    for (double& v : y) {
        if (style == 0) v = rng.normal();
        else if (style == 1) v = static_cast<double>(rng.bounded(5));  // heavy ties
        else v = (rng.uniform01() < 0.2) ? 50.0 + rng.normal() : rng.normal();
    }
    return y;
}

const std::vector<double> kRef = {0.0, 1.0, 2.0, 10.0};

}  // namespace

TEST_CASE("min subset size") {
    CHECK(min_subset_size(4, 1.0 / 3.0) == 3);
    CHECK(min_subset_size(6, 1.0 / 3.0) == 4);
    CHECK(min_subset_size(1, 1.0 / 3.0) == 1);
    CHECK(min_subset_size(9, 1.0 / 9.0) == 8);
    CHECK(min_subset_size(4, 0.45) == 3);
    CHECK_THROWS_AS(min_subset_size(4, 0.5), InvalidInput);
    CHECK_THROWS_AS(min_subset_size(4, -0.1), InvalidInput);
}

TEST_CASE("min sigma subset on the reference sample") {
    TrimmedStats s = min_sigma_subset(kRef, 3);
    CHECK(s.mu == doctest::Approx(1.0));
    CHECK(s.sigma1 == doctest::Approx(2.0 / 3.0));
    REQUIRE(s.subset.size() == 3);
    CHECK(s.subset == std::vector<int>{0, 1, 2});
}

TEST_CASE("min sigma subset indices follow the original order") {
    std::vector<double> shuffled = {10.0, 2.0, 0.0, 1.0};
    TrimmedStats s = min_sigma_subset(shuffled, 3);
    CHECK(s.mu == doctest::Approx(1.0));
    CHECK(s.sigma1 == doctest::Approx(2.0 / 3.0));
    std::vector<double> values;
    for (int i : s.subset) values.push_back(shuffled[i]);
    std::sort(values.begin(), values.end());
    CHECK(values == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("min sigma subset matches full enumeration") {
    Rng rng(101);
    for (int rep = 0; rep < 300; ++rep) {
        const int k = 1 + static_cast<int>(rng.bounded(10));
        const int m = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(k)));
        auto y = random_sample(rng, k);
        TrimmedStats got = min_sigma_subset(y, m);
        REQUIRE(static_cast<int>(got.subset.size()) >= m);
        TrimmedStats recomputed = stats_of(y, got.subset);
        CHECK(got.mu == doctest::Approx(recomputed.mu).epsilon(1e-12));
        CHECK(got.sigma1 == doctest::Approx(recomputed.sigma1).epsilon(1e-12));
        CHECK(got.sigma1 == doctest::Approx(brute_min_sigma(y, m)).epsilon(1e-10));
    }
}

TEST_CASE("slab intervals of reference windows") {
    TrimmedStats upper = stats_of(kRef, {1, 2, 3});
    Interval s = slab_interval(upper);
    CHECK(s.lo == doctest::Approx(-29.0 / 9.0));
    CHECK(s.hi == doctest::Approx(107.0 / 9.0));

    TrimmedStats full = stats_of(kRef, {0, 1, 2, 3});
    Interval f = slab_interval(full);
    CHECK(f.lo == doctest::Approx(-3.5));
    CHECK(f.hi == doctest::Approx(10.0));
}

TEST_CASE("feasible interval on the reference sample") {
    Interval iv = directional_feasible_interval(kRef, 1.0 / 3.0);
    CHECK(!iv.degenerate_fallback);
    CHECK(iv.lo == doctest::Approx(0.0));  // clipped at the data minimum
    CHECK(iv.hi == doctest::Approx(7.0 / 3.0));
    CHECK(iv.mid() == doctest::Approx(7.0 / 6.0));

    FeasibleIntervalDetail detail = directional_feasible_interval_detail(kRef, 1.0 / 3.0);
    CHECK(detail.interval.lo == doctest::Approx(iv.lo));
    CHECK(detail.interval.hi == doctest::Approx(iv.hi));
    CHECK(detail.lower_is_range_clip);
    CHECK(!detail.upper_is_range_clip);
    // The right endpoint comes from the {0, 1, 2} window: 1 + 2 * 2/3.
    Interval bind = slab_interval(stats_of(kRef, detail.upper.subset));
    CHECK(bind.hi == doctest::Approx(iv.hi).epsilon(1e-12));
}

TEST_CASE("feasible interval edge cases") {
    SUBCASE("single point") {
        Interval iv = directional_feasible_interval({5.0}, 1.0 / 3.0);
        CHECK(iv.lo == doctest::Approx(5.0));
        CHECK(iv.hi == doctest::Approx(5.0));
    }
    SUBCASE("all values equal") {
        Interval iv = directional_feasible_interval({2.0, 2.0, 2.0, 2.0, 2.0}, 1.0 / 6.0);
        CHECK(iv.lo == doctest::Approx(2.0));
        CHECK(iv.hi == doctest::Approx(2.0));
        CHECK(!iv.degenerate_fallback);
    }
    SUBCASE("two separated clusters still intersect at the admissible trim") {
        // At nu = 1/3 every window keeps 4 of the 6 points, so each slab
        // straddles both clusters and the intersection is honest.
        std::vector<double> y = {0.0, 0.0, 0.0, 100.0, 100.0, 100.0};
        Interval iv = directional_feasible_interval(y, 1.0 / 3.0);
        CHECK(!iv.degenerate_fallback);
        CHECK(iv.lo < iv.hi);
        CHECK(iv.contains(50.0));
    }
    SUBCASE("trim fractions past one third are rejected") {
        // The window reduction is only exact up to 1/3; past that the
        // all-subsets intersection can be empty outright.
        CHECK_THROWS_AS(directional_feasible_interval({1.0, 2.0, 3.0}, 0.4), InvalidInput);
        CHECK_THROWS_AS(brute_force_interval({1.0, 2.0, 3.0}, 0.49), InvalidInput);
    }
    SUBCASE("interval stays inside the data range") {
        Rng rng(77);
        for (int rep = 0; rep < 50; ++rep) {
            auto y = random_sample(rng, 2 + static_cast<int>(rng.bounded(10)));
            Interval iv = directional_feasible_interval(y, 1.0 / 3.0);
            const double lo = *std::min_element(y.begin(), y.end());
            const double hi = *std::max_element(y.begin(), y.end());
            CHECK(iv.lo >= lo - 1e-12);
            CHECK(iv.hi <= hi + 1e-12);
        }
    }
}

TEST_CASE("feasible interval matches the exponential reference") {
    Rng rng(103);
    const double nus[] = {1.0 / 3.0, 1.0 / 6.0, 1.0 / 4.0, 0.3};
    for (int rep = 0; rep < 400; ++rep) {
        const int k = 1 + static_cast<int>(rng.bounded(12));
        const double nu = nus[rng.bounded(4)];
        auto y = random_sample(rng, k);
        Interval fast = directional_feasible_interval(y, nu);
        Interval slow = brute_force_interval(y, nu);
        CHECK(fast.degenerate_fallback == slow.degenerate_fallback);
        CHECK(fast.lo == doctest::Approx(slow.lo).epsilon(1e-10));
        CHECK(fast.hi == doctest::Approx(slow.hi).epsilon(1e-10));
    }
}

TEST_CASE("outlyingness on the reference sample") {
    CHECK(outlyingness_1d(3.0, kRef, 0.25) == doctest::Approx(3.0));
    // At the trimmed mean the outlyingness vanishes.
    CHECK(outlyingness_1d(1.0, kRef, 0.25) == doctest::Approx(0.0));
}

TEST_CASE("outlyingness agrees with its definition") {
    Rng rng(107);
    for (int rep = 0; rep < 100; ++rep) {
        const int k = 2 + static_cast<int>(rng.bounded(10));
        auto y = random_sample(rng, k);
        const double nu = 1.0 / 3.0;
        TrimmedStats s = min_sigma_subset(y, min_subset_size(k, nu));
        const double point = rng.normal() * 3.0;
        const double got = outlyingness_1d(point, y, nu);
        if (s.sigma1 > 1e-12) {
            CHECK(got == doctest::Approx(std::abs(point - s.mu) / s.sigma1).epsilon(1e-10));
        } else {
            const bool at_mu = std::abs(point - s.mu) <= 1e-12 * std::max(1.0, std::abs(s.mu));
            if (at_mu) CHECK(got == doctest::Approx(0.0));
            else CHECK(std::isinf(got));
        }
    }
}

TEST_CASE("zero spread sample has zero or infinite outlyingness") {
    std::vector<double> y = {4.0, 4.0, 4.0};
    CHECK(outlyingness_1d(4.0, y, 1.0 / 3.0) == doctest::Approx(0.0));
    CHECK(std::isinf(outlyingness_1d(4.5, y, 1.0 / 3.0)));
}
