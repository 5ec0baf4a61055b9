#include <gtest/gtest.h>

#include <cmath>

#include "dynplan/rng.hpp"

using namespace dynplan;

TEST(Rng, SameSeedSameStream) {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a(), b());
    }
    Rng c(43);
    EXPECT_NE(Rng(42)(), c());
}

TEST(Rng, CopyForksTheStream) {
    Rng a(7);
    a();
    Rng b = a;
    EXPECT_EQ(a(), b());
    EXPECT_EQ(a, b);
}

TEST(Rng, BelowStaysInRange) {
    Rng r(3);
    std::array<int, 7> hist{};
    for (int i = 0; i < 70000; ++i) {
        const auto v = r.below(7);
        ASSERT_LT(v, 7u);
        ++hist[v];
    }
    for (int n : hist) {
        EXPECT_NEAR(n, 10000, 500);
    }
}

TEST(Rng, UniformInUnitInterval) {
    Rng r(9);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Rng, PoissonMeanAndVariance) {
    Rng r(11);
    const double lambda = 0.06;
    double sum = 0.0;
    double sq = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const int k = r.poisson(lambda);
        sum += k;
        sq += static_cast<double>(k) * k;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, lambda, 0.02 * lambda);
    EXPECT_NEAR(sq / n - mean * mean, lambda, 0.05 * lambda);
    EXPECT_EQ(r.poisson(0.0), 0);
}

TEST(Rng, NormalMoments) {
    Rng r(5);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsDiffer) {
    EXPECT_NE(derive_seed(1, stream::kSpawn), derive_seed(1, stream::kObstacle));
    EXPECT_NE(episode_seed(0, 0), episode_seed(0, 1));
    EXPECT_NE(episode_seed(0, 5), episode_seed(1, 5));
    EXPECT_EQ(episode_seed(123, 4), episode_seed(123, 4));
}
