#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "persp/discrete.hpp"

using namespace persp;

TEST(SupportValue, EmptySupport) {
    const ProblemInstance inst({1, 2}, {3, 4}, ZFamily::free_box(2));
    const auto s = support_value({}, inst);
    EXPECT_EQ(s.value, 0.0);
    EXPECT_EQ(s.x_opt, (Vector{0, 0}));
}

TEST(SupportValue, UnitProblem) {
    const ProblemInstance inst({1}, {0}, ZFamily::free_box(1));
    const auto s = support_value({0}, inst);
    EXPECT_DOUBLE_EQ(s.value, -1.0);
    EXPECT_DOUBLE_EQ(s.x_opt[0], -1.0);
}

TEST(SupportValue, MatchesDiskGrid) {
    const ProblemInstance inst({3, 4}, {1, 1}, ZFamily::free_box(2));
    const auto s = support_value({0, 1}, inst);
    EXPECT_NEAR(s.value, -3.0, 1e-12);
    EXPECT_NEAR(s.x_opt[0], -0.6, 1e-12);
    EXPECT_NEAR(s.x_opt[1], -0.8, 1e-12);
    EXPECT_NEAR(s.value, 2.0 + oracle::ball_grid_min({3, 4}), 1e-3);
}

TEST(SupportValue, ZeroMassSupportGivesZeroX) {
    const ProblemInstance inst({0, 0, 5}, {1, 2, 0}, ZFamily::free_box(3));
    const auto s = support_value({0, 1}, inst);
    EXPECT_EQ(s.x_opt, (Vector{0, 0, 0}));
    EXPECT_DOUBLE_EQ(s.value, 3.0);
}

TEST(SupportValue, RejectsOutOfRange) {
    const ProblemInstance inst({1}, {0}, ZFamily::free_box(1));
    EXPECT_THROW(support_value({1}, inst), DomainError);
}

TEST(SupportValue, AgreesWithDiscreteObjectiveAndAttainsInnerMinimum) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 7;
        const ProblemInstance inst(oracle::uniform_vector(rng, n, -2, 2), oracle::uniform_vector(rng, n, -1, 1),
                                   ZFamily::free_box(n));
        for (const auto& z : enumerate_Z(inst.zfam)) {
            const auto s = support_value(support_of(z), inst);
            const double ref = discrete_objective(z, inst.a, inst.c);
            EXPECT_NEAR(s.value, ref, 1e-12 * std::max(1.0, std::abs(ref)));
            double mass = 0.0;
            for (std::size_t i = 0; i < n; ++i) mass += z[i] * inst.a[i] * inst.a[i];
            EXPECT_NEAR(dot(inst.a, s.x_opt), -std::sqrt(mass), 1e-12);
            const double nx = squared_norm(s.x_opt);
            EXPECT_TRUE(nx == 0.0 || std::abs(nx - 1.0) < 1e-12);
        }
    }
}

TEST(Bruteforce, Examples) {
    auto s = solve_discrete_bruteforce(ProblemInstance({1}, {10}, ZFamily::free_box(1)));
    EXPECT_EQ(s.z_opt, BinaryVector{0});
    EXPECT_EQ(s.value, 0.0);
    EXPECT_EQ(s.method, "bruteforce");
    s = solve_discrete_bruteforce(ProblemInstance({1}, {-1}, ZFamily::free_box(1)));
    EXPECT_EQ(s.z_opt, BinaryVector{1});
    EXPECT_DOUBLE_EQ(s.value, -2.0);
}

TEST(Bruteforce, MatchesGridOracleOnSmallInstances) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const ProblemInstance inst(oracle::uniform_vector(rng, 3, -1, 1), oracle::uniform_vector(rng, 3, -1, 1),
                                   ZFamily::free_box(3));
        double best = kInf;
        for (const auto& z : enumerate_Z(inst.zfam)) {
            Vector a_sub;
            double lin = 0.0;
            for (std::size_t i = 0; i < 3; ++i)
                if (z[i]) {
                    a_sub.push_back(inst.a[i]);
                    lin += inst.c[i];
                }
            best = std::min(best, lin + oracle::ball_grid_min(a_sub, 1e-2));
        }
        const auto s = solve_discrete_bruteforce(inst);
        EXPECT_LE(s.value, best + 1e-12);
        EXPECT_NEAR(s.value, best, 1e-3);
        EXPECT_TRUE(is_in_X(MixedPoint(s.x_opt, to_real(s.z_opt)), inst.zfam));
        EXPECT_NEAR(s.value, dot(inst.a, s.x_opt) + dot(inst.c, to_real(s.z_opt)), 1e-12);
    }
}

TEST(Bruteforce, TiesGoToLexicographicallySmallest) {
    const auto s = solve_discrete_bruteforce(ProblemInstance({1, 1}, {0, 0}, ZFamily::cardinality_eq(2, 1)));
    EXPECT_EQ(s.z_opt, (BinaryVector{0, 1}));
}

TEST(Bruteforce, InvariantUnderSignFlips) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 6;
        Vector a = oracle::uniform_vector(rng, n, -2, 2);
        const Vector c = oracle::uniform_vector(rng, n, -1, 1);
        const auto fam = ZFamily::cardinality_le(n, 1 + trial % n);
        const double v = solve_discrete_bruteforce(ProblemInstance(a, c, fam)).value;
        for (std::size_t i = 0; i < n; i += 2) a[i] = -a[i];
        EXPECT_DOUBLE_EQ(solve_discrete_bruteforce(ProblemInstance(a, c, fam)).value, v);
    }
}

TEST(Bruteforce, DimensionGuard) {
    EXPECT_THROW(solve_discrete_bruteforce(ProblemInstance(Vector(25, 1.0), Vector(25, 0.0), ZFamily::free_box(25))),
                 DimensionError);
}

TEST(Sort, Examples) {
    auto s = solve_discrete_sort({3, 4, 0}, 1);
    EXPECT_EQ(s.z_opt, (BinaryVector{0, 1, 0}));
    EXPECT_DOUBLE_EQ(s.value, -4.0);
    EXPECT_EQ(s.method, "sort");
    s = solve_discrete_sort({1, 1}, 2);
    EXPECT_EQ(s.z_opt, (BinaryVector{1, 1}));
    EXPECT_DOUBLE_EQ(s.value, -std::sqrt(2.0));
    EXPECT_THROW(solve_discrete_sort({1, 2}, 3), DomainError);
}

TEST(Sort, MatchesBruteforce) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 12;
        const std::size_t k = 1 + (trial / 12) % n;
        const Vector a = oracle::uniform_vector(rng, n, -3, 3);
        const auto bf = solve_discrete_bruteforce(ProblemInstance(a, Vector(n, 0.0), ZFamily::cardinality_eq(n, k)));
        const auto st = solve_discrete_sort(a, k);
        EXPECT_NEAR(st.value, bf.value, 1e-12 * std::max(1.0, std::abs(bf.value)));
    }
}

TEST(Sort, PermutationCovariant) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + trial % 8;
        const Vector a = oracle::uniform_vector(rng, n, -3, 3);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Vector pa(n);
        for (std::size_t i = 0; i < n; ++i) pa[i] = a[perm[i]];
        const std::size_t k = 1 + trial % n;
        const auto s = solve_discrete_sort(a, k);
        const auto ps = solve_discrete_sort(pa, k);
        EXPECT_DOUBLE_EQ(ps.value, s.value);
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(ps.z_opt[i], s.z_opt[perm[i]]);
    }
}
