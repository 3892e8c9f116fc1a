#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "persp/robust.hpp"

using namespace persp;

namespace {

RobustInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t k, double b) {
    return RobustInstance(oracle::uniform_vector(rng, n, 0, 1), oracle::uniform_vector(rng, n, 0.05, 1), b, k);
}

Vector sparse_simplex_point(std::mt19937_64& rng, std::size_t n) {
    Vector y = oracle::simplex_point(rng, n);
    std::bernoulli_distribution drop(0.3);
    for (auto& v : y)
        if (drop(rng)) v = 0.0;
    double s = 0.0;
    for (double v : y) s += v;
    if (s == 0.0) {
        y[0] = 1.0;
        s = 1.0;
    }
    for (auto& v : y) v /= s;
    return y;
}

// max over the grid of z in [0,1]^n with sum z <= k of max {x'y : sum d^2 x^2 / z <= b}.
double perspective_inner_grid(const Vector& y, const RobustInstance& inst, double step) {
    const std::size_t n = inst.n();
    const long m = std::lround(1.0 / step);
    std::vector<long> idx(n, 0);
    double best = 0.0;
    while (true) {
        double used = 0.0, val = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = static_cast<double>(idx[i]) * step;
            used += z;
            // by Cauchy-Schwarz the inner max over x is sqrt(b sum z_i (y_i/d_i)^2)
            val += z * (y[i] / inst.d[i]) * (y[i] / inst.d[i]);
        }
        if (used <= static_cast<double>(inst.k) + 1e-12) best = std::max(best, std::sqrt(inst.b * val));
        std::size_t p = 0;
        while (p < n && idx[p] == m) idx[p++] = 0;
        if (p == n) break;
        ++idx[p];
    }
    return nominal_value(y, inst) + best;
}

}  // namespace

TEST(RobustInstance, Validation) {
    EXPECT_THROW(RobustInstance({1, 2}, {1}, 1, 1), DimensionError);
    EXPECT_THROW(RobustInstance({1}, {0}, 1, 1), DomainError);
    EXPECT_THROW(RobustInstance({1}, {1}, -1, 1), DomainError);
    EXPECT_THROW(RobustInstance({1}, {1}, 1, 2), DomainError);
    EXPECT_THROW(RobustInstance({}, {}, 1, 1), DomainError);
    EXPECT_NO_THROW(RobustInstance({1}, {1}, 0, 1));
}

TEST(PortfolioPoint, Validation) {
    EXPECT_THROW(PortfolioPoint({0.5, 0.6}), DomainError);
    EXPECT_THROW(PortfolioPoint({1.5, -0.5}), DomainError);
    EXPECT_NO_THROW(PortfolioPoint({0.5, 0.5}));
}

TEST(TopKSqSum, Examples) {
    const RobustInstance inst({0, 0, 0, 0}, {1, 1, 1, 1}, 1, 2);
    const PortfolioPoint y({0.25, 0.25, 0.25, 0.25});
    EXPECT_DOUBLE_EQ(top_k_sq_sum(y, inst), 0.125);
    const RobustInstance full({0, 0, 0}, {1, 2, 4}, 1, 3);
    EXPECT_DOUBLE_EQ(top_k_sq_sum(Vector{0.5, 0.3, 0.2}, full), 0.25 + 0.0225 + 0.0025);
}

TEST(TopKSqSum, MatchesSubsetMaximum) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 12;
        const auto inst = random_instance(rng, n, 1 + trial % n, 1.0);
        const Vector y = oracle::simplex_point(rng, n);
        // with a_tilde removed, subset_worst_case^2 / b is the subset maximum of the squares
        const RobustInstance bare(Vector(n, 0.0), inst.d, 1.0, inst.k);
        const double ref = std::pow(oracle::subset_worst_case(y, bare), 2);
        EXPECT_NEAR(top_k_sq_sum(y, inst), ref, 1e-12 * std::max(1.0, ref));
    }
}

TEST(PerspectiveValue, Examples) {
    const RobustInstance inst({0.3, 0.7}, {1, 1}, 1, 1);
    EXPECT_DOUBLE_EQ(perspective_value(PortfolioPoint({1, 0}), inst), 1.3);
    const RobustInstance zero({0.3, 0.7}, {1, 1}, 0, 1);
    EXPECT_DOUBLE_EQ(perspective_value(PortfolioPoint({0.5, 0.5}), zero), 0.5);
}

TEST(PerspectiveValue, MatchesInnerGrid) {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto inst = random_instance(rng, n, 1 + trial % n, 5.0);
        const Vector y = oracle::simplex_point(rng, n);
        EXPECT_NEAR(perspective_value(y, inst), perspective_inner_grid(y, inst, 0.05), 1e-3);
    }
}

TEST(Baselines, Examples) {
    for (std::size_t k = 1; k <= 3; ++k) {
        const RobustInstance inst({0.4, 0.1, 0.9}, {1, 1, 1}, 1, k);
        EXPECT_DOUBLE_EQ(budgeted_value(PortfolioPoint({1, 0, 0}), inst), 1.4);
        EXPECT_DOUBLE_EQ(worst_case(PortfolioPoint({1, 0, 0}), inst), 1.4);
    }
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 9;
        const auto inst = random_instance(rng, n, n, 3.0);
        const Vector y = oracle::simplex_point(rng, n);
        EXPECT_NEAR(ellipsoidal_value(y, inst), perspective_value(y, inst), 1e-12);
    }
}

TEST(Baselines, BudgetedMatchesExtremePoints) {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 12;
        const auto inst = random_instance(rng, n, 1 + trial % n, 4.0);
        const Vector y = sparse_simplex_point(rng, n);
        EXPECT_NEAR(budgeted_value(y, inst), oracle::subset_budgeted(y, inst), 1e-12);
    }
}

TEST(WorstCase, MatchesSubsetBruteForce) {
    std::mt19937_64 rng(113);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 12;
        const auto inst = random_instance(rng, n, 1 + trial % n, 1.0 + trial % 20);
        const Vector y = sparse_simplex_point(rng, n);
        EXPECT_NEAR(worst_case(y, inst), oracle::subset_worst_case(y, inst), 1e-10);
    }
    const RobustInstance inst({0.2, 0.5}, {2, 1}, 9, 1);
    EXPECT_DOUBLE_EQ(worst_case(PortfolioPoint({1, 0}), inst), 0.2 + 1.5);
}

TEST(WorstCase, BelowBaselinesAndPerspective) {
    std::mt19937_64 rng(127);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const auto inst = random_instance(rng, n, 1 + trial % n, 1.0 + trial % 20);
        const Vector y = sparse_simplex_point(rng, n);
        const double wc = worst_case(y, inst);
        EXPECT_LE(wc, budgeted_value(y, inst) + 1e-12);
        EXPECT_LE(wc, ellipsoidal_value(y, inst) + 1e-12);
        EXPECT_GE(perspective_value(y, inst) - wc, -1e-12);
    }
}

TEST(Objectives, MidpointConvex) {
    std::mt19937_64 rng(131);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + trial % 8;
        const auto inst = random_instance(rng, n, 1 + trial % n, 5.0);
        const Vector y1 = sparse_simplex_point(rng, n), y2 = sparse_simplex_point(rng, n);
        Vector mid(n);
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (y1[i] + y2[i]);
        for (Method m : {Method::Nominal, Method::Budgeted, Method::Ellipsoidal, Method::Perspective}) {
            EXPECT_LE(counterpart_value(m, mid, inst),
                      0.5 * (counterpart_value(m, y1, inst) + counterpart_value(m, y2, inst)) + 1e-12);
        }
    }
}

TEST(Objectives, PermutationInvariant) {
    std::mt19937_64 rng(137);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 8;
        const auto inst = random_instance(rng, n, 1 + trial % n, 5.0);
        const Vector y = oracle::simplex_point(rng, n);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Vector pa(n), pd(n), py(n);
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = inst.a_tilde[perm[i]];
            pd[i] = inst.d[perm[i]];
            py[i] = y[perm[i]];
        }
        const RobustInstance pinst(pa, pd, inst.b, inst.k);
        for (Method m : {Method::Nominal, Method::Budgeted, Method::Ellipsoidal, Method::Perspective})
            EXPECT_NEAR(counterpart_value(m, py, pinst), counterpart_value(m, y, inst), 1e-12);
    }
}

TEST(Fenchel, Examples) {
    auto r = fenchel_identity(0.0, 0.0);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_FALSE(r.infinite);
    r = fenchel_identity(1.0, 0.0);
    EXPECT_TRUE(r.infinite);
    EXPECT_EQ(r.value, kInf);
    r = fenchel_identity(1.0, 0.5);
    EXPECT_DOUBLE_EQ(r.value, 2.0);
    EXPECT_DOUBLE_EQ(r.p_star, 4.0);
    const auto [pg, vg] = oracle::grid_max([](double p) { return p - p * p * 0.5 / 4.0; }, 0.0, 10.0, 1e-5);
    EXPECT_NEAR(pg, r.p_star, 1e-5);
    EXPECT_NEAR(vg, r.value, 1e-6);
    EXPECT_THROW(fenchel_identity(1.0, 1.5), DomainError);
}

TEST(Multipliers, ObjectiveIdentity) {
    std::mt19937_64 rng(139);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + trial % 15;
        const auto inst = random_instance(rng, n, 1 + trial % n, 0.5 + trial % 20);
        const Vector y = sparse_simplex_point(rng, n);
        const auto cert = optimal_multipliers(y, inst);
        const double pv = perspective_value(y, inst);
        ASSERT_FALSE(cert.degenerate);
        EXPECT_NEAR(socp_objective(y, inst, cert), pv, 1e-8 * std::abs(pv));
        EXPECT_TRUE(socp_feasible(y, inst, cert));
        EXPECT_GE(cert.lambda, 0.0);
        EXPECT_GE(cert.mu, 0.0);
        EXPECT_GE(cert.gamma, 0.0);
        EXPECT_NEAR(cert.gamma, cert.lambda * cert.mu, 1e-12 * std::max(cert.gamma, 1e-300));
        // t_i vanishes outside the top-k ratios
        Vector u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = y[i] / inst.d[i];
        Vector sorted(u);
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_GE(cert.t[i], 0.0);
            if (inst.k < n && u[i] <= sorted[inst.k]) {
                EXPECT_EQ(cert.t[i], 0.0);
            }
            EXPECT_NEAR(cert.p[i], y[i] / (cert.lambda * inst.d[i]), 1e-12 * std::abs(cert.p[i]));
        }
    }
}

TEST(Multipliers, WeakDualityAgainstFeasibleCertificates) {
    std::mt19937_64 rng(149);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const auto inst = random_instance(rng, n, 1 + trial % n, 1.0 + trial % 10);
        const Vector y = oracle::simplex_point(rng, n);
        DualCertificate cert;
        cert.lambda = 0.01 + u(rng);
        cert.mu = u(rng);
        cert.t.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double q = y[i] / inst.d[i];
            cert.t[i] = std::max(0.0, q * q / (4.0 * cert.lambda) - cert.mu);
        }
        ASSERT_TRUE(socp_feasible(y, inst, cert));
        EXPECT_GE(socp_objective(y, inst, cert), perspective_value(y, inst) - 1e-12);
    }
}

TEST(Multipliers, FullCardinalityAndDegenerateCases) {
    const RobustInstance inst({0, 0, 0}, {1, 1, 1}, 2, 3);
    const Vector y{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto cert = optimal_multipliers(y, inst);
    EXPECT_EQ(cert.gamma, 0.0);
    EXPECT_EQ(cert.mu, 0.0);
    EXPECT_NEAR(cert.lambda, std::sqrt(top_k_sq_sum(y, inst) / (4.0 * inst.b)), 1e-15);
    EXPECT_NEAR(socp_objective(y, inst, cert), perspective_value(y, inst), 1e-14);

    const RobustInstance zero_b({0.5, 0.2}, {1, 1}, 0, 1);
    const auto deg = optimal_multipliers(Vector{0.5, 0.5}, zero_b);
    EXPECT_TRUE(deg.degenerate);
    EXPECT_EQ(deg.lambda, kInf);
    EXPECT_DOUBLE_EQ(socp_objective(Vector{0.5, 0.5}, zero_b, deg), 0.35);
}

TEST(Counterpart, Nominal) {
    const RobustInstance inst({0.4, 0.1, 0.9}, {1, 1, 1}, 5, 2);
    const auto r = solve_counterpart(Method::Nominal, inst);
    EXPECT_EQ(r.y_star.y(), (Vector{0, 1, 0}));
    EXPECT_DOUBLE_EQ(r.objective, 0.1);
}

TEST(Counterpart, TwoDimensionalGoldenSection) {
    std::mt19937_64 rng(151);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = random_instance(rng, 2, 1 + trial % 2, 0.5 + trial % 7);
        for (Method m : {Method::Budgeted, Method::Ellipsoidal, Method::Perspective}) {
            auto f = [&](double t) { return counterpart_value(m, Vector{t, 1.0 - t}, inst); };
            const double t = oracle::golden_section(f, 0.0, 1.0);
            const double ref = std::min({f(t), f(0.0), f(1.0)});
            const auto r = solve_counterpart(m, inst);
            EXPECT_NEAR(r.objective, ref, 1e-5) << to_string(m);
            EXPECT_LE(r.objective, ref + 1e-6 * std::abs(ref));
            EXPECT_NEAR(r.objective, counterpart_value(m, r.y_star.y(), inst), 1e-12);
        }
    }
}

TEST(Counterpart, ThreeDimensionalSimplexGrid) {
    std::mt19937_64 rng(157);
    const double step = 2e-3;
    const long m = std::lround(1.0 / step);
    for (int trial = 0; trial < 12; ++trial) {
        // d bounded away from 0 keeps the objective's slope, and so the grid error, small
        const RobustInstance inst(oracle::uniform_vector(rng, 3, 0, 1), oracle::uniform_vector(rng, 3, 0.5, 1),
                                  1.0 + trial, 1 + trial % 3);
        for (Method meth : {Method::Budgeted, Method::Ellipsoidal, Method::Perspective}) {
            double best = kInf;
            for (long i = 0; i <= m; ++i)
                for (long j = 0; i + j <= m; ++j) {
                    const double y0 = i * step, y1 = j * step;
                    best = std::min(best, counterpart_value(meth, Vector{y0, y1, std::max(0.0, 1.0 - y0 - y1)}, inst));
                }
            const auto r = solve_counterpart(meth, inst);
            EXPECT_LE(r.objective, best + 1e-9);
            EXPECT_NEAR(r.objective, best, 5e-3);
        }
    }
}

TEST(Counterpart, BeatsRandomPortfoliosAndIsCertified) {
    std::mt19937_64 rng(163);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + trial * 7;
        const auto inst = random_instance(rng, n, 1 + trial % std::min<std::size_t>(n, 20), 5.0 + trial % 16);
        for (Method m : {Method::Budgeted, Method::Ellipsoidal, Method::Perspective}) {
            const auto r = solve_counterpart(m, inst);
            EXPECT_LE(r.gap, 1e-6 * std::abs(r.objective) + 1e-15);
            EXPECT_LE(r.lower_bound, r.objective);
            for (int s = 0; s < 50; ++s) {
                const Vector y = sparse_simplex_point(rng, n);
                EXPECT_LE(r.lower_bound, counterpart_value(m, y, inst) + 1e-12);
            }
            if (m == Method::Perspective) {
                EXPECT_LE(std::abs(r.objective - worst_case(r.y_star, inst)), 1e-4 * std::abs(r.objective));
            }
        }
    }
}

TEST(Counterpart, WithinFiveQuartersOfRobustOptimum) {
    std::mt19937_64 rng(167);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const auto inst = random_instance(rng, n, 1 + trial % n, 2.0 + trial % 10);
        const auto r = solve_counterpart(Method::Perspective, inst);
        for (int s = 0; s < 500; ++s) {
            const Vector y = sparse_simplex_point(rng, n);
            const double robust = oracle::subset_worst_case(y, inst);
            EXPECT_LE(r.objective, 1.25 * robust + 1e-12);
            EXPECT_LE(r.objective, robust + 1e-6 * robust);
        }
    }
}

TEST(Counterpart, ZeroBudgetAndDeterminism) {
    const RobustInstance inst({0.4, 0.1, 0.9}, {1, 1, 1}, 0, 2);
    const auto r = solve_counterpart(Method::Perspective, inst);
    EXPECT_DOUBLE_EQ(r.objective, 0.1);
    std::mt19937_64 rng(173);
    const auto big = random_instance(rng, 50, 5, 10);
    const auto r1 = solve_counterpart(Method::Perspective, big);
    const auto r2 = solve_counterpart(Method::Perspective, big);
    EXPECT_EQ(r1.y_star.y(), r2.y_star.y());
    EXPECT_EQ(r1.objective, r2.objective);
}

TEST(Counterpart, IterationCapRaisesWithBestIterate) {
    std::mt19937_64 rng(179);
    const auto inst = random_instance(rng, 30, 5, 10);
    SolveOptions opts;
    opts.max_iter = 2;
    try {
        solve_counterpart(Method::Ellipsoidal, inst, opts);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_EQ(e.best_iterate().size(), 30U);
        EXPECT_GT(e.gap(), 0.0);
        EXPECT_TRUE(std::isfinite(e.best_value()));
    }
}

TEST(Method, ParseRoundTrip) {
    for (Method m : {Method::Nominal, Method::Budgeted, Method::Ellipsoidal, Method::Perspective})
        EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_FALSE(parse_method("robust").has_value());
}
