#pragma once

// Exact solvers for min a'x + c'z over X. For a fixed support S the
// continuous part has the closed form sum_{S} c_i - ||a_S||_2, so the problem
// reduces to min_{z in Z} c'z - sqrt(sum a_i^2 z_i).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "persp/core.hpp"

namespace persp {

struct SupportSolution {
    IndexSet support;
    double value = 0.0;
    Vector x_opt;
};

struct DiscreteSolution {
    BinaryVector z_opt;
    Vector x_opt;
    double value = 0.0;
    std::string method;
};

/// Objective of the discrete core problem at binary z.
inline double discrete_objective(const BinaryVector& z, const Vector& a, const Vector& c) {
    double lin = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!z[i]) continue;
        lin += c[i];
        sq += a[i] * a[i];
    }
    return lin - std::sqrt(sq);
}

/// Optimal x on support S: x_i = -a_i / ||a_S|| for i in S (zero if ||a_S|| = 0).
inline SupportSolution support_value(IndexSet S, const ProblemInstance& inst) {
    S = normalize_index_set(std::move(S), inst.n());
    SupportSolution out;
    out.x_opt.assign(inst.n(), 0.0);
    double lin = 0.0, sq = 0.0;
    for (std::size_t i : S) {
        lin += inst.c[i];
        sq += inst.a[i] * inst.a[i];
    }
    const double norm = std::sqrt(sq);
    for (std::size_t i : S) out.x_opt[i] = norm > 0.0 ? -inst.a[i] / norm : safe_div(0.0, norm);
    out.value = lin - norm;
    out.support = std::move(S);
    return out;
}

/// Enumerates Z (n <= 24). Supports are visited in lexicographic order and a
/// strictly smaller value is required to replace the incumbent, so ties go to
/// the lexicographically smallest z.
inline DiscreteSolution solve_discrete_bruteforce(const ProblemInstance& inst) {
    const auto members = enumerate_Z(inst.zfam);
    if (members.empty()) throw DomainError("solve_discrete_bruteforce: Z is empty");
    const BinaryVector* best = nullptr;
    double best_value = kInf;
    for (const auto& z : members) {
        const double v = discrete_objective(z, inst.a, inst.c);
        if (v < best_value) {
            best_value = v;
            best = &z;
        }
    }
    auto sol = support_value(support_of(*best), inst);
    return DiscreteSolution{*best, std::move(sol.x_opt), sol.value, "bruteforce"};
}

/// c = 0 and ||z||_1 = k: take the k largest a_i^2 (smallest index on ties).
inline DiscreteSolution solve_discrete_sort(const Vector& a, std::size_t k) {
    const std::size_t n = a.size();
    if (k < 1 || k > n) throw DomainError("solve_discrete_sort: need 1 <= k <= n");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i] * a[i] > a[j] * a[j]; });
    IndexSet S(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(S.begin(), S.end());
    const ProblemInstance inst(a, Vector(n, 0.0), ZFamily::cardinality_eq(n, k));
    auto sol = support_value(S, inst);
    return DiscreteSolution{indicator_of(sol.support, n), std::move(sol.x_opt), sol.value, "sort"};
}

}  // namespace persp
