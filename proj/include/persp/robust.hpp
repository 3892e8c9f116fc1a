#pragma once

// Robust portfolio selection over the simplex with the uncertainty set
//   U = {a~ + x : sum (d_i x_i)^2 <= b, x supported on at most k coordinates}.
//
// Objective oracles for the nominal, budgeted, ellipsoidal and perspective
// counterparts, the exact worst-case evaluator, the Fenchel identity behind
// the conic counterpart and its closed-form dual certificate, and a solver for
// min_{y in simplex} of each counterpart.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persp/core.hpp"

namespace persp {

struct RobustInstance {
    Vector a_tilde;
    Vector d;
    double b = 0.0;
    std::size_t k = 1;

    RobustInstance(Vector a_tilde_, Vector d_, double b_, std::size_t k_)
        : a_tilde(std::move(a_tilde_)), d(std::move(d_)), b(b_), k(k_) {
        if (a_tilde.empty()) throw DomainError("RobustInstance: empty instance");
        if (a_tilde.size() != d.size()) throw DimensionError("RobustInstance: |a_tilde| != |d|");
        for (double v : a_tilde)
            if (!std::isfinite(v)) throw DomainError("RobustInstance: non-finite a_tilde entry");
        for (double v : d)
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("RobustInstance: d entries must be positive");
        if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("RobustInstance: b must be non-negative");
        if (k < 1 || k > a_tilde.size()) throw DomainError("RobustInstance: need 1 <= k <= n");
    }

    std::size_t n() const noexcept { return a_tilde.size(); }
};

/// A point of the unit simplex.
class PortfolioPoint {
public:
    explicit PortfolioPoint(Vector y, double tol = 1e-9) : y_(std::move(y)) {
        double sum = 0.0;
        for (double& v : y_) {
            if (!std::isfinite(v) || v < -tol) throw DomainError("PortfolioPoint: entries must be non-negative");
            v = std::max(v, 0.0);
            sum += v;
        }
        if (std::abs(sum - 1.0) > tol) throw DomainError("PortfolioPoint: entries must sum to 1");
    }

    const Vector& y() const noexcept { return y_; }
    std::size_t size() const noexcept { return y_.size(); }

private:
    Vector y_;
};

namespace detail {

inline void check_dim(const Vector& y, const RobustInstance& inst) {
    if (y.size() != inst.n()) throw DimensionError("robust: |y| != n");
}

// Sum of the k largest entries of v.
inline double top_k_sum(Vector v, std::size_t k) {
    k = std::min(k, v.size());
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
    return std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
}

}  // namespace detail

/// s(y): sum of the k largest (y_i/d_i)^2.
inline double top_k_sq_sum(const Vector& y, const RobustInstance& inst) {
    detail::check_dim(y, inst);
    Vector r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double q = y[i] / inst.d[i];
        r[i] = q * q;
    }
    return detail::top_k_sum(std::move(r), inst.k);
}

inline double nominal_value(const Vector& y, const RobustInstance& inst) {
    detail::check_dim(y, inst);
    return dot(inst.a_tilde, y);
}

/// a~'y + sqrt(b s(y)).
inline double perspective_value(const Vector& y, const RobustInstance& inst) {
    return nominal_value(y, inst) + std::sqrt(inst.b * top_k_sq_sum(y, inst));
}

/// a~'y + sqrt(b) * (sum of the k largest |y_i|/d_i).
inline double budgeted_value(const Vector& y, const RobustInstance& inst) {
    detail::check_dim(y, inst);
    Vector r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = std::abs(y[i]) / inst.d[i];
    return nominal_value(y, inst) + std::sqrt(inst.b) * detail::top_k_sum(std::move(r), inst.k);
}

/// a~'y + sqrt(b) * ||y / d||_2.
inline double ellipsoidal_value(const Vector& y, const RobustInstance& inst) {
    detail::check_dim(y, inst);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double q = y[i] / inst.d[i];
        s += q * q;
    }
    return nominal_value(y, inst) + std::sqrt(inst.b) * std::sqrt(s);
}

/// Exact worst case over U at fixed y: for a support S the inner maximum is
/// sqrt(b sum_{S} (y_i/d_i)^2), so the best S is the top-k set.
inline double worst_case(const Vector& y, const RobustInstance& inst) {
    return nominal_value(y, inst) + std::sqrt(inst.b * top_k_sq_sum(y, inst));
}

inline double top_k_sq_sum(const PortfolioPoint& y, const RobustInstance& inst) { return top_k_sq_sum(y.y(), inst); }
inline double perspective_value(const PortfolioPoint& y, const RobustInstance& inst) {
    return perspective_value(y.y(), inst);
}
inline double budgeted_value(const PortfolioPoint& y, const RobustInstance& inst) { return budgeted_value(y.y(), inst); }
inline double ellipsoidal_value(const PortfolioPoint& y, const RobustInstance& inst) {
    return ellipsoidal_value(y.y(), inst);
}
inline double worst_case(const PortfolioPoint& y, const RobustInstance& inst) { return worst_case(y.y(), inst); }

// ---------------------------------------------------------------------------
// Conic counterpart and its dual certificate.

struct FenchelResult {
    double value = 0.0;   // x^2 / z, possibly +inf
    double p_star = 0.0;  // 2x / z, possibly +-inf
    bool infinite = false;
};

/// max_p p x - p^2 z / 4 in closed form.
inline FenchelResult fenchel_identity(double x, double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("fenchel_identity: z must lie in [0,1]");
    FenchelResult r;
    r.p_star = safe_div(2.0 * x, z);
    r.value = safe_div(x * x, z);
    r.infinite = std::isinf(r.value);
    if (!r.infinite) r.value = r.p_star * x - r.p_star * r.p_star * z / 4.0;
    return r;
}

/// Multipliers (lambda, mu, gamma = lambda mu, t, p) of the rotated-cone
/// counterpart min a~'y + lambda b + mu k + sum t_i s.t.
/// (y_i/d_i)^2 <= 4 (t_i + mu) lambda.
struct DualCertificate {
    double lambda = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
    Vector t;
    Vector p;
    /// lambda is 0 (y/d = 0) or infinite (b = 0); values follow the 0/0 = 0 convention.
    bool degenerate = false;
};

/// a~'y + lambda b + mu k + sum t_i. Degenerate certificates contribute only
/// the nominal part (their penalty terms are 0 * inf limits equal to zero).
inline double socp_objective(const Vector& y, const RobustInstance& inst, const DualCertificate& cert) {
    const double nominal = nominal_value(y, inst);
    if (cert.degenerate) return nominal;
    return nominal + cert.lambda * inst.b + cert.mu * static_cast<double>(inst.k) +
           std::accumulate(cert.t.begin(), cert.t.end(), 0.0);
}

/// Checks the rotated cone rows (y_i/d_i)^2 <= 4 (t_i + mu) lambda within rel_tol.
inline bool socp_feasible(const Vector& y, const RobustInstance& inst, const DualCertificate& cert,
                          double rel_tol = 1e-9) {
    if (cert.degenerate) return true;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double q = y[i] / inst.d[i];
        const double lhs = q * q;
        const double rhs = 4.0 * (cert.t[i] + cert.mu) * cert.lambda;
        if (lhs > rhs * (1.0 + rel_tol) + rel_tol * 1e-12) return false;
    }
    return true;
}

/// Closed-form optimal multipliers at fixed y:
/// gamma* = 0.25 (y/d)^2_(k+1) (0 when k = n),
/// lambda* = sqrt((gamma k + sum max{0, 0.25 (y_i/d_i)^2 - gamma}) / b),
/// mu* = gamma / lambda, t_i = max{0, 0.25 (y_i/d_i)^2 - gamma} / lambda,
/// p_i = y_i / (lambda d_i).
inline DualCertificate optimal_multipliers(const Vector& y, const RobustInstance& inst) {
    detail::check_dim(y, inst);
    const std::size_t n = inst.n();
    Vector u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = y[i] / inst.d[i];
        u[i] = 0.25 * q * q;
    }
    DualCertificate cert;
    if (inst.k < n) {
        Vector sorted(u);
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(inst.k), sorted.end(),
                         std::greater<>());
        cert.gamma = sorted[inst.k];
    }
    double excess = cert.gamma * static_cast<double>(inst.k);
    for (double ui : u) excess += std::max(0.0, ui - cert.gamma);

    cert.t.assign(n, 0.0);
    cert.p.assign(n, 0.0);
    if (inst.b == 0.0) {
        cert.lambda = kInf;
        cert.degenerate = true;
        return cert;
    }
    cert.lambda = std::sqrt(excess / inst.b);
    cert.degenerate = cert.lambda == 0.0;
    cert.mu = safe_div(cert.gamma, cert.lambda);
    for (std::size_t i = 0; i < n; ++i) {
        cert.t[i] = safe_div(std::max(0.0, u[i] - cert.gamma), cert.lambda);
        cert.p[i] = safe_div(y[i], cert.lambda * inst.d[i]);
    }
    return cert;
}

inline DualCertificate optimal_multipliers(const PortfolioPoint& y, const RobustInstance& inst) {
    return optimal_multipliers(y.y(), inst);
}

// ---------------------------------------------------------------------------
// Counterpart solver.

enum class Method { Nominal, Budgeted, Ellipsoidal, Perspective };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::Nominal: return "nominal";
        case Method::Budgeted: return "budgeted";
        case Method::Ellipsoidal: return "ellipsoidal";
        case Method::Perspective: return "perspective";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
    for (Method m : {Method::Nominal, Method::Budgeted, Method::Ellipsoidal, Method::Perspective})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

/// Objective of the given counterpart at y.
inline double counterpart_value(Method m, const Vector& y, const RobustInstance& inst) {
    switch (m) {
        case Method::Nominal: return nominal_value(y, inst);
        case Method::Budgeted: return budgeted_value(y, inst);
        case Method::Ellipsoidal: return ellipsoidal_value(y, inst);
        case Method::Perspective: return perspective_value(y, inst);
    }
    return kInf;
}

struct CounterpartResult {
    PortfolioPoint y_star;
    double objective = 0.0;
    Method method = Method::Nominal;
    std::size_t iterations = 0;
    /// Certified lower bound on the optimal value and the resulting gap.
    double lower_bound = 0.0;
    double gap = 0.0;
};

struct SolveOptions {
    Tolerance tol{};
    std::size_t max_iter = 200000;
};

namespace detail {

// Squared k-support-type budget min {sum v_i^2 / z_i : z in [0,1]^n, sum z <= k}
// for v >= 0. Returns the value and the threshold tau: coordinates with
// v_i >= tau get z_i = 1, the rest z_i = v_i / tau (tau = 0 when at most k
// coordinates are nonzero).
struct PerspectiveBudget {
    double value = 0.0;
    double tau = 0.0;
};

inline PerspectiveBudget perspective_budget(const Vector& v, std::size_t k) {
    Vector s;
    s.reserve(v.size());
    for (double vi : v)
        if (vi > 0.0) s.push_back(vi);
    std::sort(s.begin(), s.end(), std::greater<>());
    PerspectiveBudget out;
    if (s.size() <= k) {
        for (double si : s) out.value += si * si;
        return out;
    }
    Vector suffix(s.size() + 1, 0.0);
    for (std::size_t i = s.size(); i-- > 0;) suffix[i] = suffix[i + 1] + s[i];
    double head = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        const double tau = suffix[r] / static_cast<double>(k - r);
        // the first r with s[r] <= tau also has s[r-1] >= tau
        if (s[r] <= tau || r + 1 == k) {
            out.tau = tau;
            out.value = head + suffix[r] * tau;
            return out;
        }
        head += s[r] * s[r];
    }
    return out;
}

// Inner perturbation x_i = max(0, theta - a~_i): the cheapest way to lift
// every perturbed cost to at least theta.
inline Vector lift_to(double theta, const RobustInstance& inst) {
    Vector x(inst.n());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(0.0, theta - inst.a_tilde[i]);
    return x;
}

// Is x(theta) inside the (convexified) uncertainty set of the method?
inline bool lift_feasible(Method m, double theta, const RobustInstance& inst) {
    const Vector x = lift_to(theta, inst);
    const std::size_t n = inst.n();
    switch (m) {
        case Method::Ellipsoidal: {
            double g = 0.0;
            for (std::size_t i = 0; i < n; ++i) g += inst.d[i] * inst.d[i] * x[i] * x[i];
            return g <= inst.b;
        }
        case Method::Perspective: {
            Vector v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = inst.d[i] * x[i];
            return perspective_budget(v, inst.k).value <= inst.b;
        }
        case Method::Budgeted: {
            const double sb = std::sqrt(inst.b);
            double used = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double ratio = x[i] * inst.d[i] / sb;
                if (ratio > 1.0) return false;
                used += ratio;
            }
            return used <= static_cast<double>(inst.k);
        }
        case Method::Nominal: return theta <= *std::min_element(inst.a_tilde.begin(), inst.a_tilde.end());
    }
    return false;
}

inline Vector unit_vector(std::size_t n, std::size_t i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    return e;
}

inline std::size_t argmin_index(const Vector& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

inline bool normalize_simplex(Vector& y) {
    const double s = std::accumulate(y.begin(), y.end(), 0.0);
    if (!(s > 0.0) || !std::isfinite(s)) return false;
    for (double& v : y) v /= s;
    return true;
}

// Primal candidates from the stationarity conditions at the dual level theta:
// y is proportional to the gradient of the budget function at x(theta) on the
// coordinates lifted to theta.
inline std::vector<Vector> primal_candidates(Method m, double theta, const RobustInstance& inst) {
    const std::size_t n = inst.n();
    const Vector x = lift_to(theta, inst);
    std::vector<Vector> out;
    out.push_back(unit_vector(n, argmin_index(inst.a_tilde)));
    Vector y(n, 0.0);
    switch (m) {
        case Method::Ellipsoidal:
            for (std::size_t i = 0; i < n; ++i) y[i] = inst.d[i] * inst.d[i] * x[i];
            break;
        case Method::Perspective: {
            Vector v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = inst.d[i] * x[i];
            const double tau = perspective_budget(v, inst.k).tau;
            for (std::size_t i = 0; i < n; ++i)
                if (v[i] > 0.0) y[i] = inst.d[i] * std::max(v[i], tau);
            break;
        }
        case Method::Budgeted: {
            for (std::size_t i = 0; i < n; ++i)
                if (x[i] > 0.0) y[i] = inst.d[i];
            Vector cap(n);
            const double sb = std::sqrt(inst.b);
            for (std::size_t i = 0; i < n; ++i) cap[i] = inst.a_tilde[i] + sb / inst.d[i];
            out.push_back(unit_vector(n, argmin_index(cap)));
            break;
        }
        case Method::Nominal: break;
    }
    if (normalize_simplex(y)) out.push_back(std::move(y));
    return out;
}

}  // namespace detail

/// Minimizes the chosen counterpart over the unit simplex.
///
/// Every counterpart is a~'y + max_{x in U} x'y for a convex set U, so by
/// minimax its optimal value is max {theta : x(theta) in U} with
/// x_i(theta) = max(0, theta - a~_i); membership is monotone in theta and is
/// found by bisection. The minimizer is recovered from the stationarity
/// conditions at the final level and certified by the gap between its
/// objective and the bisection lower bound. Throws SolverError when the gap
/// stays above solver_rel after max_iter bisection steps.
inline CounterpartResult solve_counterpart(Method m, const RobustInstance& inst, const SolveOptions& opts = {}) {
    opts.tol.validate();
    const std::size_t n = inst.n();
    const std::size_t j = detail::argmin_index(inst.a_tilde);
    const double floor_value = inst.a_tilde[j];
    if (m == Method::Nominal || inst.b == 0.0) {
        Vector y = detail::unit_vector(n, j);
        const double obj = counterpart_value(m, y, inst);
        return CounterpartResult{PortfolioPoint(std::move(y)), obj, m, 0, floor_value, obj - floor_value};
    }

    // theta* <= a~_j + sqrt(b)/d_j since every budget is at least (d_j x_j)^2.
    double lo = floor_value;
    double hi = floor_value + std::sqrt(inst.b) / inst.d[j];
    std::size_t iterations = 0;
    const double width_target = 1e-3 * opts.tol.solver_rel;
    while (iterations < opts.max_iter) {
        const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
        if (hi - lo <= width_target * scale) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::lift_feasible(m, mid, inst)) lo = mid;
        else hi = mid;
        ++iterations;
    }

    Vector best;
    double best_value = kInf;
    for (auto& y : detail::primal_candidates(m, lo, inst)) {
        const double v = counterpart_value(m, y, inst);
        if (v < best_value) {
            best_value = v;
            best = std::move(y);
        }
    }
    const double gap = std::max(0.0, best_value - lo);
    if (gap > opts.tol.solver_rel * std::abs(best_value) + 1e-15)
        throw SolverError(std::string("solve_counterpart(") + to_string(m) + "): gap " + std::to_string(gap) +
                              " after " + std::to_string(iterations) + " iterations",
                          best, best_value, gap);
    return CounterpartResult{PortfolioPoint(std::move(best)), best_value, m, iterations, lo, gap};
}

}  // namespace persp
