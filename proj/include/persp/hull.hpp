#pragma once

// Relaxations of conv(X): the polyhedra P(alpha) = conv{(x,z) : z in Z,
// sum |alpha_i x_i| <= sqrt(sum alpha_i^2 z_i)}, their submodular cuts, the
// natural relaxation C(alpha) and the perspective relaxation R_persp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "persp/core.hpp"
#include "persp/discrete.hpp"

namespace persp {

/// The direction alpha of a P(alpha) family member, with the index order by
/// decreasing |alpha_i| cached (smallest index first on ties).
class CutVector {
public:
    explicit CutVector(Vector alpha) : alpha_(std::move(alpha)), order_(alpha_.size()) {
        for (double v : alpha_)
            if (!std::isfinite(v)) throw DomainError("CutVector: non-finite entry");
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(),
                         [&](std::size_t i, std::size_t j) { return std::abs(alpha_[i]) > std::abs(alpha_[j]); });
    }

    const Vector& alpha() const noexcept { return alpha_; }
    const std::vector<std::size_t>& order_by_magnitude() const noexcept { return order_; }
    std::size_t size() const noexcept { return alpha_.size(); }
    double operator[](std::size_t i) const { return alpha_[i]; }

    bool nontrivial() const {
        return std::any_of(alpha_.begin(), alpha_.end(), [](double v) { return v != 0.0; });
    }

private:
    Vector alpha_;
    std::vector<std::size_t> order_;
};

enum class CutFamily { Submodular1, Submodular2, Base, Cardinality };

inline const char* to_string(CutFamily f) {
    switch (f) {
        case CutFamily::Submodular1: return "submodular1";
        case CutFamily::Submodular2: return "submodular2";
        case CutFamily::Base: return "base";
        case CutFamily::Cardinality: return "cardinality";
    }
    return "?";
}

/// sum_i pi_abs_i |x_i| + sum_i rho_z_i z_i <= rhs
struct LinearCut {
    Vector pi_abs;
    Vector rho_z;
    double rhs = 0.0;
    CutFamily family = CutFamily::Submodular1;
    IndexSet S;

    double lhs(const Vector& x, const Vector& z) const {
        if (x.size() != pi_abs.size() || z.size() != rho_z.size())
            throw DimensionError("LinearCut: dimension mismatch");
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) v += pi_abs[i] * std::abs(x[i]) + rho_z[i] * z[i];
        return v;
    }
    /// Positive when the cut is violated.
    double violation(const Vector& x, const Vector& z) const { return lhs(x, z) - rhs; }
    double violation(const MixedPoint& p) const { return violation(p.x(), p.z()); }
};

namespace detail {

inline double sum_sq_over(const IndexSet& S, const Vector& alpha) {
    double s = 0.0;
    for (std::size_t i : S) s += alpha[i] * alpha[i];
    return s;
}

// g(T u {i}) - g(T) from the squared mass of T, written to avoid cancellation.
inline double marginal(double alpha_i, double mass_T) {
    const double a2 = alpha_i * alpha_i;
    return safe_div(a2, std::sqrt(mass_T + a2) + std::sqrt(mass_T));
}

inline LinearCut cut_skeleton(const CutVector& alpha, IndexSet S, CutFamily family) {
    LinearCut cut;
    cut.pi_abs.resize(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) cut.pi_abs[i] = std::abs(alpha[i]);
    cut.rho_z.assign(alpha.size(), 0.0);
    cut.family = family;
    cut.S = std::move(S);
    return cut;
}

}  // namespace detail

/// g(S) = sqrt(sum_{i in S} alpha_i^2).
inline double g_value(const IndexSet& S, const CutVector& alpha) {
    for (std::size_t i : S)
        if (i >= alpha.size()) throw DomainError("g_value: index out of range");
    return std::sqrt(detail::sum_sq_over(S, alpha.alpha()));
}

/// rho_i(S) = g(S u {i}) - g(S), for i not in S.
inline double rho(std::size_t i, const IndexSet& S, const CutVector& alpha) {
    if (i >= alpha.size()) throw DomainError("rho: index out of range");
    if (std::find(S.begin(), S.end(), i) != S.end()) throw DomainError("rho: i must not belong to S");
    for (std::size_t j : S)
        if (j >= alpha.size()) throw DomainError("rho: index out of range");
    return detail::marginal(alpha[i], detail::sum_sq_over(S, alpha.alpha()));
}

/// sum |alpha_i x_i| <= g(S) - sum_{S} rho_i(S\i)(1-z_i) + sum_{N\S} rho_i(empty) z_i
inline LinearCut submodular_cut_1(IndexSet S, const CutVector& alpha) {
    S = normalize_index_set(std::move(S), alpha.size());
    const BinaryVector in_S = indicator_of(S, alpha.size());
    const double mass = detail::sum_sq_over(S, alpha.alpha());
    auto cut = detail::cut_skeleton(alpha, S, CutFamily::Submodular1);
    cut.rhs = std::sqrt(mass);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a2 = alpha[i] * alpha[i];
        if (in_S[i]) {
            const double r = detail::marginal(alpha[i], std::max(mass - a2, 0.0));
            cut.rhs -= r;
            cut.rho_z[i] = -r;
        } else {
            cut.rho_z[i] = -std::abs(alpha[i]);
        }
    }
    return cut;
}

/// sum |alpha_i x_i| <= g(S) - sum_{S} rho_i(N\i)(1-z_i) + sum_{N\S} rho_i(S) z_i
inline LinearCut submodular_cut_2(IndexSet S, const CutVector& alpha) {
    S = normalize_index_set(std::move(S), alpha.size());
    const BinaryVector in_S = indicator_of(S, alpha.size());
    const double mass = detail::sum_sq_over(S, alpha.alpha());
    const double total = squared_norm(alpha.alpha());
    auto cut = detail::cut_skeleton(alpha, S, CutFamily::Submodular2);
    cut.rhs = std::sqrt(mass);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a2 = alpha[i] * alpha[i];
        if (in_S[i]) {
            const double r = detail::marginal(alpha[i], std::max(total - a2, 0.0));
            cut.rhs -= r;
            cut.rho_z[i] = -r;
        } else {
            cut.rho_z[i] = -detail::marginal(alpha[i], mass);
        }
    }
    return cut;
}

/// submodular_cut_1 without the N\S terms. Valid only on {z : z_i = 0, i not in S}.
inline LinearCut base_inequality(IndexSet S, const CutVector& alpha) {
    auto cut = submodular_cut_1(std::move(S), alpha);
    cut.family = CutFamily::Base;
    const BinaryVector in_S = indicator_of(cut.S, alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (!in_S[i]) cut.rho_z[i] = 0.0;
    return cut;
}

/// ||x||_1 <= sqrt(k), valid for CardinalityEQ(k).
inline LinearCut cardinality_cut(const ZFamily& zfam) {
    if (zfam.kind() != ZKind::CardinalityEQ) throw DomainError("cardinality_cut: requires a CardinalityEQ family");
    LinearCut cut;
    cut.pi_abs.assign(zfam.n(), 1.0);
    cut.rho_z.assign(zfam.n(), 0.0);
    cut.rhs = std::sqrt(static_cast<double>(zfam.k()));
    cut.family = CutFamily::Cardinality;
    return cut;
}

enum class SeparationMode { Heuristic, Exact };

inline constexpr std::size_t kMaxExactSeparationDim = 16;

struct ScoredCut {
    LinearCut cut;
    double violation = 0.0;
};

/// All cuts of both submodular families found by the given mode whose violation
/// exceeds feas_abs, most violated first (stable with respect to generation
/// order). Heuristic mode tries the n+1 prefixes of the order by decreasing z;
/// exact mode tries every S.
inline std::vector<ScoredCut> violated_submodular_cuts(const MixedPoint& p, const CutVector& alpha,
                                                       SeparationMode mode, const Tolerance& tol = {}) {
    const std::size_t n = p.size();
    if (alpha.size() != n) throw DimensionError("separate_submodular: dimension mismatch");
    std::vector<ScoredCut> found;
    auto consider = [&](const IndexSet& S) {
        for (auto cut : {submodular_cut_1(S, alpha), submodular_cut_2(S, alpha)}) {
            const double v = cut.violation(p);
            if (v > tol.feas_abs) found.push_back({std::move(cut), v});
        }
    };
    if (mode == SeparationMode::Heuristic) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t i, std::size_t j) { return p.z()[i] > p.z()[j]; });
        IndexSet S;
        consider(S);
        for (std::size_t m = 0; m < n; ++m) {
            S.insert(std::upper_bound(S.begin(), S.end(), order[m]), order[m]);
            consider(S);
        }
    } else {
        if (n > kMaxExactSeparationDim)
            throw DimensionError("separate_submodular: exact mode limited to n <= " +
                                 std::to_string(kMaxExactSeparationDim));
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            IndexSet S;
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i) & 1U) S.push_back(i);
            consider(S);
        }
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const ScoredCut& l, const ScoredCut& r) { return l.violation > r.violation; });
    return found;
}

inline std::optional<ScoredCut> separate_submodular(const MixedPoint& p, const CutVector& alpha,
                                                    SeparationMode mode, const Tolerance& tol = {}) {
    auto cuts = violated_submodular_cuts(p, alpha, mode, tol);
    if (cuts.empty()) return std::nullopt;
    return std::move(cuts.front());
}

/// sum |alpha_i x_i| - sqrt(sum alpha_i^2 z_i); positive means outside C(alpha).
inline double alpha_excess(const MixedPoint& p, const CutVector& alpha) {
    if (alpha.size() != p.size()) throw DimensionError("alpha_excess: dimension mismatch");
    double lhs = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        lhs += std::abs(alpha[i] * p.x()[i]);
        mass += alpha[i] * alpha[i] * p.z()[i];
    }
    return lhs - std::sqrt(mass);
}

/// (x, z) in P0(alpha): z binary and in Z, and the alpha inequality holds.
inline bool p0_membership(const MixedPoint& p, const CutVector& alpha, const ZFamily& zfam,
                          const Tolerance& tol = {}) {
    if (p.size() != zfam.n()) throw DimensionError("p0_membership: dimension mismatch");
    BinaryVector zb;
    if (!round_binary(p.z(), tol.feas_abs, zb) || !zfam.contains(zb)) return false;
    return alpha_excess(p, alpha) <= tol.feas_abs;
}

/// (x, z) in C(alpha): z in conv(Z) and the alpha inequality holds.
inline bool c_alpha_membership(const MixedPoint& p, const CutVector& alpha, const ZFamily& zfam,
                               const Tolerance& tol = {}) {
    if (p.size() != zfam.n()) throw DimensionError("c_alpha_membership: dimension mismatch");
    return zfam.hull_contains(p.z(), tol.feas_abs) && alpha_excess(p, alpha) <= tol.feas_abs;
}

/// sum x_i^2 / z_i under the 0/0 = 0, a/0 = inf convention.
inline double perspective_sum(const MixedPoint& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += safe_div(p.x()[i] * p.x()[i], p.z()[i]);
    return s;
}

inline bool perspective_membership(const MixedPoint& p, const ZFamily& zfam, const Tolerance& tol = {}) {
    if (p.size() != zfam.n()) throw DimensionError("perspective_membership: dimension mismatch");
    return zfam.hull_contains(p.z(), tol.feas_abs) && perspective_sum(p) <= 1.0 + tol.feas_abs;
}

/// A direction alpha whose C(alpha) excludes p, or none when p satisfies the
/// perspective inequality. alpha_i = x_i / z_i, which gives
/// sum |alpha_i x_i| = q > sqrt(q) = sqrt(sum alpha_i^2 z_i) for q > 1. If some
/// z_i = 0 carries x_i != 0 the sum is infinite and sign(x_i) e_i is returned.
inline std::optional<CutVector> find_violating_alpha(const MixedPoint& p, const Tolerance& tol = {}) {
    if (perspective_sum(p) <= 1.0 + tol.feas_abs) return std::nullopt;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (p.z()[i] == 0.0 && p.x()[i] != 0.0) {
            Vector e(n, 0.0);
            e[i] = p.x()[i] > 0.0 ? 1.0 : -1.0;
            return CutVector(std::move(e));
        }
    }
    Vector alpha(n);
    for (std::size_t i = 0; i < n; ++i) alpha[i] = safe_div(p.x()[i], p.z()[i]);
    return CutVector(std::move(alpha));
}

// ---------------------------------------------------------------------------
// Natural convex relaxation: min c'z - sqrt(sum a_i^2 z_i) over conv(Z).

struct RelaxationSolution {
    Vector z_bar;
    double value = 0.0;
    BinaryVector rounded_z;
    double rounded_value = 0.0;
    std::size_t fractional_count = 0;
    /// Endpoints of the edge of conv(Z) containing z_bar (equal when z_bar is a vertex).
    BinaryVector edge_from;
    BinaryVector edge_to;
    /// Conditional-gradient duality gap at z_bar.
    double gap = 0.0;
};

namespace detail {

// Minimizer of keys'z over the vertices of conv(Z), smallest index on ties.
inline BinaryVector linear_oracle(const Vector& keys, const ZFamily& zfam) {
    const std::size_t n = keys.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return keys[i] < keys[j]; });
    BinaryVector z(n, 0);
    const std::size_t k = zfam.k();
    for (std::size_t m = 0; m < k; ++m) {
        const std::size_t i = order[m];
        if (zfam.kind() == ZKind::CardinalityEQ || keys[i] < 0.0) z[i] = 1;
    }
    return z;
}

struct SegmentMin {
    double t = 0.0;
    double value = 0.0;
};

// f(t) = c'(v + t(u - v)) - sqrt(w'(v + t(u - v))) is convex on [0, 1].
inline SegmentMin minimize_on_segment(const BinaryVector& v, const BinaryVector& u, const Vector& c,
                                      const Vector& w) {
    double lin0 = 0.0, slope = 0.0, mass0 = 0.0, mass_slope = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        lin0 += c[i] * v[i];
        mass0 += w[i] * v[i];
        const double dir = static_cast<double>(u[i]) - static_cast<double>(v[i]);
        slope += c[i] * dir;
        mass_slope += w[i] * dir;
    }
    auto f = [&](double t) { return lin0 + slope * t - std::sqrt(std::max(mass0 + mass_slope * t, 0.0)); };
    SegmentMin best{0.0, f(0.0)};
    auto offer = [&](double t) {
        const double val = f(t);
        if (val < best.value) best = {t, val};
    };
    offer(1.0);
    // stationarity: slope = mass_slope / (2 sqrt(mass0 + mass_slope t))
    if (mass_slope != 0.0 && slope != 0.0 && slope / mass_slope > 0.0) {
        const double root = mass_slope / (2.0 * slope);
        const double t = (root * root - mass0) / mass_slope;
        if (t > 0.0 && t < 1.0) offer(t);
    }
    return best;
}

inline std::vector<double> breakpoints(const Vector& c, const Vector& w, const ZFamily& zfam) {
    const std::size_t n = c.size();
    std::vector<double> bps;
    const bool pairwise = zfam.kind() == ZKind::CardinalityEQ || zfam.k() < n;
    const bool zero_crossings = zfam.kind() != ZKind::CardinalityEQ;
    for (std::size_t i = 0; i < n; ++i) {
        if (zero_crossings && w[i] > 0.0) {
            const double beta = c[i] / w[i];
            if (beta > 0.0 && std::isfinite(beta)) bps.push_back(beta);
        }
        if (!pairwise) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (w[i] == w[j]) continue;
            const double beta = (c[i] - c[j]) / (w[i] - w[j]);
            if (beta > 0.0 && std::isfinite(beta)) bps.push_back(beta);
        }
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

}  // namespace detail

/// Minimizes c'z - sqrt(sum a_i^2 z_i) over conv(Z) exactly.
///
/// The gradient is c - beta a^2 with beta = 1/(2 sqrt(sum a_i^2 z_i)), so an
/// optimum solves the linear problem over conv(Z) at some beta > 0. The LP
/// vertex only changes where two keys c_i - beta a_i^2 cross (or cross zero),
/// so the candidates are the vertices between consecutive breakpoints and the
/// segments joining consecutive vertices, which are edges of conv(Z). The 1-D
/// minimum on each segment has a closed form. The result is certified by the
/// conditional-gradient gap; a gap above solver_rel raises SolverError.
inline RelaxationSolution solve_relaxation(const ProblemInstance& inst, const Tolerance& tol = {}) {
    const std::size_t n = inst.n();
    const ZFamily& zfam = inst.zfam;
    const Vector& c = inst.c;
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = inst.a[i] * inst.a[i];

    const auto bps = detail::breakpoints(c, w, zfam);
    std::vector<double> probes;
    if (bps.empty()) {
        probes.push_back(1.0);
    } else {
        probes.push_back(0.5 * bps.front());
        for (std::size_t m = 0; m + 1 < bps.size(); ++m) probes.push_back(0.5 * (bps[m] + bps[m + 1]));
        probes.push_back(2.0 * bps.back());
    }
    std::vector<BinaryVector> vertices;
    for (double beta : probes) {
        Vector keys(n);
        for (std::size_t i = 0; i < n; ++i) keys[i] = c[i] - beta * w[i];
        auto v = detail::linear_oracle(keys, zfam);
        if (vertices.empty() || vertices.back() != v) vertices.push_back(std::move(v));
    }

    RelaxationSolution sol;
    sol.value = kInf;
    for (const auto& v : vertices) {
        const double val = discrete_objective(v, inst.a, c);
        if (val < sol.value) {
            sol.value = val;
            sol.z_bar = to_real(v);
            sol.edge_from = sol.edge_to = v;
        }
    }
    for (std::size_t m = 0; m + 1 < vertices.size(); ++m) {
        const auto& v = vertices[m];
        const auto& u = vertices[m + 1];
        const auto seg = detail::minimize_on_segment(v, u, c, w);
        if (seg.value < sol.value) {
            sol.value = seg.value;
            sol.z_bar.resize(n);
            for (std::size_t i = 0; i < n; ++i) sol.z_bar[i] = v[i] + seg.t * (double(u[i]) - double(v[i]));
            sol.edge_from = v;
            sol.edge_to = u;
        }
    }

    for (double zi : sol.z_bar)
        if (std::min(zi, 1.0 - zi) > tol.feas_abs) ++sol.fractional_count;

    if (sol.fractional_count == 0) {
        round_binary(sol.z_bar, tol.feas_abs, sol.rounded_z);
        sol.rounded_value = discrete_objective(sol.rounded_z, inst.a, c);
    } else {
        const double from = discrete_objective(sol.edge_from, inst.a, c);
        const double to = discrete_objective(sol.edge_to, inst.a, c);
        sol.rounded_z = to < from ? sol.edge_to : sol.edge_from;
        sol.rounded_value = std::min(from, to);
    }

    // certificate: gap = grad'(z_bar - v*) with v* the LP vertex at grad
    const double mass = std::inner_product(w.begin(), w.end(), sol.z_bar.begin(), 0.0);
    Vector grad(c);
    if (mass > 0.0) {
        const double beta = 0.5 / std::sqrt(mass);
        for (std::size_t i = 0; i < n; ++i) grad[i] -= beta * w[i];
    } else {
        Vector neg_w(n);
        for (std::size_t i = 0; i < n; ++i) neg_w[i] = -w[i];
        const auto heavy = detail::linear_oracle(neg_w, zfam);
        double best_mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) best_mass += w[i] * heavy[i];
        if (best_mass > 0.0)
            throw SolverError("solve_relaxation: z_bar has zero a-mass but a heavier vertex exists", sol.z_bar,
                              sol.value, kInf);
    }
    const auto vstar = detail::linear_oracle(grad, zfam);
    sol.gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) sol.gap += grad[i] * (sol.z_bar[i] - vstar[i]);
    if (sol.gap > tol.solver_rel * std::max(1.0, std::abs(sol.value)))
        throw SolverError("solve_relaxation: optimality gap " + std::to_string(sol.gap) + " above tolerance",
                          sol.z_bar, sol.value, sol.gap);
    return sol;
}

// ---------------------------------------------------------------------------
// Lifting y'Sigma y <= b with indicators onto X in dimension n + 1.

/// Dense row-major square matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    Matrix(std::size_t n, Vector row_major) : n_(n), data_(std::move(row_major)) {
        if (data_.size() != n * n) throw DimensionError("Matrix: expected n*n entries");
    }

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    const Vector& data() const noexcept { return data_; }

    double quadratic_form(const Vector& y) const {
        if (y.size() != n_) throw DimensionError("Matrix::quadratic_form: dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) s += y[i] * (*this)(i, j) * y[j];
        return s;
    }

private:
    std::size_t n_ = 0;
    Vector data_;
};

/// Sigma = D + R with R PSD. Coordinates 1..n of the lifted point carry
/// sqrt(D_ii/b)|y_i|, coordinate 0 carries sqrt(y'(R/b)y) with z_0 = 1.
struct QuadLifting {
    std::size_t n = 0;
    Vector scale;
    Matrix residual;

    std::size_t lifted_dim() const noexcept { return n + 1; }

    /// (x_0, x_1..x_n) for a given y; ||lift(y)||^2 = y'Sigma y / b.
    Vector lift(const Vector& y) const {
        if (y.size() != n) throw DimensionError("QuadLifting::lift: dimension mismatch");
        Vector out(n + 1);
        out[0] = std::sqrt(std::max(residual.quadratic_form(y), 0.0));
        for (std::size_t i = 0; i < n; ++i) out[i + 1] = scale[i] * std::abs(y[i]);
        return out;
    }
};

inline constexpr double kPsdShift = 1e-10;

inline QuadLifting quad_reformulate(const Matrix& sigma, double b, const Vector& D) {
    const std::size_t n = sigma.size();
    if (D.size() != n) throw DimensionError("quad_reformulate: |D| != n");
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("quad_reformulate: b must be positive");
    double scale_max = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(D[i] > 0.0) || !std::isfinite(D[i])) throw DomainError("quad_reformulate: D must be positive");
        scale_max = std::max(scale_max, std::abs(sigma(i, i)));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-12 * scale_max)
                throw DomainError("quad_reformulate: Sigma is not symmetric");

    Matrix R(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) R(i, j) = sigma(i, j) - (i == j ? D[i] : 0.0);

    // Cholesky of R + shift*I; a non-positive pivot means R is not PSD.
    const double shift = kPsdShift * scale_max;
    Matrix L(n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = R(j, j) + shift;
        for (std::size_t m = 0; m < j; ++m) pivot -= L(j, m) * L(j, m);
        if (!(pivot > 0.0))
            throw DomainError("quad_reformulate: Sigma - D is not PSD (pivot " + std::to_string(j) +
                              " = " + std::to_string(pivot) + ")");
        L(j, j) = std::sqrt(pivot);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = R(i, j);
            for (std::size_t m = 0; m < j; ++m) s -= L(i, m) * L(j, m);
            L(i, j) = s / L(j, j);
        }
    }

    QuadLifting out;
    out.n = n;
    out.scale.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.scale[i] = std::sqrt(D[i] / b);
    out.residual = Matrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.residual(i, j) = R(i, j) / b;
    return out;
}

}  // namespace persp
