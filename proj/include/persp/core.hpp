#pragma once

// Domain types shared by every module: the Z families, mixed points (x, z),
// linear-objective instances and the tolerance bundle, plus the membership
// predicates for X and its big-M linearization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace persp {

using Vector = std::vector<double>;
using BinaryVector = std::vector<std::uint8_t>;
/// Sorted, duplicate-free, 0-based coordinate indices.
using IndexSet = std::vector<std::size_t>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Raised when an iterative routine stops without meeting its tolerance.
/// Carries the best iterate found and the remaining optimality gap estimate.
class SolverError : public Error {
public:
    SolverError(const std::string& what, Vector best_iterate, double best_value, double gap)
        : Error(what), best_iterate_(std::move(best_iterate)), best_value_(best_value), gap_(gap) {}

    const Vector& best_iterate() const noexcept { return best_iterate_; }
    double best_value() const noexcept { return best_value_; }
    double gap() const noexcept { return gap_; }

private:
    Vector best_iterate_;
    double best_value_;
    double gap_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Division with the convention 0/0 = 0 and a/0 = +-inf by the sign of a.
inline double safe_div(double num, double den) noexcept {
    if (den != 0.0) return num / den;
    if (num == 0.0) return 0.0;
    return num > 0.0 ? kInf : -kInf;
}

struct Tolerance {
    double feas_abs = 1e-9;
    double solver_rel = 1e-6;
    double oracle_abs = 1e-4;

    void validate() const {
        if (!(feas_abs > 0.0) || !(solver_rel > 0.0) || !(oracle_abs > 0.0))
            throw DomainError("tolerances must be strictly positive");
    }
};

enum class ZKind { FreeBox, CardinalityLE, CardinalityEQ };

/// One of the three supported families Z of {0,1}^n: the full cube,
/// {||z||_1 <= k} or {||z||_1 = k}.
class ZFamily {
public:
    static ZFamily free_box(std::size_t n) { return ZFamily(ZKind::FreeBox, n, n); }
    static ZFamily cardinality_le(std::size_t n, std::size_t k) {
        return ZFamily(ZKind::CardinalityLE, n, k);
    }
    static ZFamily cardinality_eq(std::size_t n, std::size_t k) {
        return ZFamily(ZKind::CardinalityEQ, n, k);
    }

    ZKind kind() const noexcept { return kind_; }
    std::size_t n() const noexcept { return n_; }
    /// Cardinality bound; equals n for FreeBox.
    std::size_t k() const noexcept { return k_; }

    bool is_cardinality() const noexcept { return kind_ != ZKind::FreeBox; }

    /// Membership of an exactly binary vector.
    bool contains(const BinaryVector& z) const {
        if (z.size() != n_) throw DimensionError("ZFamily::contains: dimension mismatch");
        const auto ones = static_cast<std::size_t>(std::count(z.begin(), z.end(), std::uint8_t{1}));
        switch (kind_) {
            case ZKind::FreeBox: return true;
            case ZKind::CardinalityLE: return ones <= k_;
            case ZKind::CardinalityEQ: return ones == k_;
        }
        return false;
    }

    /// Membership in conv(Z): the box plus the cardinality row, within tol.
    bool hull_contains(const Vector& z, double tol) const {
        if (z.size() != n_) throw DimensionError("ZFamily::hull_contains: dimension mismatch");
        for (double zi : z)
            if (zi < -tol || zi > 1.0 + tol) return false;
        const double sum = std::accumulate(z.begin(), z.end(), 0.0);
        const double kk = static_cast<double>(k_);
        switch (kind_) {
            case ZKind::FreeBox: return true;
            case ZKind::CardinalityLE: return sum <= kk + tol * static_cast<double>(n_ + 1);
            case ZKind::CardinalityEQ: return std::abs(sum - kk) <= tol * static_cast<double>(n_ + 1);
        }
        return false;
    }

    /// Number of members: 2^n, sum_{j<=k} C(n,j) or C(n,k).
    std::uint64_t count() const {
        auto binom = [](std::size_t n, std::size_t r) {
            std::uint64_t v = 1;
            for (std::size_t i = 1; i <= r; ++i) v = v * (n - r + i) / i;
            return v;
        };
        switch (kind_) {
            case ZKind::FreeBox: return std::uint64_t{1} << n_;
            case ZKind::CardinalityLE: {
                std::uint64_t total = 0;
                for (std::size_t j = 0; j <= k_; ++j) total += binom(n_, j);
                return total;
            }
            case ZKind::CardinalityEQ: return binom(n_, k_);
        }
        return 0;
    }

    friend bool operator==(const ZFamily&, const ZFamily&) = default;

private:
    ZFamily(ZKind kind, std::size_t n, std::size_t k) : kind_(kind), n_(n), k_(k) {
        if (n == 0) throw DomainError("ZFamily: n must be positive");
        if (kind != ZKind::FreeBox && (k < 1 || k > n))
            throw DomainError("ZFamily: cardinality k must satisfy 1 <= k <= n");
    }

    ZKind kind_;
    std::size_t n_;
    std::size_t k_;
};

/// A candidate (x, z). Entries are finite; z is clamped into [0, 1] when it
/// lies within `clamp_tol` of the box and rejected otherwise.
class MixedPoint {
public:
    MixedPoint(Vector x, Vector z, double clamp_tol = 1e-9) : x_(std::move(x)), z_(std::move(z)) {
        if (x_.size() != z_.size()) throw DimensionError("MixedPoint: |x| != |z|");
        for (double v : x_)
            if (!std::isfinite(v)) throw DomainError("MixedPoint: non-finite x entry");
        for (double& v : z_) {
            if (!std::isfinite(v)) throw DomainError("MixedPoint: non-finite z entry");
            if (v < -clamp_tol || v > 1.0 + clamp_tol) throw DomainError("MixedPoint: z entry outside [0,1]");
            v = std::clamp(v, 0.0, 1.0);
        }
    }

    const Vector& x() const noexcept { return x_; }
    const Vector& z() const noexcept { return z_; }
    std::size_t size() const noexcept { return x_.size(); }

private:
    Vector x_;
    Vector z_;
};

/// min a'x + c'z over X.
struct ProblemInstance {
    Vector a;
    Vector c;
    ZFamily zfam;

    ProblemInstance(Vector a_, Vector c_, ZFamily zfam_)
        : a(std::move(a_)), c(std::move(c_)), zfam(zfam_) {
        if (a.size() != zfam.n() || c.size() != zfam.n())
            throw DimensionError("ProblemInstance: |a|, |c| and n must agree");
        for (double v : a)
            if (!std::isfinite(v)) throw DomainError("ProblemInstance: non-finite a entry");
        for (double v : c)
            if (!std::isfinite(v)) throw DomainError("ProblemInstance: non-finite c entry");
    }

    std::size_t n() const noexcept { return zfam.n(); }
};

inline double dot(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw DimensionError("dot: dimension mismatch");
    return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
}

inline double squared_norm(const Vector& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

/// Rounds z to a binary vector when every entry is within tol of {0,1}.
inline bool round_binary(const Vector& z, double tol, BinaryVector& out) {
    out.assign(z.size(), 0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (std::abs(z[i]) <= tol) out[i] = 0;
        else if (std::abs(z[i] - 1.0) <= tol) out[i] = 1;
        else return false;
    }
    return true;
}

inline Vector to_real(const BinaryVector& z) { return Vector(z.begin(), z.end()); }

inline IndexSet support_of(const BinaryVector& z) {
    IndexSet s;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i]) s.push_back(i);
    return s;
}

inline BinaryVector indicator_of(const IndexSet& s, std::size_t n) {
    BinaryVector z(n, 0);
    for (std::size_t i : s) {
        if (i >= n) throw DomainError("index " + std::to_string(i) + " out of range for n=" + std::to_string(n));
        z[i] = 1;
    }
    return z;
}

/// Sorts and checks an index set against dimension n.
inline IndexSet normalize_index_set(IndexSet s, std::size_t n) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!s.empty() && s.back() >= n)
        throw DomainError("index " + std::to_string(s.back()) + " out of range for n=" + std::to_string(n));
    return s;
}

/// (x, z) in X: unit ball, binary z in Z, and x o (1 - z) = 0, all within feas_abs.
inline bool is_in_X(const MixedPoint& p, const ZFamily& zfam, const Tolerance& tol = {}) {
    if (p.size() != zfam.n()) throw DimensionError("is_in_X: dimension mismatch");
    if (squared_norm(p.x()) > 1.0 + tol.feas_abs) return false;
    BinaryVector zb;
    if (!round_binary(p.z(), tol.feas_abs, zb)) return false;
    if (!zfam.contains(zb)) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (std::abs(p.x()[i] * (1.0 - p.z()[i])) > tol.feas_abs) return false;
    return true;
}

/// |x_i| <= z_i for all i, within feas_abs.
inline bool satisfies_bigM(const MixedPoint& p, const Tolerance& tol = {}) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (std::abs(p.x()[i]) > p.z()[i] + tol.feas_abs) return false;
    return true;
}

inline constexpr std::size_t kMaxEnumerationDim = 24;

/// Members of Z in lexicographic order (coordinate 0 most significant).
inline std::vector<BinaryVector> enumerate_Z(const ZFamily& zfam) {
    const std::size_t n = zfam.n();
    if (n > kMaxEnumerationDim)
        throw DimensionError("enumerate_Z: n=" + std::to_string(n) + " exceeds the guard of " +
                             std::to_string(kMaxEnumerationDim));
    std::vector<BinaryVector> out;
    out.reserve(static_cast<std::size_t>(zfam.count()));
    BinaryVector z(n, 0);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1U);
        if (zfam.contains(z)) out.push_back(z);
    }
    return out;
}

}  // namespace persp
