#pragma once
// Dense symmetric kernels. Solving and inertia go through an own
// Bunch-Kaufman LDL^T (1x1/2x2 pivots) because the vertex matrices of signed
// strength profiles are genuinely indefinite; eigenvalue decompositions are
// Eigen facades behind residual contracts. Desk-scale sizes, dense storage.
//
// Note on inertia tolerances: counts are taken from the signs of the pivot
// blocks (Sylvester), with |pivot eigenvalue| <= zero_tol counted as zero.
// Pivot magnitudes are not matrix eigenvalues, so within a band of order
// zero_tol around a singular matrix the counts may differ from eigenvalue
// counts; every caller in this library treats that band as borderline.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qgt/errors.hpp"

namespace qgt {

// ===== SymMatrix ============================================================

/// Dense symmetric matrix with full square storage and symmetric writes.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }
    void add(std::size_t i, std::size_t j, double v) {
        a_[i * n_ + j] += v;
        if (i != j) a_[j * n_ + i] += v;
    }

    /// Matrix infinity norm (largest absolute row sum).
    double inf_norm() const {
        double best = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n_; ++j) row += std::abs((*this)(i, j));
            best = std::max(best, row);
        }
        return best;
    }

    Eigen::MatrixXd to_eigen() const {
        Eigen::MatrixXd m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

inline SymMatrix diagonal_matrix(const std::vector<double>& d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
}

struct Inertia {
    std::size_t n_negative = 0;
    std::size_t n_zero = 0;
    std::size_t n_positive = 0;

    friend bool operator==(const Inertia&, const Inertia&) = default;
};

// ===== Bunch-Kaufman LDL^T ==================================================

namespace detail {

/// P A P^T = L D L^T with unit lower L and block diagonal D (1x1/2x2).
struct Ldlt {
    std::size_t n = 0;
    std::vector<double> w;              // working storage, holds L and D
    std::vector<std::size_t> perm;      // factor row i corresponds to input row perm[i]
    std::vector<std::uint8_t> block2;   // block2[k] != 0: k starts a 2x2 pivot
    double scale = 0.0;                 // inf norm of the input

    double at(std::size_t i, std::size_t j) const { return w[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return w[i * n + j]; }
};

inline Ldlt factor_sym(const SymMatrix& a) {
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
    Ldlt f;
    f.n = a.size();
    f.w.resize(f.n * f.n);
    f.perm.resize(f.n);
    f.block2.assign(f.n, 0);
    f.scale = a.inf_norm();
    for (std::size_t i = 0; i < f.n; ++i) {
        f.perm[i] = i;
        for (std::size_t j = 0; j < f.n; ++j) f.at(i, j) = a(i, j);
    }
    const std::size_t n = f.n;
    const double column_floor =
        f.scale * std::numeric_limits<double>::epsilon() * static_cast<double>(n ? n : 1);

    auto swap_rows_cols = [&](std::size_t s, std::size_t t) {
        if (s == t) return;
        for (std::size_t j = 0; j < n; ++j) std::swap(f.at(s, j), f.at(t, j));
        for (std::size_t i = 0; i < n; ++i) std::swap(f.at(i, s), f.at(i, t));
        std::swap(f.perm[s], f.perm[t]);
    };

    std::size_t k = 0;
    while (k < n) {
        // largest subdiagonal entry of column k
        double lambda = 0.0;
        std::size_t r = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::abs(f.at(i, k));
            if (v > lambda) { lambda = v; r = i; }
        }
        const double akk = std::abs(f.at(k, k));

        if (std::max(akk, lambda) <= column_floor) {
            // column is negligible: zero pivot, nothing to eliminate
            k += 1;
            continue;
        }

        bool two_by_two = false;
        if (akk >= alpha * lambda) {
            // 1x1 pivot at k
        } else {
            double sigma = 0.0;
            for (std::size_t i = k; i < n; ++i) {
                if (i == r) continue;
                sigma = std::max(sigma, std::abs(f.at(i, r)));
            }
            if (akk * sigma >= alpha * lambda * lambda) {
                // 1x1 pivot at k
            } else if (std::abs(f.at(r, r)) >= alpha * sigma) {
                swap_rows_cols(k, r);  // 1x1 pivot with the dominant diagonal
            } else {
                swap_rows_cols(k + 1, r);
                two_by_two = true;
            }
        }

        if (!two_by_two) {
            const double d = f.at(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double li = f.at(i, k) / d;
                for (std::size_t j = k + 1; j <= i; ++j) {
                    const double upd = li * f.at(j, k);
                    f.at(i, j) -= upd;
                    if (i != j) f.at(j, i) -= upd;
                }
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double li = f.at(i, k) / d;
                f.at(i, k) = li;
                f.at(k, i) = li;
            }
            k += 1;
        } else {
            const double p = f.at(k, k), q = f.at(k + 1, k), s = f.at(k + 1, k + 1);
            const double det = p * s - q * q;
            const double i11 = s / det, i12 = -q / det, i22 = p / det;
            std::vector<double> u(n, 0.0), v(n, 0.0), l1(n, 0.0), l2(n, 0.0);
            for (std::size_t i = k + 2; i < n; ++i) {
                u[i] = f.at(i, k);
                v[i] = f.at(i, k + 1);
                l1[i] = u[i] * i11 + v[i] * i12;
                l2[i] = u[i] * i12 + v[i] * i22;
            }
            for (std::size_t i = k + 2; i < n; ++i)
                for (std::size_t j = k + 2; j <= i; ++j) {
                    const double upd = l1[i] * u[j] + l2[i] * v[j];
                    f.at(i, j) -= upd;
                    if (i != j) f.at(j, i) -= upd;
                }
            for (std::size_t i = k + 2; i < n; ++i) {
                f.at(i, k) = l1[i];
                f.at(k, i) = l1[i];
                f.at(i, k + 1) = l2[i];
                f.at(k + 1, i) = l2[i];
            }
            f.block2[k] = 1;
            k += 2;
        }
    }
    return f;
}

/// Solve using an existing factorization. pivot_tol guards the divisions.
inline std::vector<double> ldlt_solve(const Ldlt& f, const std::vector<double>& rhs,
                                      double pivot_tol) {
    const std::size_t n = f.n;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rhs[f.perm[i]];

    // forward: L z = P b
    for (std::size_t k = 0; k < n;) {
        const std::size_t kb = f.block2[k] ? 2 : 1;
        for (std::size_t i = k + kb; i < n; ++i) {
            double acc = f.at(i, k) * y[k];
            if (kb == 2) acc += f.at(i, k + 1) * y[k + 1];
            y[i] -= acc;
        }
        k += kb;
    }
    // block diagonal
    for (std::size_t k = 0; k < n;) {
        if (!f.block2[k]) {
            const double d = f.at(k, k);
            if (std::abs(d) <= pivot_tol) throw SingularMatrix("pivot below tolerance");
            y[k] /= d;
            k += 1;
        } else {
            const double p = f.at(k, k), q = f.at(k + 1, k), s = f.at(k + 1, k + 1);
            const double det = p * s - q * q;
            if (std::abs(det) <= pivot_tol * std::max({std::abs(p), std::abs(q), std::abs(s), 1.0}))
                throw SingularMatrix("2x2 pivot block below tolerance");
            const double b0 = y[k], b1 = y[k + 1];
            y[k] = (s * b0 - q * b1) / det;
            y[k + 1] = (p * b1 - q * b0) / det;
            k += 2;
        }
    }
    // backward: L^T w = z
    for (std::size_t kk = n; kk > 0;) {
        const std::size_t k = kk - 1;
        const std::size_t kstart = (k > 0 && f.block2[k - 1]) ? k - 1 : k;
        const std::size_t kb = f.block2[kstart] ? 2 : 1;
        for (std::size_t c = kstart; c < kstart + kb; ++c) {
            double acc = 0.0;
            for (std::size_t i = kstart + kb; i < n; ++i) acc += f.at(i, c) * y[i];
            y[c] -= acc;
        }
        kk = kstart;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[f.perm[i]] = y[i];
    return x;
}

}  // namespace detail

// ===== public kernels =======================================================

/// Solve a x = rhs for symmetric (possibly indefinite) a. One step of
/// iterative refinement keeps the residual comfortably inside the contract
/// |a x - rhs|_inf <= 1e-10 (1 + |rhs|_inf) n.
inline std::vector<double> solve_sym(const SymMatrix& a, const std::vector<double>& rhs) {
    if (a.size() != rhs.size()) throw Error("solve_sym: size mismatch");
    if (a.size() == 0) return {};
    auto f = detail::factor_sym(a);
    if (f.scale == 0.0) throw SingularMatrix("zero matrix");
    const double pivot_tol = 1e-12 * f.scale;
    auto x = detail::ldlt_solve(f, rhs, pivot_tol);
    // one refinement step
    const std::size_t n = a.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = rhs[i];
        for (std::size_t j = 0; j < n; ++j) acc -= a(i, j) * x[j];
        r[i] = acc;
    }
    auto dx = detail::ldlt_solve(f, r, pivot_tol);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
    return x;
}

/// Signs of the spectrum by Sylvester's law applied to the pivot blocks.
/// zero_tol < 0 selects the default 1e-10 |a|_inf.
inline Inertia inertia(const SymMatrix& a, double zero_tol = -1.0) {
    auto f = detail::factor_sym(a);
    if (zero_tol < 0.0) zero_tol = 1e-10 * f.scale;
    Inertia out;
    auto classify = [&](double ev) {
        if (ev < -zero_tol) ++out.n_negative;
        else if (ev > zero_tol) ++out.n_positive;
        else ++out.n_zero;
    };
    for (std::size_t k = 0; k < f.n;) {
        if (!f.block2[k]) {
            classify(f.at(k, k));
            k += 1;
        } else {
            const double p = f.at(k, k), q = f.at(k + 1, k), s = f.at(k + 1, k + 1);
            const double mid = 0.5 * (p + s);
            const double rad = std::sqrt(0.25 * (p - s) * (p - s) + q * q);
            classify(mid - rad);
            classify(mid + rad);
            k += 2;
        }
    }
    return out;
}

/// Eigendecomposition of a symmetric matrix; values ascending.
struct SymEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // vectors[j] pairs with values[j]
};

inline SymEigen eig_sym(const SymMatrix& a) {
    SymEigen out;
    if (a.size() == 0) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_eigen());
    if (es.info() != Eigen::Success) throw NoConvergence("eig_sym failed to converge");
    const std::size_t n = a.size();
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = es.eigenvalues()(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < n; ++i)
            out.vectors[j][i] = es.eigenvectors()(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j));
    }
    return out;
}

/// Smallest p eigenpairs of k v = lambda m v with m positive definite.
/// Vectors are m-orthonormal.
inline SymEigen eig_gen_sym(const SymMatrix& k, const SymMatrix& m, std::size_t p) {
    if (k.size() != m.size()) throw Error("eig_gen_sym: size mismatch");
    SymEigen out;
    if (k.size() == 0) return out;
    Eigen::MatrixXd me = m.to_eigen();
    Eigen::LLT<Eigen::MatrixXd> llt(me);
    if (llt.info() != Eigen::Success)
        throw MassNotPositiveDefinite("mass matrix is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        k.to_eigen(), me, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw NoConvergence("eig_gen_sym failed to converge");
    const std::size_t n = k.size();
    const std::size_t take = std::min(p, n);
    out.values.resize(take);
    out.vectors.assign(take, std::vector<double>(n));
    for (std::size_t j = 0; j < take; ++j) {
        out.values[j] = es.eigenvalues()(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < n; ++i)
            out.vectors[j][i] = es.eigenvectors()(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j));
    }
    return out;
}

/// Bisection on a bracket with a sign change. Shrinks to width <= xtol and
/// returns the midpoint; exact zeros at probes are returned immediately.
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double xtol) {
    if (!(lo < hi)) throw Error("bisect_root: empty bracket");
    double fl = f(lo), fh = f(hi);
    if (fl == 0.0) return lo;
    if (fh == 0.0) return hi;
    if (!(fl * fh < 0.0)) throw NoSignChange("bisect_root: no sign change over bracket");
    for (int iter = 0; iter < 200 && (hi - lo) > xtol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fl * fm < 0.0) { hi = mid; fh = fm; }
        else { lo = mid; fl = fm; }
    }
    return 0.5 * (lo + hi);
}

}  // namespace qgt
