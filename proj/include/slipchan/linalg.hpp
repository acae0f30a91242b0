#pragma once

/// @file linalg.hpp
/// @brief Matrix-free conjugate gradients and a small dense symmetric
/// eigensolver. The CG works on raw vectors; operators are callables
/// y = A(x). Constrained DOFs are handled by keeping them at zero in x, b
/// and in the operator output, which makes the constrained subspace
/// invariant under the iteration.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace slipchan {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradients for SPD operators.
///  apply      : y = A x (y pre-sized, overwritten)
///  diag       : Jacobi preconditioner diagonal (empty = identity); entries
///               <= 0 are treated as 1 (constrained slots)
///  post       : optional projection applied to b, x and residuals (used to
///               remove the constant nullspace of the Neumann Poisson solve)
inline CgResult cg_solve(const std::function<void(const Vec&, Vec&)>& apply,
                         const Vec& diag, const Vec& b_in, Vec& x,
                         double tol_rel, int max_iter,
                         const std::function<void(Vec&)>& post = {}) {
    const std::size_t n = b_in.size();
    Vec b = b_in;
    if (post) post(b);
    Vec r(n), z(n), p(n), Ap(n);

    auto precond = [&](const Vec& rr, Vec& zz) {
        if (diag.empty()) {
            zz = rr;
            return;
        }
        for (std::size_t i = 0; i < n; ++i)
            zz[i] = rr[i] / (diag[i] > 0.0 ? diag[i] : 1.0);
    };

    if (x.size() != n) x.assign(n, 0.0);
    if (post) post(x);
    apply(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    if (post) post(r);

    const double bnorm = norm2(b);
    CgResult res;
    if (bnorm == 0.0) {
        x.assign(n, 0.0);
        res.converged = true;
        return res;
    }

    precond(r, z);
    p = z;
    double rz = dot(r, z);
    double rnorm = norm2(r);

    for (int it = 0; it < max_iter; ++it) {
        if (rnorm <= tol_rel * bnorm) {
            res.converged = true;
            break;
        }
        apply(p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) {
            // operator not SPD on this subspace (or exact zero direction)
            break;
        }
        const double a = rz / pAp;
        axpy(a, p, x);
        axpy(-a, Ap, r);
        if (post) post(r);
        precond(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rnorm = norm2(r);
        res.iterations = it + 1;
    }
    if (rnorm <= tol_rel * bnorm) res.converged = true;
    res.rel_residual = rnorm / bnorm;
    return res;
}

/// Cyclic Jacobi eigensolver for small dense symmetric matrices (row-major).
/// Returns eigenvalues ascending; V columns are the corresponding vectors.
inline void jacobi_eigen(std::vector<double> A, int n, std::vector<double>& evals,
                         std::vector<double>& V) {
    V.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto at = [&](std::vector<double>& M, int i, int j) -> double& {
        return M[static_cast<std::size_t>(i) * n + j];
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(A, i, j) * at(A, i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(A, p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(A, q, q) - at(A, p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(A, k, p), akq = at(A, k, q);
                    at(A, k, p) = c * akp - s * akq;
                    at(A, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(A, p, k), aqk = at(A, q, k);
                    at(A, p, k) = c * apk - s * aqk;
                    at(A, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = at(V, k, p), vkq = at(V, k, q);
                    at(V, k, p) = c * vkp - s * vkq;
                    at(V, k, q) = s * vkp + c * vkq;
                }
            }
    }
    evals.resize(n);
    for (int i = 0; i < n; ++i) evals[i] = A[static_cast<std::size_t>(i) * n + i];
    // sort ascending, permuting V columns
    for (int i = 0; i < n; ++i) {
        int m = i;
        for (int j = i + 1; j < n; ++j)
            if (evals[j] < evals[m]) m = j;
        if (m != i) {
            std::swap(evals[i], evals[m]);
            for (int k = 0; k < n; ++k)
                std::swap(V[static_cast<std::size_t>(k) * n + i],
                          V[static_cast<std::size_t>(k) * n + m]);
        }
    }
}

} // namespace slipchan
