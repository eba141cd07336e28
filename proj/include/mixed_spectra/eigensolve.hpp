// Smallest eigenpairs of K u = lambda M u: dense generalized solver for small
// systems, shift-invert Lanczos with locking for large ones.
#pragma once

#include "fem.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mixed_spectra {

enum class SolverMethod { Auto, Dense, Iterative };

struct SolverOptions {
    int k = 4;
    double tol = 1e-9;              // relative residual per pair
    std::optional<double> shift;    // iterative path; defaults to -1
    SolverMethod method = SolverMethod::Auto;
    int dense_threshold = 500;      // dense generalized solve is O(n^3); ~14 s at n = 2000 on one core
    int subspace = 0;               // 0 picks max(2k + 20, 40)
    int max_restarts = 200;
    double inner_tol = 1e-12;
    int max_inner_iterations = 20000;
    unsigned seed = 20240611u;
};

struct EigenResult {
    std::vector<double> eigenvalues;
    MatX vectors; // n x k, M-orthonormal columns
    std::vector<double> residuals;
    std::vector<bool> possibly_multiple; // gap to the next value < 1e-6 |lambda|
    int iterations = 0;                  // outer restarts (dense: 0)
    long inner_iterations = 0;           // total CG iterations
    std::string solver;                  // "dense-fallback" or "iterative"
    double shift = 0.0;
    bool converged = true;
    bool zero_mean_flag = false;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, EigenResult partial, double achieved)
        : Error("NoConvergence: " + what), partial_(std::move(partial)), achieved_(achieved) {}
    const EigenResult& partial() const { return partial_; }
    double achieved_residual() const { return achieved_; }

private:
    EigenResult partial_;
    double achieved_;
};

inline double relative_residual(const SparseMatrix& K, const SparseMatrix& M, const VecX& u, double lambda) {
    const VecX mu = M * u;
    return (K * u - lambda * mu).norm() / mu.norm() / std::max(1.0, std::abs(lambda));
}

namespace detail {

inline void finish(EigenResult& r, const SparseMatrix& K, const SparseMatrix& M) {
    r.residuals.resize(r.eigenvalues.size());
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
        r.residuals[i] = relative_residual(K, M, r.vectors.col(static_cast<Eigen::Index>(i)), r.eigenvalues[i]);
    r.possibly_multiple.assign(r.eigenvalues.size(), false);
    for (std::size_t i = 0; i + 1 < r.eigenvalues.size(); ++i) {
        const double gap = r.eigenvalues[i + 1] - r.eigenvalues[i];
        if (gap < 1e-6 * std::max(std::abs(r.eigenvalues[i]), 1e-300)) {
            r.possibly_multiple[i] = true;
            r.possibly_multiple[i + 1] = true;
        }
    }
}

inline EigenResult dense_solve(const SparseMatrix& K, const SparseMatrix& M, int k) {
    const MatX kd = MatX(K), md = MatX(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatX> es(0.5 * (kd + kd.transpose()), 0.5 * (md + md.transpose()),
                                                      Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw Error("dense generalized eigensolver failed");
    EigenResult r;
    r.solver = "dense-fallback";
    for (int i = 0; i < k; ++i) r.eigenvalues.push_back(es.eigenvalues()(i));
    r.vectors = es.eigenvectors().leftCols(k);
    return r;
}

/// Jacobi-preconditioned CG for the SPD operator K - shift*M.
class ShiftedSolver {
public:
    ShiftedSolver(const SparseMatrix& K, const SparseMatrix& M, double shift, double tol, int max_it)
        : a_(K - shift * M), tol_(tol), max_it_(max_it) {
        diag_inv_ = a_.diagonal();
        for (Eigen::Index i = 0; i < diag_inv_.size(); ++i) {
            if (!(diag_inv_(i) > 0.0)) throw SingularShift("non-positive diagonal in shifted operator");
            diag_inv_(i) = 1.0 / diag_inv_(i);
        }
    }

    VecX solve(const VecX& b, long& iterations) const {
        VecX x = VecX::Zero(b.size());
        VecX r = b;
        const double bnorm = b.norm();
        if (bnorm == 0.0) return x;
        VecX z = diag_inv_.cwiseProduct(r);
        VecX p = z;
        double rz = r.dot(z);
        for (int it = 0; it < max_it_; ++it) {
            const VecX ap = a_ * p;
            const double pap = p.dot(ap);
            if (!(pap > 0.0)) throw SingularShift("shifted operator is not positive definite");
            const double alpha = rz / pap;
            x += alpha * p;
            r -= alpha * ap;
            ++iterations;
            if (r.norm() <= tol_ * bnorm) return x;
            z = diag_inv_.cwiseProduct(r);
            const double rz_new = r.dot(z);
            p = z + (rz_new / rz) * p;
            rz = rz_new;
        }
        return x; // accuracy is judged by the outer residual test
    }

private:
    SparseMatrix a_;
    VecX diag_inv_;
    double tol_;
    int max_it_;
};

/// Restarted shift-invert Lanczos in the M inner product. The basis and its
/// operator images are kept explicitly and Rayleigh-Ritz runs on Q^T M (Op Q).
/// Converged pairs are locked and deflated. Once k are locked, fresh random
/// starts on the deflated problem confirm that nothing below the k-th value
/// was missed.
inline EigenResult lanczos_solve(const SparseMatrix& K, const SparseMatrix& M, int k, double shift,
                                 const SolverOptions& opt) {
    const Eigen::Index n = K.rows();
    const ShiftedSolver inner(K, M, shift, opt.inner_tol, opt.max_inner_iterations);
    const int msub = static_cast<int>(
        std::min<Eigen::Index>(n, opt.subspace > 0 ? opt.subspace : std::max(2 * k + 20, 40)));
    EigenResult res;
    res.solver = "iterative";
    res.shift = shift;

    std::vector<VecX> locked, locked_m;
    std::vector<double> locked_vals;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    auto random_vector = [&]() {
        VecX v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
        return v;
    };
    auto op = [&](const VecX& v) { return inner.solve(M * v, res.inner_iterations); };

    std::vector<VecX> q, mq, w; // basis, M * basis, Op * basis
    auto push = [&](VecX v) -> bool {
        const double before = std::sqrt(std::max(v.dot(M * v), 0.0));
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < locked.size(); ++j) v -= locked_m[j].dot(v) * locked[j];
            for (std::size_t j = 0; j < q.size(); ++j) v -= mq[j].dot(v) * q[j];
        }
        VecX mv = M * v;
        const double nrm = std::sqrt(std::max(v.dot(mv), 0.0));
        if (!(nrm > 1e-10 * before)) return false;
        v /= nrm;
        mv /= nrm;
        w.push_back(op(v));
        q.push_back(std::move(v));
        mq.push_back(std::move(mv));
        return true;
    };

    double worst = 0.0;
    int cycles = 0;
    // Locks `wanted` further pairs of the deflated problem starting from `start`.
    auto run = [&](VecX start, int wanted) -> int {
        q.clear();
        mq.clear();
        w.clear();
        VecX next = std::move(start);
        int got = 0;
        while (got < wanted && cycles < opt.max_restarts) {
            ++cycles;
            const Eigen::Index room = n - static_cast<Eigen::Index>(locked.size());
            if (room <= 0) break;
            const int target = static_cast<int>(std::min<Eigen::Index>(msub, room));
            while (static_cast<int>(q.size()) < target) {
                if (push(next)) {
                    next = w.back();
                    continue;
                }
                next = random_vector();
                if (!push(next)) break;
                next = w.back();
            }
            const int s = static_cast<int>(q.size());
            if (s == 0) break;
            MatX h(s, s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) h(i, j) = mq[i].dot(w[j]);
            Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (h + h.transpose()));
            const int want = wanted - got;
            const int keep = want + 10;
            std::vector<VecX> kq, kmq, kw;
            worst = 0.0;
            for (int idx = 0; idx < s; ++idx) {
                const int c = s - 1 - idx; // descending theta is ascending lambda
                const double theta = es.eigenvalues()(c);
                if (!(theta > 0.0)) break;
                const VecX y = es.eigenvectors().col(c);
                VecX x = VecX::Zero(n), mx = VecX::Zero(n), wx = VecX::Zero(n);
                for (int j = 0; j < s; ++j) {
                    x += y(j) * q[j];
                    mx += y(j) * mq[j];
                    wx += y(j) * w[j];
                }
                const double lambda = shift + 1.0 / theta;
                if (idx < want && got < wanted) {
                    const double rr = (K * x - lambda * mx).norm() / mx.norm() / std::max(1.0, std::abs(lambda));
                    if (rr <= opt.tol || s == room) {
                        locked.push_back(std::move(x));
                        locked_m.push_back(std::move(mx));
                        locked_vals.push_back(lambda);
                        ++got;
                        continue;
                    }
                    worst = std::max(worst, rr);
                }
                if (static_cast<int>(kq.size()) < keep) {
                    kq.push_back(std::move(x));
                    kmq.push_back(std::move(mx));
                    kw.push_back(std::move(wx));
                }
            }
            // Ritz vectors are M-orthonormal and M-orthogonal to the pairs just
            // locked, so the kept block needs no re-orthogonalization.
            q = std::move(kq);
            mq = std::move(kmq);
            w = std::move(kw);
            next = q.empty() ? random_vector() : VecX(w.front());
            if (s == room) break;
        }
        return got;
    };

    run(random_vector(), k);
    for (int check = 0; check < 8 && static_cast<int>(locked.size()) >= k; ++check) {
        if (static_cast<Eigen::Index>(locked.size()) >= n) break;
        std::vector<double> sorted = locked_vals;
        std::sort(sorted.begin(), sorted.end());
        const double kth = sorted[k - 1];
        if (run(random_vector(), 1) == 0) break;
        if (locked_vals.back() >= kth * (1.0 - 1e-12)) break;
    }

    std::vector<int> idx(locked.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });
    const int got = std::min<int>(k, static_cast<int>(idx.size()));
    res.iterations = cycles;
    res.vectors = MatX(n, got);
    for (int i = 0; i < got; ++i) {
        res.eigenvalues.push_back(locked_vals[idx[i]]);
        res.vectors.col(i) = locked[idx[i]];
    }
    if (got < k) {
        res.converged = false;
        finish(res, K, M);
        throw NoConvergence("only " + std::to_string(got) + " of " + std::to_string(k) + " pairs converged", res,
                            worst);
    }
    return res;
}

} // namespace detail

/// The k smallest eigenpairs (k is capped at n). Shift defaults to -1, which
/// is below the spectrum whenever the potential is nonnegative; callers pass
/// inf V - 1.
inline EigenResult smallest_eigenpairs(const SparseMatrix& K, const SparseMatrix& M, const SolverOptions& opt = {}) {
    const int n = static_cast<int>(K.rows());
    const int k = std::min(opt.k, n);
    if (k <= 0) throw Error("empty eigenproblem");
    const bool dense = opt.method == SolverMethod::Dense || (opt.method == SolverMethod::Auto && n <= opt.dense_threshold);
    EigenResult r;
    if (dense) {
        r = detail::dense_solve(K, M, k);
    } else {
        const double base = opt.shift.value_or(-1.0);
        double offset = 1.0;
        for (int attempt = 0;; ++attempt) {
            try {
                r = detail::lanczos_solve(K, M, k, base + 1.0 - offset, opt);
                break;
            } catch (const SingularShift&) {
                if (attempt >= 3) throw;
                offset *= 10.0;
            }
        }
    }
    detail::finish(r, K, M);
    return r;
}

/// Scales the first eigenvector so that its mean is positive. A mean below
/// 1e-12 of the mean absolute entry leaves it unchanged and sets the flag.
inline EigenResult first_eigenvector_sign_fix(EigenResult r) {
    if (r.vectors.cols() == 0) return r;
    const double mean = r.vectors.col(0).mean();
    const double scale = r.vectors.col(0).cwiseAbs().mean();
    if (!(std::abs(mean) > 1e-12 * scale)) {
        r.zero_mean_flag = true;
        return r;
    }
    if (mean < 0.0) r.vectors.col(0) *= -1.0;
    return r;
}

} // namespace mixed_spectra
