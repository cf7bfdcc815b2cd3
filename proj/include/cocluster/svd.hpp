#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "cocluster/sparse_matrix.hpp"

namespace cocluster {

struct SvdConfig {
    std::size_t max_iterations = 300;  // Lanczos bidiagonalization steps
    double tolerance = 1e-8;           // residual bound relative to sigma_1
    bool reorthogonalize = true;       // full reorthogonalization of the bases
    std::uint64_t seed = 1;            // start-vector randomization

    void validate() const {
        if (!(tolerance > 0.0)) throw std::invalid_argument("SvdConfig: tolerance must be > 0");
        if (max_iterations < 1) throw std::invalid_argument("SvdConfig: max_iterations must be >= 1");
    }
};

struct SvdTriplet {
    double sigma = 0.0;
    std::vector<double> u;  // unit left singular vector
    std::vector<double> v;  // unit right singular vector
};

/// Thrown when the Lanczos process exhausts its iteration budget before the
/// requested triplets meet the residual bound. Carries the best residual so
/// the caller can retry with a larger budget.
class svd_convergence_error : public std::runtime_error {
  public:
    svd_convergence_error(const std::string& what, double residual)
        : std::runtime_error(what), best_residual(residual) {}
    double best_residual;
};

template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.rows() } -> std::convertible_to<std::size_t>;
    { op.cols() } -> std::convertible_to<std::size_t>;
    op.apply(x, y);            // y = A x
    op.apply_transpose(x, y);  // y = A' x
};

/// Adapts a SparseMatrix to the operator interface used by the Lanczos engine.
struct SparseOperator {
    const SparseMatrix& a;
    std::size_t rows() const { return a.n_rows; }
    std::size_t cols() const { return a.n_cols; }
    void apply(std::span<const double> x, std::span<double> y) const {
        auto r = spmv(a, x);
        std::copy(r.begin(), r.end(), y.begin());
    }
    void apply_transpose(std::span<const double> x, std::span<double> y) const {
        auto r = spmv_transpose(a, x);
        std::copy(r.begin(), r.end(), y.begin());
    }
};

/// A known singular pair projected out of the Krylov bases, so the engine
/// computes the spectrum of the remaining subspace.
struct DeflationPair {
    std::vector<double> u;
    std::vector<double> v;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double nrm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scal(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

/// Cyclic Jacobi eigendecomposition of a dense symmetric matrix (row-major).
/// Returns eigenvalues descending; vectors[r * n + c] is component r of the
/// eigenvector belonging to eigenvalues[c].
struct EighResult {
    std::vector<double> eigenvalues;
    std::vector<double> vectors;
};

inline EighResult jacobi_eigh(std::vector<double> a, std::size_t n) {
    std::vector<double> vec(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vec[i * n + i] = 1.0;

    double frob2 = 0.0;
    for (double x : a) frob2 += x * x;
    const double stop = frob2 * 1e-30;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
        if (off <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i * n + p];
                    const double aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p * n + i];
                    const double aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = vec[i * n + p];
                    const double viq = vec[i * n + q];
                    vec[i * n + p] = c * vip - s * viq;
                    vec[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });

    EighResult res;
    res.eigenvalues.resize(n);
    res.vectors.assign(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        res.eigenvalues[c] = a[order[c] * n + order[c]];
        for (std::size_t r = 0; r < n; ++r) res.vectors[r * n + c] = vec[r * n + order[c]];
    }
    return res;
}

/// SVD of a small square bidiagonal-ish dense matrix B (row-major s x s) via
/// the symmetric eigenproblem of [[0, B'], [B, 0]], whose eigenvalues are
/// +-sigma. Avoids forming B'B, which squares the condition number.
struct SmallSvd {
    std::vector<double> sigma;            // descending
    std::vector<std::vector<double>> p;   // left vectors of B
    std::vector<std::vector<double>> q;   // right vectors of B
};

inline SmallSvd small_svd(const std::vector<double>& b, std::size_t s, std::size_t want) {
    const std::size_t n = 2 * s;
    std::vector<double> m(n * n, 0.0);
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t c = 0; c < s; ++c) {
            m[(s + r) * n + c] = b[r * s + c];
            m[c * n + (s + r)] = b[r * s + c];
        }
    EighResult eig = jacobi_eigh(std::move(m), n);

    SmallSvd out;
    for (std::size_t e = 0; e < n && out.sigma.size() < want; ++e) {
        std::vector<double> qv(s), pv(s);
        for (std::size_t i = 0; i < s; ++i) qv[i] = eig.vectors[i * n + e];
        for (std::size_t i = 0; i < s; ++i) pv[i] = eig.vectors[(s + i) * n + e];
        const double nq = nrm2(qv), np = nrm2(pv);
        if (nq < 0.3 || np < 0.3) continue;  // mixed null-space vector
        scal(1.0 / nq, qv);
        scal(1.0 / np, pv);
        bool dup = false;  // the -sigma twin has a parallel q component
        for (const auto& prev : out.q)
            if (std::abs(dot(prev, qv)) > 0.5) { dup = true; break; }
        if (dup) continue;
        out.sigma.push_back(std::max(0.0, eig.eigenvalues[e]));
        out.q.push_back(std::move(qv));
        out.p.push_back(std::move(pv));
    }
    return out;
}

/// Subtract the projection of x onto each basis vector; two passes when full
/// reorthogonalization is requested.
inline void orthogonalize(std::span<double> x, const std::vector<std::vector<double>>& basis,
                          int passes) {
    for (int pass = 0; pass < passes; ++pass)
        for (const auto& b : basis) axpy(-dot(b, x), b, x);
}

inline bool random_orthonormal(std::vector<double>& out, std::size_t dim, std::mt19937_64& rng,
                               const std::vector<std::vector<double>>& basis) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        out.resize(dim);
        for (double& x : out) x = unif(rng);
        orthogonalize(out, basis, 2);
        const double n = nrm2(out);
        if (n > 1e-6 * std::sqrt(static_cast<double>(dim))) {
            scal(1.0 / n, out);
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Golub-Kahan-Lanczos bidiagonalization returning the k largest singular
/// triplets of the operator restricted to the complement of the deflated
/// pairs. Restarts with fresh random directions on breakdown, so disconnected
/// spectra and rank deficiency are handled.
template <LinearOperator Op>
std::vector<SvdTriplet> lanczos_svd(const Op& op, std::size_t k, const SvdConfig& cfg,
                                    std::span<const DeflationPair> deflation = {}) {
    cfg.validate();
    const std::size_t m = op.rows();
    const std::size_t n = op.cols();
    const std::size_t m_eff = m - std::min(m, deflation.size());
    const std::size_t n_eff = n - std::min(n, deflation.size());
    const std::size_t cap = std::min(m_eff, n_eff);
    if (k < 1 || k > cap)
        throw std::invalid_argument("lanczos_svd: k out of range for operator size");

    std::vector<std::vector<double>> def_u, def_v;
    for (const auto& d : deflation) {
        def_u.push_back(d.u);
        def_v.push_back(d.v);
    }
    // Bases including the deflated vectors, so one projection call covers both.
    std::vector<std::vector<double>> ubasis = def_u;
    std::vector<std::vector<double>> vbasis = def_v;
    const std::size_t u0 = def_u.size(), v0 = def_v.size();
    auto uvec = [&](std::size_t t) -> const std::vector<double>& { return ubasis[u0 + t]; };
    auto vvec = [&](std::size_t t) -> const std::vector<double>& { return vbasis[v0 + t]; };
    const int passes = cfg.reorthogonalize ? 2 : 1;

    std::mt19937_64 rng(cfg.seed);
    std::vector<double> start;
    if (!detail::random_orthonormal(start, n, rng, vbasis))
        throw svd_convergence_error("lanczos_svd: cannot build start vector", 0.0);
    vbasis.push_back(std::move(start));

    std::vector<double> alphas, betas;  // B diag / superdiag (restarts leave zeros)
    double scale = 0.0;
    bool exhausted = false;
    double best_residual = std::numeric_limits<double>::infinity();
    std::vector<SvdTriplet> best;

    const std::size_t step_limit = std::max<std::size_t>(cfg.max_iterations, k);

    for (std::size_t j = 0; j < step_limit && !exhausted; ++j) {
        // u_j from A v_j
        std::vector<double> u(m, 0.0);
        op.apply(vvec(j), u);
        if (j > 0 && betas[j - 1] != 0.0) detail::axpy(-betas[j - 1], uvec(j - 1), u);
        detail::orthogonalize(u, ubasis, passes);
        double alpha = detail::nrm2(u);
        scale = std::max(scale, alpha);
        if (alpha > 1e-12 * std::max(scale, 1e-300)) {
            detail::scal(1.0 / alpha, u);
        } else {
            alpha = 0.0;
            if (ubasis.size() - u0 >= m_eff || !detail::random_orthonormal(u, m, rng, ubasis)) {
                exhausted = true;
                alphas.push_back(0.0);
                // dummy u to keep B square; a zero row is harmless
                u.assign(m, 0.0);
                ubasis.push_back(std::move(u));
                betas.push_back(0.0);
                break;
            }
        }
        alphas.push_back(alpha);
        ubasis.push_back(std::move(u));

        // v_{j+1} from A' u_j
        std::vector<double> w(n, 0.0);
        op.apply_transpose(uvec(j), w);
        if (alpha != 0.0) detail::axpy(-alpha, vvec(j), w);
        detail::orthogonalize(w, vbasis, passes);
        double beta = detail::nrm2(w);
        scale = std::max(scale, beta);
        if (beta > 1e-12 * std::max(scale, 1e-300)) {
            detail::scal(1.0 / beta, w);
        } else {
            beta = 0.0;
            if (vbasis.size() - v0 >= n_eff || !detail::random_orthonormal(w, n, rng, vbasis)) {
                exhausted = true;
                betas.push_back(0.0);
                break;
            }
        }
        betas.push_back(beta);
        vbasis.push_back(std::move(w));

        const std::size_t steps = alphas.size();
        const bool budget_done = (j + 1 == step_limit);
        const bool space_done = steps >= cap;
        if (!(steps >= k && (space_done || budget_done || steps % 8 == 0 || exhausted)))
            continue;

        // Rayleigh-Ritz on the bidiagonal matrix accumulated so far.
        std::vector<double> b(steps * steps, 0.0);
        for (std::size_t t = 0; t < steps; ++t) {
            b[t * steps + t] = alphas[t];
            if (t + 1 < steps) b[t * steps + (t + 1)] = betas[t];
        }
        detail::SmallSvd small = detail::small_svd(b, steps, k);
        if (small.sigma.size() < k) continue;

        const double sigma1 = small.sigma.empty() ? 0.0 : small.sigma[0];
        const double beta_last = betas.back();
        bool estimates_ok = true;
        for (std::size_t i = 0; i < k; ++i) {
            const double est = std::abs(beta_last * small.p[i][steps - 1]);
            if (est > cfg.tolerance * std::max(sigma1, 1e-300) && !space_done) {
                estimates_ok = false;
                break;
            }
        }
        if (!estimates_ok && !budget_done && !exhausted) continue;

        // Assemble Ritz triplets in the full space and verify true residuals.
        std::vector<SvdTriplet> out(k);
        for (std::size_t i = 0; i < k; ++i) {
            out[i].u.assign(m, 0.0);
            out[i].v.assign(n, 0.0);
            for (std::size_t t = 0; t < steps; ++t) {
                if (small.p[i][t] != 0.0) detail::axpy(small.p[i][t], uvec(t), out[i].u);
                if (small.q[i][t] != 0.0) detail::axpy(small.q[i][t], vvec(t), out[i].v);
            }
            const double nu = detail::nrm2(out[i].u), nv = detail::nrm2(out[i].v);
            if (nu > 0.0) detail::scal(1.0 / nu, out[i].u);
            if (nv > 0.0) detail::scal(1.0 / nv, out[i].v);
        }
        double worst = 0.0;
        std::vector<double> av(m), atu(n);
        for (std::size_t i = 0; i < k; ++i) {
            op.apply(out[i].v, av);
            op.apply_transpose(out[i].u, atu);
            double sigma = detail::dot(out[i].u, av);  // Rayleigh refinement
            sigma = std::max(sigma, 0.0);
            out[i].sigma = sigma;
            std::vector<double> r1 = av, r2 = atu;
            detail::axpy(-sigma, out[i].u, r1);
            detail::axpy(-sigma, out[i].v, r2);
            worst = std::max(worst, std::max(detail::nrm2(r1), detail::nrm2(r2)));
        }
        std::sort(out.begin(), out.end(),
                  [](const SvdTriplet& a, const SvdTriplet& b) { return a.sigma > b.sigma; });
        const double sigma_top = out.empty() ? 0.0 : out[0].sigma;
        if (worst < best_residual) {
            best_residual = worst;
            best = out;
        }
        if (worst <= cfg.tolerance * sigma_top || (sigma_top == 0.0 && worst <= cfg.tolerance)) {
            for (auto& t : out) {
                std::size_t imax = 0;
                for (std::size_t i = 1; i < t.u.size(); ++i)
                    if (std::abs(t.u[i]) > std::abs(t.u[imax])) imax = i;
                if (t.u[imax] < 0.0) {
                    detail::scal(-1.0, t.u);
                    detail::scal(-1.0, t.v);
                }
            }
            return out;
        }
    }

    throw svd_convergence_error(
        "lanczos_svd: no convergence within max_iterations (best residual " +
            std::to_string(best_residual) + ")",
        best_residual);
}

/// The k largest singular triplets of a sparse matrix, descending.
inline std::vector<SvdTriplet> partial_svd(const SparseMatrix& a, std::size_t k,
                                           const SvdConfig& cfg = {}) {
    if (k > std::min(a.n_rows, a.n_cols))
        throw std::invalid_argument("partial_svd: k exceeds min(n_rows, n_cols)");
    bool any = false;
    for (double v : a.values)
        if (v != 0.0) any = true;
    if (!any) throw std::invalid_argument("partial_svd: all-zero matrix");
    return lanczos_svd(SparseOperator{a}, k, cfg);
}

}  // namespace cocluster
