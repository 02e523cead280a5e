#ifndef HARDY_NEARLY_HPP
#define HARDY_NEARLY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "subspace.hpp"

namespace hardy {

/// Default tolerance for step residuals of the decomposition and for other "holds up to rounding" checks.
inline constexpr double kNearTol = 1e-8;

/// The decomposition hit a step where S*F_{k+1} escapes M ⊕ span(E).
class NotNearlyInvariant : public HardyError {
public:
    NotNearlyInvariant(int step, double residual, CoeffFn r)
        : HardyError("not nearly invariant: step " + std::to_string(step) + " leaves residual "
                     + std::to_string(residual)),
          step_(step), residual_(residual), r_(std::move(r))
    {
    }

    int step() const noexcept { return step_; }
    double residual() const noexcept { return residual_; }
    const CoeffFn& remainder() const noexcept { return r_; }

private:
    int step_;
    double residual_;
    CoeffFn r_;
};

/**
 * F = F_0 K_0 + sum_j z k_j E_j, built coefficient by coefficient.
 * K0 is absent when M has no wandering part (every F in M vanishes at 0).
 */
struct DecompResult {
    std::optional<CoeffFn> K0;
    std::vector<CoeffFn> kj;
    std::vector<CVec> A_trace;
    std::vector<CVec> beta_trace; ///< beta_trace[k] holds beta_{k+1}
    std::vector<double> gk_norms; ///< ||G_0||, ||G_1||, ...
    double max_step_residual = 0.0;
    double norm_gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct DecompOptions {
    double eps = 1e-10;
    int k_max = -1;                                ///< negative: N + p + 8
    double near_tol = kNearTol;
    std::optional<std::vector<CoeffFn>> wandering; ///< orthonormal basis of W to use as F_0
};

namespace detail {

inline CMat flatten_all(const std::vector<CoeffFn>& fns, int dim_m, int ambient_deg)
{
    CMat x(static_cast<Eigen::Index>(dim_m) * (ambient_deg + 1), static_cast<Eigen::Index>(fns.size()));
    for (std::size_t j = 0; j < fns.size(); ++j) {
        if (fns[j].dim() != dim_m)
            throw DimensionMismatch("function " + std::to_string(j) + " has the wrong dimension");
        x.col(static_cast<Eigen::Index>(j)) = flatten(fns[j], ambient_deg);
    }
    return x;
}

inline double gram_deviation(const CMat& x)
{
    if (x.cols() == 0)
        return 0.0;
    return (x.adjoint() * x - CMat::Identity(x.cols(), x.cols())).cwiseAbs().maxCoeff();
}

/// S* on a flat vector: drop the first m entries, pad with zeros.
inline CVec flat_backshift(const CVec& v, int dim_m)
{
    CVec out = CVec::Zero(v.size());
    out.head(v.size() - dim_m) = v.tail(v.size() - dim_m);
    return out;
}

/// Checks an orthonormal defect family orthogonal to M and returns it flattened.
inline CMat checked_defect(const Subspace& m, const std::vector<CoeffFn>& defect, double tol)
{
    const CMat e = flatten_all(defect, m.dim_m(), m.ambient_deg());
    if (gram_deviation(e) > tol)
        throw PreconditionError("defect basis is not orthonormal");
    if (e.cols() > 0 && m.dim() > 0 && (m.matrix().adjoint() * e).cwiseAbs().maxCoeff() > tol)
        throw PreconditionError("defect basis is not orthogonal to M");
    return e;
}

/// Flattened F_0 columns: either the computed wandering subspace or a checked override spanning it.
inline CMat wandering_matrix(const Subspace& m, const std::optional<std::vector<CoeffFn>>& override_basis,
                             double tol)
{
    const Subspace w = wandering(m);
    if (!override_basis)
        return w.matrix();
    const CMat f0 = flatten_all(*override_basis, m.dim_m(), m.ambient_deg());
    if (gram_deviation(f0) > tol)
        throw PreconditionError("wandering basis is not orthonormal");
    if (f0.cols() != w.dim())
        throw PreconditionError("wandering basis has " + std::to_string(f0.cols()) + " vectors, W has dimension "
                                + std::to_string(w.dim()));
    const Subspace given(m.dim_m(), m.ambient_deg(), f0, std::max(tol, m.tol()));
    if (subspace_distance(given, w) > tol)
        throw PreconditionError("wandering basis does not span the wandering subspace of M");
    return f0;
}

} // namespace detail

/**
 * Runs the defect-p iteration on F ∈ M:
 *   A_k = F_0^* G_k,  F_{k+1} = G_k - F_0 A_k,  H = S* F_{k+1},
 *   G_{k+1} = P_M H,  beta_{k+1} = E^* H,  R = H - G_{k+1} - E beta_{k+1}.
 */
inline DecompResult decompose(const Subspace& m, const std::vector<CoeffFn>& defect, const CoeffFn& f,
                              const DecompOptions& opts = {})
{
    const int dm = m.dim_m();
    const int n = m.ambient_deg();
    const int p = static_cast<int>(defect.size());
    const int k_max = opts.k_max < 0 ? n + p + 8 : opts.k_max;
    if (k_max < 1)
        throw PreconditionError("decompose: k_max must be at least 1");
    if (f.dim() != dm)
        throw DimensionMismatch("decompose: F does not match the dimension of M");

    const CVec fv = flatten(f, n);
    const double fnorm = fv.norm();
    const double in_m = (fv - m.matrix() * (m.matrix().adjoint() * fv)).norm();
    if (in_m > opts.near_tol * std::max(1.0, fnorm))
        throw PreconditionError("decompose: F is not in M (distance " + std::to_string(in_m) + ")");

    const CMat e = detail::checked_defect(m, defect, opts.near_tol);
    const CMat w = detail::wandering_matrix(m, opts.wandering, opts.near_tol);
    const int r = static_cast<int>(w.cols());

    DecompResult res;
    CVec g = m.matrix() * (m.matrix().adjoint() * fv);
    res.gk_norms.push_back(g.norm());
    for (int k = 0; k < k_max; ++k) {
        CVec a = w.adjoint() * g;
        CVec fk = g - w * a;
        const double at0 = fk.head(dm).norm();
        if (at0 > opts.near_tol * std::max(1.0, fnorm))
            throw InvariantViolation("decompose: F_" + std::to_string(k + 1) + "(0) has norm "
                                     + std::to_string(at0));
        const CVec h = detail::flat_backshift(fk, dm);
        CVec g_next = m.matrix() * (m.matrix().adjoint() * h);
        CVec beta = e.adjoint() * h;
        const CVec rv = h - g_next - e * beta;
        const double rn = rv.norm();
        res.max_step_residual = std::max(res.max_step_residual, rn);
        if (rn > opts.near_tol)
            throw NotNearlyInvariant(k + 1, rn, unflatten(dm, rv));
        res.A_trace.push_back(std::move(a));
        res.beta_trace.push_back(std::move(beta));
        g = std::move(g_next);
        res.gk_norms.push_back(g.norm());
        res.iterations = k + 1;
        if (g.norm() < opts.eps) {
            res.converged = true;
            break;
        }
    }

    const int len = res.iterations;
    double mass = 0.0;
    if (r > 0) {
        CMat c(r, len);
        for (int k = 0; k < len; ++k)
            c.col(k) = res.A_trace[static_cast<std::size_t>(k)];
        res.K0 = CoeffFn(std::move(c));
        mass += res.K0->norm_squared();
    }
    for (int j = 0; j < p; ++j) {
        CMat c(1, len);
        for (int k = 0; k < len; ++k)
            c(0, k) = res.beta_trace[static_cast<std::size_t>(k)](j);
        res.kj.emplace_back(std::move(c));
        mass += res.kj.back().norm_squared();
    }
    res.norm_gap = std::abs(fnorm * fnorm - mass);
    return res;
}

/// Largest escape ||(I - P_{M ⊕ E}) S* F|| over unit F in the vanishing slice of M.
inline double nearly_residual(const Subspace& m, const std::vector<CoeffFn>& defect)
{
    const Subspace x = sum(m, from_spanning(m.dim_m(), defect, m.ambient_deg(), m.tol()));
    const DefectCertificate c = defect_relative(x, vanishing_slice(m), Op::Sstar, Mode::nearly);
    return c.singular_values.empty() ? 0.0 : c.singular_values.front();
}

struct NearlyCertificate {
    bool passed = false; ///< defect_dim <= p_max
    int p_max = 0;
    DefectCertificate cert;
};

/// Minimal defect for near S*-invariance: S* applied to {F in M : F(0) = 0}, measured against M.
inline NearlyCertificate certify_nearly(const Subspace& m, int p_max)
{
    NearlyCertificate out;
    out.p_max = p_max;
    out.cert = defect_relative(m, vanishing_slice(m), Op::Sstar, Mode::nearly);
    out.passed = out.cert.defect_dim <= p_max;
    return out;
}

/**
 * The S* ⊕ ... ⊕ S*-invariant subspace K over C^{r+p} parametrizing M:
 * every basis vector of M is decomposed and its tuple (K_0, k_1, ..., k_p)
 * collected. Isometry and S*-invariance of the result are checked.
 */
inline Subspace extract_K(const Subspace& m, const std::vector<CoeffFn>& defect, const DecompOptions& opts = {})
{
    const int p = static_cast<int>(defect.size());
    const int r = wandering(m).dim();
    if (r + p == 0)
        throw PreconditionError("extract_K: M is zero and there is no defect, K would live in C^0");
    const int n = m.ambient_deg();
    CMat tuples(static_cast<Eigen::Index>(r + p) * (n + 1), m.dim());
    for (int i = 0; i < m.dim(); ++i) {
        const DecompResult d = decompose(m, defect, m.basis_fn(i), opts);
        if (!d.converged)
            throw CertificationFailure("extract_K: decomposition of basis vector " + std::to_string(i)
                                       + " did not converge");
        std::vector<CoeffFn> parts;
        if (d.K0)
            parts.push_back(*d.K0);
        for (const auto& k : d.kj)
            parts.push_back(k);
        tuples.col(i) = flatten(trim_to(stack(parts), n, opts.near_tol), n);
    }
    const double iso = detail::gram_deviation(tuples);
    if (iso > opts.near_tol)
        throw CertificationFailure("extract_K: tuple map is not isometric (Gram deviation " + std::to_string(iso)
                                   + ")");
    Subspace k = span_of_columns(r + p, n, tuples, m.tol());
    const DefectCertificate inv = defect_relative(k, k, Op::Sstar);
    const double worst = inv.singular_values.empty() ? 0.0 : inv.singular_values.front();
    if (worst > opts.near_tol)
        throw CertificationFailure("extract_K: recovered K is not S*-invariant (residual " + std::to_string(worst)
                                   + ")");
    return k;
}

/**
 * Converse direction: M = { F_0 K_0 + sum_j z k_j E_j : (K_0, k_1, ..., k_p) in K }.
 * The result is checked to be nearly S*-invariant with defect at most p.
 */
inline Subspace synthesize_M(const Subspace& k, const std::vector<CoeffFn>& f0_cols, const std::vector<CoeffFn>& e,
                             int ambient_deg, double near_tol = kNearTol)
{
    const int r = static_cast<int>(f0_cols.size());
    const int p = static_cast<int>(e.size());
    if (k.dim_m() != r + p)
        throw DimensionMismatch("synthesize_M: K lives in C^" + std::to_string(k.dim_m()) + ", expected C^"
                                + std::to_string(r + p));
    if (r + p == 0)
        throw PreconditionError("synthesize_M: no F_0 columns and no defect");
    const int dm = r > 0 ? f0_cols.front().dim() : e.front().dim();

    int sym_deg = 0;
    for (const auto& c : f0_cols)
        sym_deg = std::max(sym_deg, c.deg());
    for (const auto& c : e)
        sym_deg = std::max(sym_deg, c.deg() + 1);
    if (ambient_deg < k.ambient_deg() + sym_deg)
        throw PreconditionError("synthesize_M: ambient degree " + std::to_string(ambient_deg) + " below "
                                + std::to_string(k.ambient_deg() + sym_deg) + " needed for exact products");

    const CMat f0 = detail::flatten_all(f0_cols, dm, ambient_deg);
    if (detail::gram_deviation(f0) > near_tol)
        throw PreconditionError("synthesize_M: F_0 columns are not orthonormal");
    if (r > 0) {
        Eigen::BDCSVD<CMat> svd(f0.topRows(dm));
        if (svd.singularValues()(r - 1) <= k.tol())
            throw PreconditionError("synthesize_M: values of F_0 at 0 are linearly dependent");
    }
    const CMat ef = detail::flatten_all(e, dm, ambient_deg);
    if (detail::gram_deviation(ef) > near_tol)
        throw PreconditionError("synthesize_M: E is not orthonormal");

    std::optional<MatSymbol> f0_sym;
    if (r > 0)
        f0_sym = symbol_from_columns(f0_cols);
    std::vector<CoeffFn> images;
    for (int i = 0; i < k.dim(); ++i) {
        const CoeffFn t = k.basis_fn(i);
        CoeffFn f(dm);
        if (r > 0)
            f = f + apply_multiplier(*f0_sym, components(t, 0, r));
        for (int j = 0; j < p; ++j) {
            const MatSymbol ej = symbol_from_columns({e[static_cast<std::size_t>(j)]});
            f = f + apply_multiplier(ej, shift(components(t, r + j, 1)));
        }
        images.push_back(f);
    }
    Subspace m = from_spanning(dm, images, ambient_deg, k.tol());
    const NearlyCertificate c = certify_nearly(m, p);
    if (!c.passed)
        throw CertificationFailure("synthesize_M: result has defect " + std::to_string(c.cert.defect_dim)
                                   + ", more than " + std::to_string(p));
    return m;
}

struct CheckResult {
    bool holds = false;
    double residual = 0.0;
};

/// Whether S* W_i ∈ M ⊕ span(E) for the wandering vectors too, which makes M almost invariant for S*.
inline CheckResult almost_invariant_Sstar_check(const Subspace& m, const std::vector<CoeffFn>& defect,
                                                double tol = kDefaultTol, double near_tol = kNearTol)
{
    const double nr = nearly_residual(m, defect);
    if (nr > near_tol)
        throw PreconditionError("almost_invariant_Sstar_check: M is not nearly S*-invariant with this defect "
                                "(residual " + std::to_string(nr) + ")");
    const Subspace x = sum(m, from_spanning(m.dim_m(), defect, m.ambient_deg(), m.tol()));
    const Subspace w = wandering(m);
    CheckResult out;
    for (int i = 0; i < w.dim(); ++i)
        out.residual = std::max(out.residual, residual_norm(x, backshift(w.basis_fn(i))));
    out.holds = out.residual <= tol;
    return out;
}

struct DualityResult {
    bool lhs = false; ///< S* M ⊆ M ⊕ F
    bool rhs = false; ///< S (M ⊕ F)^⊥ ⊆ (M ⊕ F)^⊥ ⊕ F
    double lhs_residual = 0.0;
    double rhs_residual = 0.0;
    bool agree() const noexcept { return lhs == rhs; }
};

/**
 * Both sides of the duality between S*-defects of M and S-defects of its
 * complement. The right side is evaluated one degree up, so shifting the
 * complement never truncates.
 */
inline DualityResult duality_check(const Subspace& m, const std::vector<CoeffFn>& f, double tol = kDefaultTol)
{
    const Subspace fs = from_spanning(m.dim_m(), f, m.ambient_deg(), m.tol());
    const Subspace x = sum(m, fs);
    DualityResult out;
    for (int i = 0; i < m.dim(); ++i)
        out.lhs_residual = std::max(out.lhs_residual, residual_norm(x, backshift(m.basis_fn(i))));

    const int up = m.ambient_deg() + 1;
    const Subspace y = complement(x);
    const Subspace target = sum(complement(embed(x, up)), embed(fs, up));
    for (int i = 0; i < y.dim(); ++i)
        out.rhs_residual = std::max(out.rhs_residual, residual_norm(target, shift(y.basis_fn(i))));
    out.lhs = out.lhs_residual <= tol;
    out.rhs = out.rhs_residual <= tol;
    return out;
}

/**
 * G ⊥ M exactly when (T*_{F_0} G, T*_{E_1} S* G, ..., T*_{E_p} S* G) ∈ K^⊥.
 * The F_0 slot is dropped when M has no wandering part. Returns the distance
 * of the tuple from K_perp.
 */
inline CheckResult orthocomplement_membership(const CoeffFn& g, const std::optional<MatSymbol>& f0,
                                              const std::vector<MatSymbol>& e, const Subspace& k_perp,
                                              double tol = kDefaultTol, double near_tol = kNearTol)
{
    std::vector<CoeffFn> parts;
    if (f0)
        parts.push_back(adjoint_apply(*f0, g));
    const CoeffFn sg = backshift(g);
    for (const auto& ej : e) {
        if (ej.m_in() != 1)
            throw DimensionMismatch("orthocomplement_membership: defect symbols must be m x 1");
        parts.push_back(adjoint_apply(ej, sg));
    }
    if (parts.empty())
        throw PreconditionError("orthocomplement_membership: no F_0 and no defect symbols");
    const CoeffFn tuple = stack(parts);
    if (tuple.dim() != k_perp.dim_m())
        throw DimensionMismatch("orthocomplement_membership: tuple is C^" + std::to_string(tuple.dim())
                                + ", K_perp lives in C^" + std::to_string(k_perp.dim_m()));

    // K_perp is S-invariant iff its complement is S*-invariant; the latter needs no degree headroom.
    const Subspace k = complement(k_perp);
    const DefectCertificate inv = defect_relative(k, k, Op::Sstar);
    const double worst = inv.singular_values.empty() ? 0.0 : inv.singular_values.front();
    if (worst > near_tol)
        throw PreconditionError("orthocomplement_membership: K_perp is not S-invariant");

    CheckResult out;
    out.residual = residual_norm(k_perp, trim_to(tuple, k_perp.ambient_deg(), near_tol));
    out.holds = out.residual <= tol;
    return out;
}

} // namespace hardy

#endif // HARDY_NEARLY_HPP
