#ifndef HARDY_SUBSPACE_HPP
#define HARDY_SUBSPACE_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "symbol.hpp"

namespace hardy {

/// Shared rank/orthonormality tolerance.
inline constexpr double kDefaultTol = 1e-10;

/**
 * A subspace of the C^m-valued polynomials of degree <= N, held as an
 * orthonormal basis of flattened coefficient vectors (columns of a
 * m(N+1) x k matrix). The zero subspace (k = 0) is a regular value.
 */
class Subspace {
public:
    Subspace(int dim_m, int ambient_deg, CMat basis, double tol = kDefaultTol)
        : dim_m_(dim_m), ambient_deg_(ambient_deg), basis_(std::move(basis)), tol_(tol)
    {
        if (dim_m <= 0 || ambient_deg < 0)
            throw DimensionMismatch("Subspace: invalid ambient space");
        if (basis_.rows() != flat_dim())
            throw DimensionMismatch("Subspace: basis rows " + std::to_string(basis_.rows()) + " do not match "
                                    + std::to_string(flat_dim()));
        if (basis_.cols() > 0) {
            const CMat gram = basis_.adjoint() * basis_;
            const double dev = (gram - CMat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
            if (dev > std::max(tol_, 1e-12))
                throw InvariantViolation("Subspace: basis is not orthonormal (Gram deviation "
                                         + std::to_string(dev) + ")");
        }
    }

    static Subspace zero(int dim_m, int ambient_deg, double tol = kDefaultTol)
    {
        return Subspace(dim_m, ambient_deg, CMat::Zero(dim_m * (ambient_deg + 1), 0), tol);
    }

    static Subspace full(int dim_m, int ambient_deg, double tol = kDefaultTol)
    {
        const Eigen::Index n = dim_m * (ambient_deg + 1);
        return Subspace(dim_m, ambient_deg, CMat::Identity(n, n), tol);
    }

    int dim_m() const noexcept { return dim_m_; }
    int ambient_deg() const noexcept { return ambient_deg_; }
    Eigen::Index flat_dim() const noexcept { return static_cast<Eigen::Index>(dim_m_) * (ambient_deg_ + 1); }
    int dim() const noexcept { return static_cast<int>(basis_.cols()); }
    double tol() const noexcept { return tol_; }
    const CMat& matrix() const noexcept { return basis_; }

    CoeffFn basis_fn(int i) const { return unflatten(dim_m_, basis_.col(i)); }

    std::vector<CoeffFn> basis() const
    {
        std::vector<CoeffFn> out;
        out.reserve(static_cast<std::size_t>(dim()));
        for (int i = 0; i < dim(); ++i)
            out.push_back(basis_fn(i));
        return out;
    }

    CMat projector() const { return basis_ * basis_.adjoint(); }

private:
    int dim_m_;
    int ambient_deg_;
    CMat basis_;
    double tol_;
};

inline void require_same_ambient(const Subspace& a, const Subspace& b, const char* what)
{
    if (a.dim_m() != b.dim_m() || a.ambient_deg() != b.ambient_deg())
        throw DimensionMismatch(std::string(what) + ": subspaces live in different ambient spaces");
}

/// Orthonormal basis of the column span of `x` (flattened vectors); columns below tol * (largest column norm) are rank-deficient.
inline Subspace span_of_columns(int dim_m, int ambient_deg, const CMat& x, double tol = kDefaultTol)
{
    const Eigen::Index n = static_cast<Eigen::Index>(dim_m) * (ambient_deg + 1);
    if (x.rows() != n)
        throw DimensionMismatch("span_of_columns: vectors do not match the ambient space");
    if (x.cols() == 0)
        return Subspace::zero(dim_m, ambient_deg, tol);
    const double scale = x.colwise().norm().maxCoeff();
    if (scale == 0.0)
        return Subspace::zero(dim_m, ambient_deg, tol);
    Eigen::BDCSVD<CMat> svd(x, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol * scale)
        ++rank;
    return Subspace(dim_m, ambient_deg, svd.matrixU().leftCols(rank), tol);
}

inline Subspace from_spanning(int dim_m, std::span<const CoeffFn> fns, int ambient_deg, double tol = kDefaultTol)
{
    CMat x(static_cast<Eigen::Index>(dim_m) * (ambient_deg + 1), static_cast<Eigen::Index>(fns.size()));
    for (std::size_t j = 0; j < fns.size(); ++j) {
        if (fns[j].dim() != dim_m)
            throw DimensionMismatch("from_spanning: function " + std::to_string(j) + " is C^"
                                    + std::to_string(fns[j].dim()) + ", expected C^" + std::to_string(dim_m));
        x.col(static_cast<Eigen::Index>(j)) = flatten(fns[j], ambient_deg);
    }
    return span_of_columns(dim_m, ambient_deg, x, tol);
}

inline Subspace from_spanning(int dim_m, const std::vector<CoeffFn>& fns, int ambient_deg, double tol = kDefaultTol)
{
    return from_spanning(dim_m, std::span<const CoeffFn>(fns.data(), fns.size()), ambient_deg, tol);
}

/// Same subspace viewed in a different ambient degree; shrinking requires the dropped band to be empty.
inline Subspace embed(const Subspace& a, int ambient_deg)
{
    const Eigen::Index n = static_cast<Eigen::Index>(a.dim_m()) * (ambient_deg + 1);
    CMat q = CMat::Zero(n, a.dim());
    if (n >= a.flat_dim()) {
        q.topRows(a.flat_dim()) = a.matrix();
    } else {
        const double lost = a.matrix().bottomRows(a.flat_dim() - n).norm();
        if (lost > a.tol())
            throw TruncationOverflow("embed: subspace has content above degree " + std::to_string(ambient_deg));
        q = a.matrix().topRows(n);
        return span_of_columns(a.dim_m(), ambient_deg, q, a.tol());
    }
    return Subspace(a.dim_m(), ambient_deg, std::move(q), a.tol());
}

/// Orthogonal complement inside the flattened ambient space.
inline Subspace complement(const Subspace& a)
{
    const Eigen::Index n = a.flat_dim();
    if (a.dim() == 0)
        return Subspace::full(a.dim_m(), a.ambient_deg(), a.tol());
    Eigen::HouseholderQR<CMat> qr(a.matrix());
    const CMat q = qr.householderQ() * CMat::Identity(n, n);
    return Subspace(a.dim_m(), a.ambient_deg(), q.rightCols(n - a.dim()), a.tol());
}

/// Span of A and B together.
inline Subspace sum(const Subspace& a, const Subspace& b)
{
    require_same_ambient(a, b, "sum");
    CMat x(a.flat_dim(), a.dim() + b.dim());
    x << a.matrix(), b.matrix();
    return span_of_columns(a.dim_m(), a.ambient_deg(), x, a.tol());
}

/// A ∩ B: vectors of A left unchanged by P_B, i.e. the near-null space of (I - P_B) restricted to A.
inline Subspace intersect(const Subspace& a, const Subspace& b)
{
    require_same_ambient(a, b, "intersect");
    if (a.dim() == 0 || b.dim() == 0)
        return Subspace::zero(a.dim_m(), a.ambient_deg(), a.tol());
    const CMat r = a.matrix() - b.matrix() * (b.matrix().adjoint() * a.matrix());
    Eigen::BDCSVD<CMat> svd(r, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > a.tol())
        ++rank;
    const CMat v = svd.matrixV().rightCols(a.dim() - rank);
    return span_of_columns(a.dim_m(), a.ambient_deg(), a.matrix() * v, a.tol());
}

inline CoeffFn project(const Subspace& a, const CoeffFn& f)
{
    if (f.dim() != a.dim_m())
        throw DimensionMismatch("project: function dimension differs from the subspace");
    const CVec v = flatten(f, a.ambient_deg());
    return unflatten(a.dim_m(), a.matrix() * (a.matrix().adjoint() * v));
}

/// ||F - P_A F||.
inline double residual_norm(const Subspace& a, const CoeffFn& f)
{
    const CVec v = flatten(f, a.ambient_deg());
    return (v - a.matrix() * (a.matrix().adjoint() * v)).norm();
}

/// ||P_A - P_B||_2 = max(||(I - P_B) P_A||, ||(I - P_A) P_B||).
inline double subspace_distance(const Subspace& a, const Subspace& b)
{
    require_same_ambient(a, b, "subspace_distance");
    const CMat ra = a.matrix() - b.matrix() * (b.matrix().adjoint() * a.matrix());
    const CMat rb = b.matrix() - a.matrix() * (a.matrix().adjoint() * b.matrix());
    return std::max(op_norm(ra), op_norm(rb));
}

/// ||(P_A - P_B) P_L||_2 where P_L projects onto polynomials of degree <= band_deg.
inline double subspace_distance_within(const Subspace& a, const Subspace& b, int band_deg)
{
    require_same_ambient(a, b, "subspace_distance_within");
    if (band_deg < 0 || band_deg > a.ambient_deg())
        throw DimensionMismatch("subspace_distance_within: band outside the ambient space");
    const Eigen::Index n = static_cast<Eigen::Index>(a.dim_m()) * (band_deg + 1);
    const CMat d = a.matrix() * a.matrix().topRows(n).adjoint() - b.matrix() * b.matrix().topRows(n).adjoint();
    return op_norm(d);
}

/// Image T_Theta A, with the products placed in ambient degree `out_deg`.
inline Subspace apply_to_subspace(const MatSymbol& t, const Subspace& a, int out_deg)
{
    if (t.m_in() != a.dim_m())
        throw DimensionMismatch("apply_to_subspace: symbol input dimension differs from the subspace");
    CMat x(static_cast<Eigen::Index>(t.m_out()) * (out_deg + 1), a.dim());
    for (int i = 0; i < a.dim(); ++i)
        x.col(i) = flatten(apply_multiplier(t, a.basis_fn(i)), out_deg);
    return span_of_columns(t.m_out(), out_deg, x, a.tol());
}

/**
 * Theta H^2 inside the degree-N polynomials: span of Theta z^j e_i for
 * j <= N - deg(column i), so every basis vector is an exact product.
 */
inline Subspace beurling_space(const MatSymbol& t, int ambient_deg, double tol = kDefaultTol)
{
    if (!t.claimed_inner())
        throw PreconditionError("beurling_space: symbol is not claimed inner");
    if (ambient_deg < t.deg())
        throw PreconditionError("beurling_space: ambient degree below symbol degree");
    std::vector<CoeffFn> cols;
    for (int i = 0; i < t.m_in(); ++i) {
        const CoeffFn col = t.column(i);
        const int headroom = ambient_deg - t.column_deg(i);
        CoeffFn g = trim_to(col, t.column_deg(i), 0.0);
        for (int j = 0; j <= headroom; ++j) {
            cols.push_back(g);
            g = shift(g);
        }
    }
    return from_spanning(t.m_out(), cols, ambient_deg, tol);
}

/**
 * K_Theta inside the degree-N polynomials: the near-null space of the
 * compressed adjoint P_N T_Theta^* P_N, i.e. the orthocomplement of the
 * truncated range P_N Theta P_N. For polynomial inner symbols this is exactly
 * K_Theta ∩ P_N. For rational non-polynomial symbols the reproducing-kernel
 * vectors of K_Theta are recovered up to their truncated tails; singular values
 * at or below `model_tol` (default sqrt(tol)) count as null.
 */
inline Subspace model_space(const MatSymbol& t, int ambient_deg, double tol = kDefaultTol, double model_tol = -1.0)
{
    if (!t.claimed_inner())
        throw PreconditionError("model_space: symbol is not claimed inner");
    if (ambient_deg < t.deg())
        throw PreconditionError("model_space: ambient degree below symbol degree");
    const double thresh = model_tol < 0.0 ? std::sqrt(tol) : model_tol;
    const CMat a = toeplitz_matrix(t, ambient_deg);
    Eigen::BDCSVD<CMat> svd(a, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > thresh)
        ++rank;
    const CMat u = svd.matrixU().rightCols(a.rows() - rank);
    return Subspace(t.m_out(), ambient_deg, u, tol);
}

/// Orthocomplement of beurling_space in the degree-N polynomials; over-approximates K_Theta by the top band.
inline Subspace band_complement(const MatSymbol& t, int ambient_deg, double tol = kDefaultTol)
{
    return complement(beurling_space(t, ambient_deg, tol));
}

/// {F in M : F(0) = 0}: null space of evaluation at 0 restricted to M.
inline Subspace vanishing_slice(const Subspace& m)
{
    if (m.dim() == 0)
        return m;
    const CMat e0 = m.matrix().topRows(m.dim_m());
    Eigen::BDCSVD<CMat> svd(e0, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > m.tol())
        ++rank;
    const CMat q = m.matrix() * svd.matrixV().rightCols(m.dim() - rank);
    return span_of_columns(m.dim_m(), m.ambient_deg(), q, m.tol());
}

/// W = M ⊖ (M ∩ zH^2); its dimension never exceeds m.
inline Subspace wandering(const Subspace& m)
{
    if (m.dim() == 0)
        return m;
    const CMat e0 = m.matrix().topRows(m.dim_m());
    Eigen::BDCSVD<CMat> svd(e0, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > m.tol())
        ++rank;
    if (rank > m.dim_m())
        throw InvariantViolation("wandering: dimension exceeds m");
    const CMat q = m.matrix() * svd.matrixV().leftCols(rank);
    return span_of_columns(m.dim_m(), m.ambient_deg(), q, m.tol());
}

enum class Op { S, Sstar };
enum class Mode { nearly, almost };

inline const char* to_string(Op op) { return op == Op::S ? "S" : "S*"; }
inline const char* to_string(Mode mode) { return mode == Mode::nearly ? "nearly" : "almost"; }

/// Certified statement op(domain) ⊆ target + span(defect_basis).
struct DefectCertificate {
    Op op = Op::Sstar;
    Mode mode = Mode::almost;
    int dim_m = 1;
    int ambient_deg = 0;
    int defect_dim = 0;
    std::vector<CoeffFn> defect_basis;
    std::vector<double> singular_values; ///< descending
    double max_residual = 0.0;           ///< largest singular value left out of the defect
    double tol = kDefaultTol;

    Subspace defect_space() const { return from_spanning(dim_m, defect_basis, ambient_deg, tol); }
};

inline CoeffFn apply_op(Op op, const CoeffFn& f) { return op == Op::S ? shift(f) : backshift(f); }

/**
 * Escape of op(domain) from `target`: singular values of the residual family
 * (I - P_target) op(b_i) over the domain basis. Singular values above the
 * target's tol count toward the defect; their left singular vectors form the
 * defect basis, which lies in target^⊥.
 */
inline DefectCertificate defect_relative(const Subspace& target, const Subspace& domain, Op op,
                                         Mode mode = Mode::almost)
{
    if (target.dim_m() != domain.dim_m())
        throw DimensionMismatch("defect_relative: target and domain differ in dimension");
    const double tol = target.tol();
    CMat x(target.flat_dim(), domain.dim());
    for (int i = 0; i < domain.dim(); ++i) {
        CoeffFn img = apply_op(op, domain.basis_fn(i));
        if (img.deg() > target.ambient_deg())
            img = trim_to(img, target.ambient_deg(), tol);
        x.col(i) = flatten(img, target.ambient_deg());
    }
    const CMat r = x - target.matrix() * (target.matrix().adjoint() * x);

    DefectCertificate cert;
    cert.op = op;
    cert.mode = mode;
    cert.dim_m = target.dim_m();
    cert.ambient_deg = target.ambient_deg();
    cert.tol = tol;
    if (r.cols() == 0)
        return cert;
    Eigen::BDCSVD<CMat> svd(r, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
        cert.singular_values.push_back(s(i));
    int rank = 0;
    while (rank < s.size() && s(rank) > tol)
        ++rank;
    cert.defect_dim = rank;
    cert.max_residual = rank < s.size() ? s(rank) : 0.0;
    for (int i = 0; i < rank; ++i)
        cert.defect_basis.push_back(unflatten(target.dim_m(), svd.matrixU().col(i)));
    return cert;
}

/// Almost-invariance defect of M under S or S*. For S the top coefficient band of M must be empty.
inline DefectCertificate defect_of(const Subspace& m, Op op)
{
    return defect_relative(m, m, op, Mode::almost);
}

} // namespace hardy

#endif // HARDY_SUBSPACE_HPP
