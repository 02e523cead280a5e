#ifndef HARDY_SYMBOL_HPP
#define HARDY_SYMBOL_HPP

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "coeff_fn.hpp"

namespace hardy {

/// Largest singular value; 0 for an empty matrix.
inline double op_norm(const CMat& a)
{
    if (a.size() == 0)
        return 0.0;
    Eigen::BDCSVD<CMat> svd(a);
    return svd.singularValues()(0);
}

/**
 * Truncated operator-valued analytic symbol Theta(z) = sum_k Theta_k z^k, each
 * Theta_k an m_out x m_in matrix. `tail_bound` bounds the sup norm on the
 * circle of the discarded tail Theta - sum_{k<=deg} Theta_k z^k (it is zero
 * for exact polynomial symbols). Because the bound is taken in sup norm it
 * also bounds the Hardy norm of the tail.
 */
class MatSymbol {
public:
    MatSymbol(int m_out, int m_in, std::vector<CMat> mats, double tail_bound = 0.0, bool claimed_inner = false)
        : m_out_(m_out), m_in_(m_in), mats_(std::move(mats)), tail_bound_(tail_bound), claimed_inner_(claimed_inner)
    {
        if (m_out <= 0 || m_in <= 0)
            throw DimensionMismatch("MatSymbol: dimensions must be positive");
        if (mats_.empty())
            throw DimensionMismatch("MatSymbol: no coefficients");
        for (const auto& a : mats_) {
            if (a.rows() != m_out || a.cols() != m_in)
                throw DimensionMismatch("MatSymbol: coefficient of shape " + std::to_string(a.rows()) + "x"
                                        + std::to_string(a.cols()) + ", expected " + std::to_string(m_out)
                                        + "x" + std::to_string(m_in));
            if (!detail::all_finite(a))
                throw DomainError("MatSymbol: non-finite coefficient");
        }
        if (!(tail_bound >= 0.0) || !std::isfinite(tail_bound))
            throw DomainError("MatSymbol: tail bound must be finite and non-negative");
    }

    int m_out() const noexcept { return m_out_; }
    int m_in() const noexcept { return m_in_; }
    int deg() const noexcept { return static_cast<int>(mats_.size()) - 1; }
    const std::vector<CMat>& mats() const noexcept { return mats_; }
    double tail_bound() const noexcept { return tail_bound_; }
    bool claimed_inner() const noexcept { return claimed_inner_; }

    CMat at(int k) const
    {
        if (k < 0 || k > deg())
            return CMat::Zero(m_out_, m_in_);
        return mats_[static_cast<std::size_t>(k)];
    }

    CMat eval(cplx z) const
    {
        CMat acc = mats_.back();
        for (int k = deg() - 1; k >= 0; --k)
            acc = acc * z + mats_[static_cast<std::size_t>(k)];
        return acc;
    }

    /// sum_k ||Theta_k||_2, a bound on the sup norm of the stored polynomial.
    double coeff_l1() const
    {
        double s = 0.0;
        for (const auto& a : mats_)
            s += op_norm(a);
        return s;
    }

    /// Bound on the sup norm of the exact (untruncated) symbol.
    double sup_bound() const { return claimed_inner_ ? 1.0 : coeff_l1() + tail_bound_; }

    /// Degree of column i: the last k with Theta_k e_i != 0.
    int column_deg(int i) const
    {
        for (int k = deg(); k > 0; --k)
            if (!mats_[static_cast<std::size_t>(k)].col(i).isZero(0.0))
                return k;
        return 0;
    }

    /// Theta e_i as a C^{m_out}-valued function.
    CoeffFn column(int i) const
    {
        if (i < 0 || i >= m_in_)
            throw DimensionMismatch("MatSymbol::column: index out of range");
        CMat c(m_out_, deg() + 1);
        for (int k = 0; k <= deg(); ++k)
            c.col(k) = mats_[static_cast<std::size_t>(k)].col(i);
        return CoeffFn(std::move(c));
    }

private:
    int m_out_;
    int m_in_;
    std::vector<CMat> mats_;
    double tail_bound_;
    bool claimed_inner_;
};

/// Symbol equal to the constant matrix `a`.
inline MatSymbol constant_symbol(const CMat& a, bool claimed_inner = false)
{
    return MatSymbol(static_cast<int>(a.rows()), static_cast<int>(a.cols()), {a}, 0.0, claimed_inner);
}

/// m x r symbol whose columns are the given C^m-valued functions (e.g. F_0 from a wandering basis).
inline MatSymbol symbol_from_columns(const std::vector<CoeffFn>& cols, bool claimed_inner = false)
{
    if (cols.empty())
        throw DimensionMismatch("symbol_from_columns: no columns");
    const int m = cols.front().dim();
    int d = 0;
    for (const auto& c : cols) {
        if (c.dim() != m)
            throw DimensionMismatch("symbol_from_columns: columns of different dimension");
        d = std::max(d, c.deg());
    }
    std::vector<CMat> mats(static_cast<std::size_t>(d + 1), CMat::Zero(m, static_cast<Eigen::Index>(cols.size())));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (int k = 0; k <= cols[j].deg(); ++k)
            mats[static_cast<std::size_t>(k)].col(static_cast<Eigen::Index>(j)) = cols[j].coeffs().col(k);
    return MatSymbol(m, static_cast<int>(cols.size()), std::move(mats), 0.0, claimed_inner);
}

/// 1x1 symbol from a scalar function.
inline MatSymbol scalar_symbol(const CoeffFn& f, double tail_bound = 0.0, bool claimed_inner = false)
{
    if (f.dim() != 1)
        throw DimensionMismatch("scalar_symbol: expected a scalar function");
    std::vector<CMat> mats;
    for (int k = 0; k <= f.deg(); ++k)
        mats.push_back(CMat::Constant(1, 1, f.coeffs()(0, k)));
    return MatSymbol(1, 1, std::move(mats), tail_bound, claimed_inner);
}

/**
 * T_Theta F truncated to `out_deg` (Cauchy product C_n = sum_{j+k=n} Theta_j A_k).
 * A negative `out_deg` means the full degree T.deg + F.deg.
 */
inline CoeffFn apply_multiplier(const MatSymbol& t, const CoeffFn& f, int out_deg = -1)
{
    if (t.m_in() != f.dim())
        throw DimensionMismatch("apply_multiplier: symbol takes C^" + std::to_string(t.m_in()) + ", function is C^"
                                + std::to_string(f.dim()));
    const int full = t.deg() + f.deg();
    const int n_out = out_deg < 0 ? full : out_deg;
    CMat c = CMat::Zero(t.m_out(), n_out + 1);
    for (int j = 0; j <= t.deg(); ++j) {
        const CMat& th = t.mats()[static_cast<std::size_t>(j)];
        if (th.isZero(0.0))
            continue;
        for (int k = 0; k <= f.deg() && j + k <= n_out; ++k)
            c.col(j + k).noalias() += th * f.coeffs().col(k);
    }
    return CoeffFn(std::move(c));
}

/// Analytic part of Theta^* G: coefficient n is sum_{j>=0} Theta_j^* B_{n+j}.
inline CoeffFn adjoint_apply(const MatSymbol& t, const CoeffFn& g)
{
    if (t.m_out() != g.dim())
        throw DimensionMismatch("adjoint_apply: symbol maps into C^" + std::to_string(t.m_out())
                                + ", function is C^" + std::to_string(g.dim()));
    CMat c = CMat::Zero(t.m_in(), g.deg() + 1);
    for (int n = 0; n <= g.deg(); ++n)
        for (int j = 0; j <= t.deg() && n + j <= g.deg(); ++j)
            c.col(n).noalias() += t.mats()[static_cast<std::size_t>(j)].adjoint() * g.coeffs().col(n + j);
    return CoeffFn(std::move(c));
}

/// Block lower-triangular Toeplitz matrix of P_N T_Theta restricted to degree <= N.
inline CMat toeplitz_matrix(const MatSymbol& t, int ambient_deg)
{
    const int mo = t.m_out();
    const int mi = t.m_in();
    CMat a = CMat::Zero(mo * (ambient_deg + 1), mi * (ambient_deg + 1));
    for (int i = 0; i <= ambient_deg; ++i)
        for (int j = std::max(0, i - t.deg()); j <= i; ++j)
            a.block(i * mo, j * mi, mo, mi) = t.mats()[static_cast<std::size_t>(i - j)];
    return a;
}

/// Matrix of S on the flattened space of C^m-valued polynomials of degree <= N (top coefficient dropped).
inline CMat shift_matrix(int dim_m, int ambient_deg)
{
    const Eigen::Index n = dim_m * (ambient_deg + 1);
    CMat s = CMat::Zero(n, n);
    for (Eigen::Index k = 0; k + dim_m < n; ++k)
        s(k + dim_m, k) = 1.0;
    return s;
}

/**
 * Checks S A = A S for a dense operator `op` on the flattened truncated spaces,
 * restricted to inputs of degree <= input_deg so that nothing is truncated.
 * This is the matrix-level form; it also accepts operators that are not Toeplitz.
 */
inline bool commutes_with_shift(const CMat& op, int m_out, int m_in, int ambient_deg, int input_deg, double tol)
{
    if (op.rows() != m_out * (ambient_deg + 1) || op.cols() != m_in * (ambient_deg + 1))
        throw DimensionMismatch("commutes_with_shift: operator shape does not match the ambient space");
    const Eigen::Index cols = m_in * (input_deg + 1);
    const CMat lhs = shift_matrix(m_out, ambient_deg) * op.leftCols(cols);
    const CMat rhs = op * shift_matrix(m_in, ambient_deg).leftCols(cols);
    return op_norm(lhs - rhs) <= tol;
}

inline bool commutes_with_shift(const MatSymbol& t, int ambient_deg, double tol)
{
    if (ambient_deg < t.deg() + 2)
        throw PreconditionError("commutes_with_shift: ambient degree must be at least symbol degree + 2");
    return commutes_with_shift(toeplitz_matrix(t, ambient_deg), t.m_out(), t.m_in(), ambient_deg,
                               ambient_deg - t.deg() - 1, tol);
}

/**
 * Product symbol A(z) B(z) truncated to `deg` (negative: full degree).
 *
 * Tail accounting: with exact symbols A_e = A + a, B_e = B + b,
 * A_e B_e - P_deg(A B) = a B_e + A b + (A B - P_deg(A B)), so
 * tail <= tail_A * sup(B_e) + sup(A) * tail_B + l1(dropped coefficients).
 */
inline MatSymbol multiply(const MatSymbol& a, const MatSymbol& b, int deg = -1)
{
    if (a.m_in() != b.m_out())
        throw DimensionMismatch("multiply: inner dimensions differ");
    const int full = a.deg() + b.deg();
    const int d = deg < 0 ? full : deg;
    std::vector<CMat> prod(static_cast<std::size_t>(full + 1), CMat::Zero(a.m_out(), b.m_in()));
    for (int i = 0; i <= a.deg(); ++i)
        for (int j = 0; j <= b.deg(); ++j)
            prod[static_cast<std::size_t>(i + j)].noalias() += a.mats()[static_cast<std::size_t>(i)]
                                                              * b.mats()[static_cast<std::size_t>(j)];
    double dropped = 0.0;
    for (int k = d + 1; k <= full; ++k)
        dropped += op_norm(prod[static_cast<std::size_t>(k)]);
    prod.resize(static_cast<std::size_t>(d + 1), CMat::Zero(a.m_out(), b.m_in()));
    const double sup_a_trunc = std::min(a.coeff_l1(), a.sup_bound() + a.tail_bound());
    const double tail = a.tail_bound() * b.sup_bound() + sup_a_trunc * b.tail_bound() + dropped;
    return MatSymbol(a.m_out(), b.m_in(), std::move(prod), tail, a.claimed_inner() && b.claimed_inner());
}

/// Truncates to `deg`, moving the l1 mass of the dropped coefficients into the tail bound.
inline MatSymbol truncate(const MatSymbol& t, int deg)
{
    std::vector<CMat> mats;
    double dropped = 0.0;
    for (int k = 0; k <= std::max(deg, t.deg()); ++k) {
        if (k <= deg)
            mats.push_back(t.at(k));
        else
            dropped += op_norm(t.at(k));
    }
    return MatSymbol(t.m_out(), t.m_in(), std::move(mats), t.tail_bound() + dropped, t.claimed_inner());
}

} // namespace hardy

#endif // HARDY_SYMBOL_HPP
