#ifndef HARDY_COEFF_FN_HPP
#define HARDY_COEFF_FN_HPP

#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace hardy {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

namespace detail {

inline bool all_finite(const CMat& m)
{
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

} // namespace detail

/**
 * A truncated C^m-valued analytic function F(z) = sum_{n=0}^{N} A_n z^n.
 *
 * Coefficients are stored as the columns of an m x (N+1) matrix, so the
 * column-major storage is exactly the flattened layout used for dense linear
 * algebra: entry i of A_n sits at flat index n*m + i.
 *
 * The zero function is always held in canonical form (degree 0, one zero
 * column). Apart from that, trailing zero coefficients are kept: the degree is
 * part of the value and only changes through explicit operations.
 */
class CoeffFn {
public:
    CoeffFn() : CoeffFn(1) {}

    /// Zero function in C^m.
    explicit CoeffFn(int dim_m) : dim_m_(dim_m), coeffs_(CMat::Zero(dim_m, 1))
    {
        if (dim_m <= 0)
            throw DimensionMismatch("CoeffFn: dimension must be positive");
    }

    /// Columns of `coeffs` are the Taylor coefficients A_0, ..., A_N.
    explicit CoeffFn(CMat coeffs) : dim_m_(static_cast<int>(coeffs.rows())), coeffs_(std::move(coeffs))
    {
        if (dim_m_ <= 0 || coeffs_.cols() == 0)
            throw DimensionMismatch("CoeffFn: empty coefficient matrix");
        if (!detail::all_finite(coeffs_))
            throw DomainError("CoeffFn: non-finite coefficient");
        if (coeffs_.isZero(0.0))
            coeffs_ = CMat::Zero(dim_m_, 1);
    }

    int dim() const noexcept { return dim_m_; }
    int deg() const noexcept { return static_cast<int>(coeffs_.cols()) - 1; }
    const CMat& coeffs() const noexcept { return coeffs_; }

    /// A_n; zero beyond the stored degree.
    CVec coeff(int n) const
    {
        if (n < 0 || n > deg())
            return CVec::Zero(dim_m_);
        return coeffs_.col(n);
    }

    bool is_zero() const { return coeffs_.isZero(0.0); }

    double norm_squared() const { return coeffs_.squaredNorm(); }
    double norm() const { return coeffs_.norm(); }

    /// Coefficients padded with zeros (or cut) to degree `n`.
    CMat padded(int n) const
    {
        CMat out = CMat::Zero(dim_m_, n + 1);
        const int keep = std::min(n, deg());
        out.leftCols(keep + 1) = coeffs_.leftCols(keep + 1);
        return out;
    }

    /// Highest index carrying a coefficient of norm above `thresh`; 0 for the zero function.
    int effective_deg(double thresh = 0.0) const
    {
        for (int n = deg(); n > 0; --n)
            if (coeffs_.col(n).norm() > thresh)
                return n;
        return 0;
    }

private:
    int dim_m_;
    CMat coeffs_;
};

/// Builds F from a list of coefficient vectors, one per degree.
inline CoeffFn make_fn(int dim_m, const std::vector<std::vector<cplx>>& coeffs)
{
    if (dim_m <= 0)
        throw DimensionMismatch("make_fn: dimension must be positive");
    if (coeffs.empty())
        throw DimensionMismatch("make_fn: empty coefficient list");
    CMat c(dim_m, static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (static_cast<int>(coeffs[n].size()) != dim_m)
            throw DimensionMismatch("make_fn: coefficient " + std::to_string(n) + " has length "
                                    + std::to_string(coeffs[n].size()) + ", expected "
                                    + std::to_string(dim_m));
        for (int i = 0; i < dim_m; ++i)
            c(i, static_cast<Eigen::Index>(n)) = coeffs[n][i];
    }
    return CoeffFn(std::move(c));
}

/// Scalar polynomial sum c_n z^n.
inline CoeffFn scalar_fn(std::initializer_list<cplx> coeffs)
{
    CMat c(1, static_cast<Eigen::Index>(coeffs.size()));
    Eigen::Index n = 0;
    for (const auto& a : coeffs)
        c(0, n++) = a;
    return CoeffFn(std::move(c));
}

/// z^k e_i in C^m.
inline CoeffFn monomial(int dim_m, int k, int i = 0)
{
    if (i < 0 || i >= dim_m)
        throw DimensionMismatch("monomial: component index out of range");
    CMat c = CMat::Zero(dim_m, k + 1);
    c(i, k) = 1.0;
    return CoeffFn(std::move(c));
}

/// Constant function equal to v.
inline CoeffFn constant(const CVec& v)
{
    return CoeffFn(CMat(v));
}

inline void require_same_dim(const CoeffFn& f, const CoeffFn& g, const char* what)
{
    if (f.dim() != g.dim())
        throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(f.dim())
                                + " vs " + std::to_string(g.dim()) + ")");
}

/// <F, G> = sum_n <A_n, B_n>, linear in F and conjugate-linear in G.
inline cplx inner_product(const CoeffFn& f, const CoeffFn& g)
{
    require_same_dim(f, g, "inner_product");
    const int n = std::min(f.deg(), g.deg());
    cplx acc = 0.0;
    for (int k = 0; k <= n; ++k)
        acc += g.coeffs().col(k).dot(f.coeffs().col(k)); // Eigen's dot conjugates the left operand
    return acc;
}

inline CoeffFn operator+(const CoeffFn& f, const CoeffFn& g)
{
    require_same_dim(f, g, "operator+");
    const int n = std::max(f.deg(), g.deg());
    return CoeffFn(f.padded(n) + g.padded(n));
}

inline CoeffFn operator-(const CoeffFn& f, const CoeffFn& g)
{
    require_same_dim(f, g, "operator-");
    const int n = std::max(f.deg(), g.deg());
    return CoeffFn(f.padded(n) - g.padded(n));
}

inline CoeffFn operator*(cplx a, const CoeffFn& f)
{
    return CoeffFn(a * f.coeffs());
}

/// Coefficient sequences agree after zero padding.
inline bool operator==(const CoeffFn& f, const CoeffFn& g)
{
    if (f.dim() != g.dim())
        return false;
    const int n = std::max(f.deg(), g.deg());
    return f.padded(n) == g.padded(n);
}

inline bool approx_equal(const CoeffFn& f, const CoeffFn& g, double tol)
{
    return f.dim() == g.dim() && (f - g).norm() <= tol;
}

/// S: multiplication by z.
inline CoeffFn shift(const CoeffFn& f)
{
    if (f.is_zero())
        return f;
    CMat c = CMat::Zero(f.dim(), f.deg() + 2);
    c.rightCols(f.deg() + 1) = f.coeffs();
    return CoeffFn(std::move(c));
}

/// S*: (F(z) - F(0)) / z.
inline CoeffFn backshift(const CoeffFn& f)
{
    if (f.deg() == 0)
        return CoeffFn(f.dim());
    return CoeffFn(CMat(f.coeffs().rightCols(f.deg())));
}

/// Horner evaluation of the truncated series, |z| <= 1.
inline CVec eval_at(const CoeffFn& f, cplx z)
{
    if (std::abs(z) > 1.0)
        throw DomainError("eval_at: |z| > 1");
    CVec acc = f.coeffs().col(f.deg());
    for (int n = f.deg() - 1; n >= 0; --n)
        acc = acc * z + f.coeffs().col(n);
    return acc;
}

/// Flat vector of length m*(ambient_deg+1), degree-major.
inline CVec flatten(const CoeffFn& f, int ambient_deg)
{
    if (f.deg() > ambient_deg)
        throw TruncationOverflow("flatten: degree " + std::to_string(f.deg()) + " exceeds ambient degree "
                                 + std::to_string(ambient_deg));
    CMat c = f.padded(ambient_deg);
    return Eigen::Map<const CVec>(c.data(), c.size());
}

inline CoeffFn unflatten(int dim_m, const CVec& v)
{
    if (dim_m <= 0 || v.size() == 0 || v.size() % dim_m != 0)
        throw DimensionMismatch("unflatten: length " + std::to_string(v.size())
                                + " is not a positive multiple of " + std::to_string(dim_m));
    return CoeffFn(CMat(Eigen::Map<const CMat>(v.data(), dim_m, v.size() / dim_m)));
}

/// Drops coefficients above `deg`; throws if any of them exceeds `thresh` in norm.
inline CoeffFn trim_to(const CoeffFn& f, int deg, double thresh)
{
    if (f.deg() <= deg)
        return f;
    for (int n = deg + 1; n <= f.deg(); ++n)
        if (f.coeffs().col(n).norm() > thresh)
            throw TruncationOverflow("trim_to: coefficient " + std::to_string(n) + " has norm "
                                     + std::to_string(f.coeffs().col(n).norm()));
    return CoeffFn(CMat(f.coeffs().leftCols(deg + 1)));
}

/// Stacks scalar/vector functions into one function with concatenated components.
inline CoeffFn stack(const std::vector<CoeffFn>& parts)
{
    if (parts.empty())
        throw DimensionMismatch("stack: nothing to stack");
    int m = 0;
    int n = 0;
    for (const auto& p : parts) {
        m += p.dim();
        n = std::max(n, p.deg());
    }
    CMat c(m, n + 1);
    int row = 0;
    for (const auto& p : parts) {
        c.middleRows(row, p.dim()) = p.padded(n);
        row += p.dim();
    }
    return CoeffFn(std::move(c));
}

/// Components [first, first+count) of F as a C^count-valued function.
inline CoeffFn components(const CoeffFn& f, int first, int count)
{
    if (first < 0 || count <= 0 || first + count > f.dim())
        throw DimensionMismatch("components: range out of bounds");
    return CoeffFn(CMat(f.coeffs().middleRows(first, count)));
}

} // namespace hardy

#endif // HARDY_COEFF_FN_HPP
