#ifndef HARDY_INNER_HPP
#define HARDY_INNER_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "symbol.hpp"

namespace hardy {

/// Finite Blaschke product rotation * prod_a b_a with b_a(z) = (|a|/a)(a - z)/(1 - conj(a) z), b_0(z) = z.
struct BlaschkeSpec {
    std::vector<cplx> zeros;
    cplx rotation{1.0, 0.0};
};

namespace detail {

/// Taylor coefficients of one normalized Blaschke factor up to `deg`, and the l1 mass of the rest.
inline MatSymbol blaschke_factor(cplx a, int deg)
{
    std::vector<CMat> mats(static_cast<std::size_t>(deg + 1), CMat::Zero(1, 1));
    const double rho = std::abs(a);
    if (rho == 0.0) {
        if (deg >= 1)
            mats[1](0, 0) = 1.0;
        return MatSymbol(1, 1, std::move(mats), deg >= 1 ? 0.0 : 1.0, true);
    }
    // c_0 = |a|, c_k = (|a|/a) conj(a)^{k-1} (|a|^2 - 1) for k >= 1.
    const cplx unit = rho / a;
    mats[0](0, 0) = rho;
    cplx pw = 1.0;
    for (int k = 1; k <= deg; ++k) {
        mats[static_cast<std::size_t>(k)](0, 0) = unit * pw * (rho * rho - 1.0);
        pw *= std::conj(a);
    }
    // sum_{k>deg} (1 - rho^2) rho^{k-1} = (1 + rho) rho^deg
    const double tail = (1.0 + rho) * std::pow(rho, deg);
    return MatSymbol(1, 1, std::move(mats), tail, true);
}

} // namespace detail

/// Truncated Taylor expansion of a finite Blaschke product with a certified sup-norm tail bound.
inline MatSymbol blaschke_scalar(const BlaschkeSpec& spec, int deg)
{
    if (deg < 0)
        throw PreconditionError("blaschke_scalar: negative degree");
    for (const auto& a : spec.zeros)
        if (!(std::abs(a) < 1.0))
            throw DomainError("blaschke_scalar: zero outside the open unit disc");
    if (std::abs(std::abs(spec.rotation) - 1.0) > 1e-12)
        throw DomainError("blaschke_scalar: rotation is not unimodular");
    MatSymbol acc = constant_symbol(CMat::Constant(1, 1, spec.rotation), true);
    for (const auto& a : spec.zeros)
        acc = multiply(acc, detail::blaschke_factor(a, deg), deg);
    return truncate(acc, deg);
}

/// Exact inner function z^k.
inline MatSymbol monomial_inner(int k, int deg)
{
    if (k < 0 || k > deg)
        throw PreconditionError("monomial_inner: need 0 <= k <= deg");
    std::vector<CMat> mats(static_cast<std::size_t>(deg + 1), CMat::Zero(1, 1));
    mats[static_cast<std::size_t>(k)](0, 0) = 1.0;
    return MatSymbol(1, 1, std::move(mats), 0.0, true);
}

/// diag(theta_1, ..., theta_m) from scalar inner entries, padded/truncated to a common degree.
inline MatSymbol diag_inner(const std::vector<MatSymbol>& entries, int deg)
{
    if (entries.empty())
        throw PreconditionError("diag_inner: empty entry list");
    const auto m = static_cast<Eigen::Index>(entries.size());
    std::vector<CMat> mats(static_cast<std::size_t>(deg + 1), CMat::Zero(m, m));
    double tail = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& e = entries[static_cast<std::size_t>(i)];
        if (e.m_out() != 1 || e.m_in() != 1)
            throw DimensionMismatch("diag_inner: entries must be scalar symbols");
        if (!e.claimed_inner())
            throw PreconditionError("diag_inner: entry " + std::to_string(i) + " is not claimed inner");
        const MatSymbol t = truncate(e, deg);
        for (int k = 0; k <= deg; ++k)
            mats[static_cast<std::size_t>(k)](i, i) = t.at(k)(0, 0);
        tail = std::max(tail, t.tail_bound());
    }
    return MatSymbol(static_cast<int>(m), static_cast<int>(m), std::move(mats), tail, true);
}

/// max over a uniform circle grid of ||Theta^H Theta - I||_2.
inline double check_inner(const MatSymbol& t, int grid_points)
{
    if (grid_points < 4 * (t.deg() + 1))
        throw PreconditionError("check_inner: grid must have at least 4*(deg+1) points");
    const CMat eye = CMat::Identity(t.m_in(), t.m_in());
    double worst = 0.0;
    for (int j = 0; j < grid_points; ++j) {
        const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * j / grid_points);
        const CMat v = t.eval(z);
        worst = std::max(worst, op_norm(v.adjoint() * v - eye));
    }
    return worst;
}

} // namespace hardy

#endif // HARDY_INNER_HPP
