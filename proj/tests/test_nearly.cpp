#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <hardy/inner.hpp>
#include <hardy/nearly.hpp>

using namespace hardy;

namespace {

Subspace span1(std::vector<CoeffFn> fns, int n) { return from_spanning(fns.front().dim(), fns, n); }

MatSymbol z_identity(int m)
{
    std::vector<MatSymbol> e(static_cast<std::size_t>(m), monomial_inner(1, 1));
    return diag_inner(e, 1);
}

/// (z I_m K_{z I_m})^perp in degree n.
Subspace counterexample_space(int m, int n)
{
    const MatSymbol t = z_identity(m);
    return complement(apply_to_subspace(t, model_space(t, 1), n));
}

} // namespace

TEST(Decompose, ModelSpaceNoDefect)
{
    const Subspace m = span1({scalar_fn({1.0}), scalar_fn({0.0, 1.0})}, 4);
    const DecompResult d = decompose(m, {}, scalar_fn({0.0, 1.0}));
    ASSERT_TRUE(d.K0.has_value());
    EXPECT_TRUE(d.converged);
    EXPECT_EQ(d.iterations, 2);
    EXPECT_LE(d.norm_gap, 1e-12);
    EXPECT_NEAR((*d.K0 - scalar_fn({0.0, 1.0})).norm(), 0.0, 1e-12);
    EXPECT_TRUE(d.kj.empty());
}

TEST(Decompose, VanishingCaseUsesOnlyDefect)
{
    const Subspace m = span1({scalar_fn({0.0, 1.0})}, 4);
    const DecompResult d = decompose(m, {scalar_fn({1.0})}, scalar_fn({0.0, 1.0}));
    EXPECT_FALSE(d.K0.has_value());
    ASSERT_EQ(d.kj.size(), 1u);
    EXPECT_NEAR((d.kj[0] - scalar_fn({1.0})).norm(), 0.0, 1e-12);
    EXPECT_NEAR(d.kj[0].norm_squared(), 1.0, 1e-12);
    EXPECT_LE(d.norm_gap, 1e-12);
}

TEST(Decompose, CounterexampleRaisesAtFirstStep)
{
    const Subspace m = counterexample_space(2, 8);
    try {
        decompose(m, {}, monomial(2, 2, 0));
        FAIL() << "expected NotNearlyInvariant";
    } catch (const NotNearlyInvariant& e) {
        EXPECT_EQ(e.step(), 1);
        EXPECT_NEAR(e.residual(), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(e.remainder().coeff(1)(0)), 1.0, 1e-12);
    }
}

TEST(Decompose, Preconditions)
{
    const Subspace m = span1({scalar_fn({1.0}), scalar_fn({0.0, 1.0})}, 4);
    EXPECT_THROW(decompose(m, {}, scalar_fn({0.0, 0.0, 1.0})), PreconditionError);
    EXPECT_THROW(decompose(m, {scalar_fn({1.0})}, scalar_fn({1.0})), PreconditionError);
    EXPECT_THROW(decompose(m, {scalar_fn({0.0, 0.0, 2.0})}, scalar_fn({1.0})), PreconditionError);
    DecompOptions o;
    o.k_max = 0;
    EXPECT_THROW(decompose(m, {}, scalar_fn({1.0}), o), PreconditionError);
}

TEST(Decompose, NonConvergenceIsReportedNotThrown)
{
    const Subspace m = model_space(monomial_inner(5, 5), 8);
    DecompOptions o;
    o.k_max = 2;
    const DecompResult d = decompose(m, {}, monomial(1, 4), o);
    EXPECT_FALSE(d.converged);
    EXPECT_EQ(d.iterations, 2);
    EXPECT_EQ(d.gk_norms.size(), 3u);
}

TEST(Decompose, LinearityProperty)
{
    const double s = 1.0 / std::numbers::sqrt2;
    // M = span{1, z} ⊕ span{z^3} with defect {z^2}
    const Subspace m = span1({scalar_fn({1.0}), scalar_fn({0.0, 1.0}), scalar_fn({0.0, 0.0, 0.0, 1.0})}, 6);
    const std::vector<CoeffFn> e = {scalar_fn({0.0, 0.0, 1.0})};
    ASSERT_LE(nearly_residual(m, e), 1e-12);
    std::mt19937_64 gen(41);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
        const CoeffFn f = scalar_fn({cplx(g(gen), g(gen)), cplx(g(gen), g(gen)), 0.0, cplx(g(gen), g(gen))});
        const CoeffFn h = scalar_fn({cplx(g(gen), g(gen)), s, 0.0, cplx(g(gen), g(gen))});
        const cplx a(g(gen), g(gen)), b(g(gen), g(gen));
        const DecompResult df = decompose(m, e, f);
        const DecompResult dh = decompose(m, e, h);
        const DecompResult dc = decompose(m, e, a * f + b * h);
        EXPECT_NEAR((*dc.K0 - (a * *df.K0 + b * *dh.K0)).norm(), 0.0, 1e-9);
        EXPECT_NEAR((dc.kj[0] - (a * df.kj[0] + b * dh.kj[0])).norm(), 0.0, 1e-9);
        EXPECT_LE(df.norm_gap, 1e-9 + 10 * 1e-10 * f.norm());
    }
}

TEST(Certify, Examples)
{
    // span{z e1}: S*(z e1) = e1 escapes, defect 1 along e1.
    const Subspace m = span1({monomial(2, 1, 0)}, 4);
    const NearlyCertificate c = certify_nearly(m, 0);
    EXPECT_FALSE(c.passed);
    ASSERT_EQ(c.cert.defect_dim, 1);
    EXPECT_NEAR(std::abs(c.cert.defect_basis[0].coeff(0)(0)), 1.0, 1e-12);
    EXPECT_TRUE(certify_nearly(m, 1).passed);
    EXPECT_EQ(c.cert.mode, Mode::nearly);

    const NearlyCertificate ce = certify_nearly(counterexample_space(2, 8), 0);
    EXPECT_GE(ce.cert.defect_dim, 1);
    for (const auto& v : ce.cert.defect_basis)
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);

    const MatSymbol psi = diag_inner({blaschke_scalar({{0.5}, 1.0}, 32), blaschke_scalar({{1.0 / 3.0}, 1.0}, 32)}, 32);
    const Subspace pk = apply_to_subspace(psi, model_space(z_identity(2), 1), 40);
    const NearlyCertificate cp = certify_nearly(pk, 0);
    EXPECT_TRUE(cp.passed);
    const double res = cp.cert.singular_values.empty() ? 0.0 : cp.cert.singular_values.front();
    EXPECT_LE(res, std::max(1e-10, 3.0 * psi.tail_bound()));
}

TEST(ExtractK, TrivialCases)
{
    const Subspace m = span1({scalar_fn({1.0}), scalar_fn({0.0, 1.0})}, 4);
    const Subspace k = extract_K(m, {});
    EXPECT_EQ(k.dim_m(), 1);
    EXPECT_LE(subspace_distance(k, m), 1e-12);

    const Subspace mz = span1({scalar_fn({0.0, 1.0})}, 4);
    const Subspace kz = extract_K(mz, {scalar_fn({1.0})});
    EXPECT_EQ(kz.dim(), 1);
    EXPECT_LE(subspace_distance(kz, span1({scalar_fn({1.0})}, 4)), 1e-12);

    EXPECT_THROW(extract_K(counterexample_space(2, 8), {}), NotNearlyInvariant);
    EXPECT_THROW(extract_K(Subspace::zero(1, 3), {}), PreconditionError);
}

TEST(Synthesize, TrivialCases)
{
    const Subspace k1 = span1({scalar_fn({1.0})}, 0);
    EXPECT_LE(subspace_distance(synthesize_M(k1, {}, {scalar_fn({1.0})}, 4), span1({scalar_fn({0.0, 1.0})}, 4)),
              1e-12);
    const Subspace kz2 = model_space(monomial_inner(2, 2), 2);
    EXPECT_LE(subspace_distance(synthesize_M(kz2, {scalar_fn({1.0})}, {}, 4),
                                span1({scalar_fn({1.0}), scalar_fn({0.0, 1.0})}, 4)),
              1e-12);
}

TEST(Synthesize, RoundtripWithMonomialModelSpace)
{
    // K = K_{diag(z^2, z^2, z^2)} on C^3, r = 2, p = 1, m = 3.
    const MatSymbol t = diag_inner({monomial_inner(2, 2), monomial_inner(2, 2), monomial_inner(2, 2)}, 2);
    const Subspace k = model_space(t, 2);
    const double s = 1.0 / std::numbers::sqrt2;
    const std::vector<CoeffFn> f0 = {monomial(3, 0, 0), monomial(3, 0, 1)};
    // E = (1 + z^4) e3 / sqrt 2 is orthogonal to z k E for k of degree <= 1.
    const std::vector<CoeffFn> e = {s * (monomial(3, 0, 2) + monomial(3, 4, 2))};
    const Subspace m = synthesize_M(k, f0, e, 8);
    EXPECT_TRUE(certify_nearly(m, 1).passed);
    DecompOptions o;
    o.wandering = f0;
    const Subspace back = extract_K(m, e, o);
    EXPECT_LE(subspace_distance(back, embed(k, 8)), 1e-6);
}

TEST(Synthesize, Preconditions)
{
    const Subspace k = model_space(diag_inner({monomial_inner(2, 2), monomial_inner(2, 2)}, 2), 2);
    // Values at 0 of F_0 dependent: z e1 vanishes at 0.
    EXPECT_THROW(synthesize_M(k, {monomial(2, 1, 0)}, {monomial(2, 0, 1)}, 8), PreconditionError);
    // Not enough headroom.
    EXPECT_THROW(synthesize_M(k, {monomial(2, 0, 0)}, {monomial(2, 0, 1)}, 2), PreconditionError);
    // E not normalized.
    EXPECT_THROW(synthesize_M(k, {monomial(2, 0, 0)}, {2.0 * monomial(2, 0, 1)}, 8), PreconditionError);
    EXPECT_THROW(synthesize_M(k, {monomial(2, 0, 0)}, {}, 8), DimensionMismatch);
}

TEST(AlmostInvariant, CorollaryHandExample)
{
    const double s = 1.0 / std::numbers::sqrt2;
    const Subspace m = span1({scalar_fn({s, s})}, 1);
    const CheckResult a = almost_invariant_Sstar_check(m, {});
    EXPECT_FALSE(a.holds);
    // S* W = s; its distance from span{(1+z)/sqrt2} is s * sin(pi/4) = 1/2.
    EXPECT_NEAR(a.residual, 0.5, 1e-12);
    const CheckResult b = almost_invariant_Sstar_check(m, {scalar_fn({s, -s})});
    EXPECT_TRUE(b.holds);
    EXPECT_NEAR(b.residual, 0.0, 1e-12);

    EXPECT_TRUE(almost_invariant_Sstar_check(model_space(monomial_inner(3, 3), 5), {}).holds);
    EXPECT_THROW(almost_invariant_Sstar_check(counterexample_space(1, 4), {}), PreconditionError);
}

TEST(Duality, Examples)
{
    const DualityResult a = duality_check(model_space(monomial_inner(2, 2), 6), {});
    EXPECT_TRUE(a.lhs);
    EXPECT_TRUE(a.rhs);
    const DualityResult b = duality_check(span1({scalar_fn({0.0, 1.0})}, 6), {scalar_fn({1.0})});
    EXPECT_TRUE(b.lhs);
    EXPECT_TRUE(b.rhs);
    const DualityResult c = duality_check(span1({scalar_fn({0.0, 1.0})}, 6), {});
    EXPECT_FALSE(c.lhs);
    EXPECT_FALSE(c.rhs);
}

TEST(Duality, RandomPairsAgree)
{
    std::mt19937_64 gen(43);
    std::normal_distribution<double> g;
    for (int t = 0; t < 30; ++t) {
        CMat x(12, 1 + static_cast<int>(gen() % 5));
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                x(i, j) = {g(gen), g(gen)};
        const Subspace m = span_of_columns(2, 5, x);
        std::vector<CoeffFn> f = defect_of(m, Op::Sstar).defect_basis;
        if (t % 2 && !f.empty())
            f.pop_back();
        EXPECT_TRUE(duality_check(m, f, 1e-8).agree());
    }
}

TEST(Orthocomplement, TrivialCases)
{
    // M = span{z}, E = {1}, K = span{1}.
    const std::vector<MatSymbol> e = {scalar_symbol(scalar_fn({1.0}))};
    const Subspace kperp = complement(span1({scalar_fn({1.0})}, 4));
    const CheckResult one = orthocomplement_membership(scalar_fn({1.0}), std::nullopt, e, kperp);
    EXPECT_TRUE(one.holds);
    const CheckResult z = orthocomplement_membership(scalar_fn({0.0, 1.0}), std::nullopt, e, kperp);
    EXPECT_FALSE(z.holds);
    EXPECT_NEAR(z.residual, 1.0, 1e-12);
    EXPECT_THROW(orthocomplement_membership(scalar_fn({1.0}), std::nullopt, e,
                                            complement(span1({scalar_fn({0.0, 1.0})}, 4))),
                 PreconditionError);
    EXPECT_THROW(orthocomplement_membership(scalar_fn({1.0}), std::nullopt, {}, kperp), PreconditionError);
}
