#include <random>

#include <gtest/gtest.h>

#include <hardy/inner.hpp>

#include "oracles.hpp"

using namespace hardy;

namespace {

oracle::Poly to_poly(const CoeffFn& f)
{
    oracle::Poly p;
    for (int n = 0; n <= f.deg(); ++n)
        p.push_back(f.coeffs()(0, n));
    return p;
}

CoeffFn random_fn(std::mt19937_64& gen, int m, int deg)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMat c(m, deg + 1);
    for (int j = 0; j <= deg; ++j)
        for (int i = 0; i < m; ++i)
            c(i, j) = {u(gen), u(gen)};
    return CoeffFn(c);
}

MatSymbol random_symbol(std::mt19937_64& gen, int mo, int mi, int deg)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<CMat> mats;
    for (int k = 0; k <= deg; ++k) {
        CMat a(mo, mi);
        for (int i = 0; i < mo; ++i)
            for (int j = 0; j < mi; ++j)
                a(i, j) = {u(gen), u(gen)};
        mats.push_back(a);
    }
    return MatSymbol(mo, mi, mats, 0.0, false);
}

} // namespace

TEST(Symbol, ScalarMultiplierMatchesSamplingOracle)
{
    std::mt19937_64 gen(3);
    for (int t = 0; t < 30; ++t) {
        const CoeffFn th = random_fn(gen, 1, static_cast<int>(gen() % 6));
        const CoeffFn f = random_fn(gen, 1, static_cast<int>(gen() % 6));
        const CoeffFn got = apply_multiplier(scalar_symbol(th), f);
        const oracle::Poly want = oracle::product_by_sampling(to_poly(th), to_poly(f));
        ASSERT_EQ(static_cast<std::size_t>(got.deg() + 1), want.size());
        for (int n = 0; n <= got.deg(); ++n)
            EXPECT_NEAR(std::abs(got.coeffs()(0, n) - want[static_cast<std::size_t>(n)]), 0.0, 1e-12);
    }
}

TEST(Symbol, MatrixMultiplierEvaluatesPointwise)
{
    std::mt19937_64 gen(4);
    const MatSymbol t = random_symbol(gen, 3, 2, 3);
    const CoeffFn f = random_fn(gen, 2, 4);
    const CoeffFn g = apply_multiplier(t, f);
    for (const cplx z : {cplx(0.3, 0.1), cplx(-0.7, 0.2), cplx(0.0, 0.9)})
        EXPECT_NEAR((eval_at(g, z) - t.eval(z) * eval_at(f, z)).norm(), 0.0, 1e-12);
    EXPECT_THROW(apply_multiplier(t, random_fn(gen, 3, 1)), DimensionMismatch);
}

TEST(Symbol, AdjointIdentityProperty)
{
    std::mt19937_64 gen(9);
    for (int t = 0; t < 40; ++t) {
        const int mo = 1 + static_cast<int>(gen() % 3);
        const int mi = 1 + static_cast<int>(gen() % 3);
        const MatSymbol th = random_symbol(gen, mo, mi, static_cast<int>(gen() % 4));
        const CoeffFn f = random_fn(gen, mi, static_cast<int>(gen() % 5));
        const CoeffFn g = random_fn(gen, mo, static_cast<int>(gen() % 9));
        EXPECT_NEAR(std::abs(inner_product(apply_multiplier(th, f), g) - inner_product(f, adjoint_apply(th, g))),
                    0.0, 1e-11);
    }
}

TEST(Symbol, ToeplitzMatrixAgreesWithMultiplier)
{
    std::mt19937_64 gen(2);
    const MatSymbol t = random_symbol(gen, 2, 2, 3);
    const int n = 10;
    const CMat a = toeplitz_matrix(t, n);
    for (int trial = 0; trial < 5; ++trial) {
        const CoeffFn f = random_fn(gen, 2, 6);
        const CVec want = flatten(apply_multiplier(t, f, n), n);
        EXPECT_NEAR((a * flatten(f, n) - want).norm(), 0.0, 1e-12);
    }
    // Brute force: block (i, j) is Theta_{i-j}.
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const CMat want = i >= j ? t.at(i - j) : CMat::Zero(2, 2);
            EXPECT_EQ(a.block(2 * i, 2 * j, 2, 2), want);
        }
}

TEST(Symbol, CommutesWithShift)
{
    std::mt19937_64 gen(1);
    const MatSymbol t = random_symbol(gen, 2, 3, 2);
    EXPECT_TRUE(commutes_with_shift(t, 8, 1e-12));
    CMat bad = toeplitz_matrix(t, 8);
    bad(5, 4) += 1.0;
    EXPECT_FALSE(commutes_with_shift(bad, 2, 3, 8, 5, 1e-12));
    EXPECT_THROW(commutes_with_shift(t, 3, 1e-12), PreconditionError);
}

TEST(Symbol, MultiplyIsCompositionAndTracksTail)
{
    std::mt19937_64 gen(6);
    const MatSymbol a = random_symbol(gen, 2, 3, 2);
    const MatSymbol b = random_symbol(gen, 3, 2, 3);
    const CoeffFn f = random_fn(gen, 2, 3);
    EXPECT_NEAR((apply_multiplier(multiply(a, b), f) - apply_multiplier(a, apply_multiplier(b, f))).norm(), 0.0,
                1e-12);
    const MatSymbol cut = multiply(a, b, 2);
    EXPECT_EQ(cut.deg(), 2);
    double dropped = 0.0;
    const MatSymbol full = multiply(a, b);
    for (int k = 3; k <= full.deg(); ++k)
        dropped += op_norm(full.at(k));
    EXPECT_NEAR(cut.tail_bound(), dropped, 1e-12);
}

TEST(Symbol, ColumnsAndColumnDegree)
{
    const MatSymbol t = symbol_from_columns({scalar_fn({1.0}), scalar_fn({0.0, 0.0, 2.0})});
    EXPECT_EQ(t.m_out(), 1);
    EXPECT_EQ(t.m_in(), 2);
    EXPECT_EQ(t.column_deg(0), 0);
    EXPECT_EQ(t.column_deg(1), 2);
    EXPECT_EQ(t.column(1), scalar_fn({0.0, 0.0, 2.0}));
}
