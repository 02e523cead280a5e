#include <random>

#include <gtest/gtest.h>

#include <hardy/coeff_fn.hpp>

using namespace hardy;

namespace {

CoeffFn random_fn(std::mt19937_64& gen, int m, int deg)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CMat c(m, deg + 1);
    for (int j = 0; j <= deg; ++j)
        for (int i = 0; i < m; ++i)
            c(i, j) = {u(gen), u(gen)};
    return CoeffFn(c);
}

} // namespace

TEST(CoeffFn, ZeroIsCanonical)
{
    const CoeffFn z(CMat::Zero(3, 5));
    EXPECT_EQ(z.deg(), 0);
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(z, CoeffFn(3));
    EXPECT_EQ(monomial(2, 1) - monomial(2, 1), CoeffFn(2));
}

TEST(CoeffFn, TrailingZerosArePartOfTheValueButCompareEqual)
{
    const CoeffFn f = scalar_fn({1.0, 2.0, 0.0});
    EXPECT_EQ(f.deg(), 2);
    EXPECT_EQ(f.effective_deg(), 1);
    EXPECT_EQ(f, scalar_fn({1.0, 2.0}));
}

TEST(CoeffFn, RejectsNonFinite)
{
    CMat c = CMat::Zero(1, 2);
    c(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(CoeffFn{c}, DomainError);
    EXPECT_THROW(CoeffFn(0), DimensionMismatch);
    EXPECT_THROW(make_fn(2, {{1.0}}), DimensionMismatch);
}

TEST(CoeffFn, InnerProductIsLinearInFirstSlot)
{
    const CoeffFn f = make_fn(2, {{1.0, cplx(0, 1)}, {2.0, 0.0}});
    const CoeffFn g = make_fn(2, {{cplx(0, 1), 1.0}});
    const cplx a(0.5, -2.0);
    EXPECT_NEAR(std::abs(inner_product(a * f, g) - a * inner_product(f, g)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(inner_product(f, a * g) - std::conj(a) * inner_product(f, g)), 0.0, 1e-15);
    // <1 e1 + i e2, i e1 + e2> = 1 * conj(i) + i * 1 = 0
    EXPECT_NEAR(std::abs(inner_product(f, g)), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(f.norm_squared(), 6.0);
}

TEST(CoeffFn, ShiftAndBackshift)
{
    const CoeffFn f = scalar_fn({3.0, 1.0, 2.0});
    EXPECT_EQ(shift(f), scalar_fn({0.0, 3.0, 1.0, 2.0}));
    EXPECT_EQ(backshift(f), scalar_fn({1.0, 2.0}));
    EXPECT_EQ(backshift(shift(f)), f);
    EXPECT_EQ(backshift(constant(CVec::Ones(2))), CoeffFn(2));
}

TEST(CoeffFn, BackshiftIsAdjointOfShiftProperty)
{
    std::mt19937_64 gen(11);
    for (int t = 0; t < 50; ++t) {
        const int m = 1 + static_cast<int>(gen() % 3);
        const CoeffFn f = random_fn(gen, m, static_cast<int>(gen() % 7));
        const CoeffFn g = random_fn(gen, m, static_cast<int>(gen() % 7));
        EXPECT_NEAR(std::abs(inner_product(shift(f), g) - inner_product(f, backshift(g))), 0.0, 1e-12);
        EXPECT_NEAR(shift(f).norm(), f.norm(), 1e-12);
    }
}

TEST(CoeffFn, FlattenLayoutAndRoundtrip)
{
    const CoeffFn f = make_fn(2, {{1.0, 2.0}, {3.0, 4.0}});
    const CVec v = flatten(f, 3);
    ASSERT_EQ(v.size(), 8);
    EXPECT_EQ(v(0), cplx(1.0));
    EXPECT_EQ(v(1), cplx(2.0));
    EXPECT_EQ(v(2), cplx(3.0));
    EXPECT_EQ(v(3), cplx(4.0));
    EXPECT_EQ(unflatten(2, v), f);
    EXPECT_THROW(flatten(f, 0), TruncationOverflow);
    EXPECT_THROW(unflatten(3, v), DimensionMismatch);

    std::mt19937_64 gen(5);
    for (int t = 0; t < 20; ++t) {
        const CoeffFn g = random_fn(gen, 3, 4);
        EXPECT_EQ(unflatten(3, flatten(g, 9)), g);
    }
}

TEST(CoeffFn, EvaluationByHorner)
{
    const CoeffFn f = scalar_fn({1.0, -1.0, 2.0});
    const cplx z(0.5, 0.5);
    EXPECT_NEAR(std::abs(eval_at(f, z)(0) - (1.0 - z + 2.0 * z * z)), 0.0, 1e-15);
    EXPECT_THROW(eval_at(f, 1.5), DomainError);
}

TEST(CoeffFn, TrimStackComponents)
{
    const CoeffFn f = scalar_fn({1.0, 1e-14, 0.0});
    EXPECT_EQ(trim_to(f, 0, 1e-12).deg(), 0);
    EXPECT_THROW(trim_to(f, 0, 1e-16), TruncationOverflow);
    const CoeffFn s = stack({scalar_fn({1.0}), make_fn(2, {{0.0, 1.0}, {2.0, 0.0}})});
    EXPECT_EQ(s.dim(), 3);
    EXPECT_EQ(s.deg(), 1);
    EXPECT_EQ(components(s, 1, 2), make_fn(2, {{0.0, 1.0}, {2.0, 0.0}}));
    EXPECT_THROW(components(s, 2, 2), DimensionMismatch);
}
