#include <gtest/gtest.h>

#include "padicprop/exact_complex.hpp"
#include "padicprop/random.hpp"

using namespace padicprop;

namespace {

Rational Q(const char* s) { return parse_rational(s); }

ExactComplex random_value(RationalSampler& rng, std::int64_t p)
{
	const Rational s = abs(rng.with_valuation(p, -3, 3));
	return ExactComplex(p, s, rng.uniform(-5, 5), PhaseFraction(Rational(rng.uniform(0, 63), 64)));
}

}  // namespace

TEST(PhaseFraction, ReducesModOne)
{
	EXPECT_EQ(PhaseFraction(Q("-1/3")).turns(), Q("2/3"));
	EXPECT_EQ(PhaseFraction(Q("7/3")).turns(), Q("1/3"));
	EXPECT_TRUE(PhaseFraction(Q("5")).is_zero());
	EXPECT_EQ((PhaseFraction(Q("3/4")) + PhaseFraction(Q("1/2"))).turns(), Q("1/4"));
	EXPECT_EQ((-PhaseFraction(Q("1/8"))).turns(), Q("7/8"));
}

TEST(ExactComplex, CanonicalForm)
{
	const ExactComplex a(5, Q("1/5"), 1);
	EXPECT_EQ(a.scalar(), Q("1"));
	EXPECT_EQ(a.half_power(), -1);
	EXPECT_EQ(a, ExactComplex(5, Q("1"), -1));

	const ExactComplex b(5, Q("50"), 0);
	EXPECT_EQ(b.scalar(), Q("2"));
	EXPECT_EQ(b.half_power(), 4);

	const ExactComplex z(3, Q("0"), 7, PhaseFraction(Q("1/3")));
	EXPECT_TRUE(z.is_zero());
	EXPECT_EQ(z.half_power(), 0);
	EXPECT_TRUE(z.phase().is_zero());
	EXPECT_EQ(z, ExactComplex::zero(3));

	EXPECT_THROW(ExactComplex(3, Q("-1")), Error);
}

TEST(ExactComplex, SqrtPSquaredIsP)
{
	const ExactComplex root(7, Q("1"), 1);
	EXPECT_EQ(root * root, ExactComplex(7, Q("7")));
	EXPECT_EQ((root * root).modulus_squared(), Q("49"));
}

TEST(ExactComplex, AlgebraicProperties)
{
	RationalSampler rng(3);
	for (std::int64_t p : {2, 3, 5, 7}) {
		for (int i = 0; i < 100; ++i) {
			const auto x = random_value(rng, p), y = random_value(rng, p), z = random_value(rng, p);
			EXPECT_EQ((x * y) * z, x * (y * z));
			EXPECT_EQ(x * y, y * x);
			EXPECT_EQ((x * y).modulus_squared(), x.modulus_squared() * y.modulus_squared());
			EXPECT_EQ(x.conj().conj(), x);
			EXPECT_EQ((x * x.conj()).phase(), PhaseFraction());
			EXPECT_EQ((x * y) / y, x);
			EXPECT_NEAR(std::abs((x * y).approx() - x.approx() * y.approx()), 0.0L,
			            1e-12L * std::abs(x.approx() * y.approx()) + 1e-15L);
		}
	}
}

TEST(ExactComplex, PrimeMismatchThrows)
{
	EXPECT_THROW(ExactComplex::one(2) * ExactComplex::one(3), Error);
}

TEST(ExactComplex, RenderAndJson)
{
	const ExactComplex v(5, Q("3/2"), -1, PhaseFraction(Q("1/8")));
	EXPECT_EQ(to_string(v), "3/2 · 5^(-1/2) · e^(2πi·1/8)");
	const auto j = to_json(v);
	EXPECT_EQ(j["scalar"], "3/2");
	EXPECT_EQ(j["half_power"], -1);
	EXPECT_EQ(j["phase_num"], "1");
	EXPECT_EQ(j["phase_den"], "8");
	EXPECT_EQ(j["prime"], 5);
	EXPECT_EQ(exact_complex_from_json(j), v);
}

TEST(ExactComplex, Approx)
{
	const ExactComplex i4(2, Q("1"), 0, PhaseFraction(Q("1/4")));
	EXPECT_NEAR(static_cast<double>(i4.approx().real()), 0.0, 1e-15);
	EXPECT_NEAR(static_cast<double>(i4.approx().imag()), 1.0, 1e-15);
	const ExactComplex inv_sqrt5(5, Q("1"), -1);
	EXPECT_NEAR(static_cast<double>(inv_sqrt5.approx().real()), 1.0 / std::sqrt(5.0), 1e-15);
	EXPECT_EQ(to_string(ApproxComplex{0.5L, -0.25L}), "0.5 - 0.25·i");
}
