#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "padicprop/characters.hpp"
#include "padicprop/oracle.hpp"
#include "padicprop/random.hpp"

using namespace padicprop;

namespace {

Rational Q(const char* s) { return parse_rational(s); }

PhaseFraction eighth(int k) { return PhaseFraction::eighths(k); }

}  // namespace

TEST(Chi, Examples)
{
	EXPECT_TRUE(chi_p(Q("3"), PrimeContext(7)).is_zero());
	EXPECT_EQ(chi_p(Q("1/5"), PrimeContext(5)).turns(), Q("1/5"));
	EXPECT_EQ(chi_p(Q("-1/3"), PrimeContext(3)).turns(), Q("2/3"));
}

TEST(Chi, Homomorphism)
{
	RationalSampler rng(41);
	for (std::int64_t p : {2, 3, 5, 7, 11}) {
		const PrimeContext ctx(p);
		for (int i = 0; i < 100; ++i) {
			const Rational a = rng.with_valuation(p, -4, 4), b = rng.with_valuation(p, -4, 4);
			EXPECT_EQ(chi_p(a + b, ctx), chi_p(a, ctx) + chi_p(b, ctx));
		}
	}
}

TEST(Lambda, Examples)
{
	for (std::int64_t p : {2, 3, 5, 7, 11}) {
		const PrimeContext ctx(p);
		EXPECT_EQ(lambda_p(Q("0"), ctx), ExactComplex::one(p));
		RationalSampler rng(p);
		for (int i = 0; i < 20; ++i) {
			const Rational x = rng.with_valuation(p, -4, 4);
			EXPECT_EQ(lambda_p(4 * x, ctx), lambda_p(x, ctx));
		}
	}
	const PrimeContext ctx5(5);
	const ExactComplex l = lambda_p(Q("1/5"), ctx5);
	EXPECT_EQ(l.modulus_squared(), 1);
	EXPECT_EQ(denominator_of(l.phase().turns() * 8), 1);
	const auto oracle = lambda_oracle(Q("1/5"), ctx5);
	EXPECT_LT(oracle.deviation, 1e-9L);
	EXPECT_EQ(l.phase(), eighth(oracle.eighths));
}

TEST(Lambda, KnownValues)
{
	// 1/p: the classical Gauss sum sqrt(p) for p = 1 mod 4, i sqrt(p) for p = 3 mod 4
	EXPECT_EQ(lambda_p(Q("1/5"), PrimeContext(5)).phase(), eighth(0));
	EXPECT_EQ(lambda_p(Q("1/3"), PrimeContext(3)).phase(), eighth(2));
	EXPECT_EQ(lambda_p(Q("2/3"), PrimeContext(3)).phase(), eighth(6));
	EXPECT_EQ(lambda_p(Q("2/5"), PrimeContext(5)).phase(), eighth(4));
	EXPECT_EQ(lambda_p(Q("1"), PrimeContext(2)).phase(), eighth(1));
	EXPECT_EQ(lambda_p(Q("3"), PrimeContext(2)).phase(), eighth(7));
	EXPECT_EQ(lambda_p(Q("6"), PrimeContext(2)).phase(), eighth(3));
	EXPECT_EQ(lambda_p(Q("10"), PrimeContext(2)).phase(), eighth(5));
}

// Every branch of the table against the Gauss-sum oracle.
TEST(Lambda, TableMatchesGaussSumOracle)
{
	for (std::int64_t p : {2, 3, 5, 7, 11}) {
		const PrimeContext ctx(p);
		const std::int64_t units = p == 2 ? 16 : p;
		for (std::int64_t v = -3; v <= 3; ++v) {
			for (std::int64_t u = 1; u < units; ++u) {
				if (u % p == 0) continue;
				for (int sign : {1, -1}) {
					const Rational a = Rational(sign * u) * rational_pow(p, v);
					const auto oracle = lambda_oracle(a, ctx);
					EXPECT_LT(oracle.deviation, 1e-9L) << to_string(a) << " p=" << p;
					EXPECT_EQ(lambda_eighths(a, ctx), oracle.eighths) << to_string(a) << " p=" << p;
				}
			}
		}
	}
}

TEST(Lambda, FunctionalEquations)
{
	for (std::int64_t p : {2, 3, 5, 7, 11}) {
		const PrimeContext ctx(p);
		RationalSampler rng(7, "lambda-test", p);
		for (int i = 0; i < 200; ++i) {
			const Rational x = rng.with_valuation(p, -4, 4), y = rng.with_valuation(p, -4, 4);
			const Rational a = rng.with_valuation(p, -4, 4);
			EXPECT_EQ(lambda_p(a * a * x, ctx), lambda_p(x, ctx));
			EXPECT_EQ(lambda_p(x, ctx).conj() * lambda_p(x, ctx), ExactComplex::one(p));
			if (x + y != 0) {
				EXPECT_EQ(lambda_p(x, ctx) * lambda_p(y, ctx), lambda_p(x + y, ctx) * lambda_p(1 / x + 1 / y, ctx))
					<< to_string(x) << ", " << to_string(y) << " p=" << p;
			}
		}
	}
}

TEST(Lambda, FaultShiftsPhase)
{
	PrimeContext ctx(5);
	const auto clean = lambda_p(Q("2/5"), ctx);
	ctx.faults.lambda_eighths = 1;
	EXPECT_EQ(lambda_p(Q("2/5"), ctx), clean * ExactComplex::unit(5, eighth(1)));
	EXPECT_EQ(lambda_p(Q("0"), ctx), ExactComplex::one(5));
}

TEST(GaussIntegral, Examples)
{
	const PrimeContext ctx(5);
	EXPECT_EQ(gauss_integral(Q("1"), Q("0"), ctx), lambda_p(Q("1"), ctx));

	const ExactComplex g = gauss_integral(Q("1/5"), Q("0"), ctx);
	EXPECT_EQ(g.scalar(), 1);
	EXPECT_EQ(g.half_power(), -1);
	EXPECT_EQ(g.phase(), lambda_p(Q("1/5"), ctx).phase());
	const auto oracle = gauss_integral_oracle(Q("1/5"), Q("0"), ctx);
	EXPECT_LT(std::abs(oracle.value - g.approx()), 1e-9L);

	EXPECT_THROW(gauss_integral(Q("0"), Q("1"), ctx), Error);
}

TEST(GaussIntegral, ModulusIsNormOfTwoAlpha)
{
	RationalSampler rng(13);
	for (std::int64_t p : {2, 3, 5, 7}) {
		const PrimeContext ctx(p);
		for (int i = 0; i < 50; ++i) {
			const Rational alpha = rng.with_valuation(p, -4, 4), beta = rng.with_valuation(p, -4, 4);
			EXPECT_EQ(gauss_integral(alpha, beta, ctx).modulus_squared(), 1 / norm_p(2 * alpha, ctx));
		}
	}
}

TEST(BallGaussIntegral, ExactRegimesMatchCosetSums)
{
	RationalSampler rng(101);
	int exact_cases = 0;
	for (std::int64_t p : {2, 3, 5, 7}) {
		const PrimeContext ctx(p);
		for (int i = 0; i < 150; ++i) {
			const Rational alpha = rng.with_valuation(p, -4, 3);
			const Rational beta = rng.coin() ? rng.with_valuation(p, -3, 3) : Rational(0);
			const Rational center = rng.coin() ? rng.with_valuation(p, -2, 2) : Rational(0);
			const std::int64_t N = rng.uniform(-2, 2);
			const auto exact = ball_gauss_integral(alpha, beta, center, N, ctx);
			if (!exact) continue;
			++exact_cases;
			const auto oracle = ball_gauss_oracle(alpha, beta, center, N, ctx);
			EXPECT_LT(std::abs(oracle - exact->approx()), 1e-9L)
				<< "alpha=" << to_string(alpha) << " beta=" << to_string(beta) << " c=" << to_string(center)
				<< " N=" << N << " p=" << p;
		}
	}
	EXPECT_GT(exact_cases, 500);
}

TEST(BallGaussIntegral, TwoAdicBoundaryVanishes)
{
	// valuation(alpha) = 2N - 1 with the critical point inside the ball
	const PrimeContext ctx(2);
	const auto v = ball_gauss_integral(Q("1/2"), Q("0"), Q("0"), 0, ctx);
	ASSERT_TRUE(v.has_value());
	EXPECT_TRUE(v->is_zero());
	EXPECT_LT(std::abs(ball_gauss_oracle(Q("1/2"), Q("0"), Q("0"), 0, ctx)), 1e-15L);
}
