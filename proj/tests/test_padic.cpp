#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "padicprop/padic.hpp"
#include "padicprop/random.hpp"

using namespace padicprop;

namespace {

Rational Q(const char* s) { return parse_rational(s); }

// {a}_p by exhaustive search: the u/p^k in [0, 1) such that a - u/p^k has
// no p in its denominator.
Rational frac_by_search(const Rational& a, std::int64_t p)
{
	for (unsigned k = 0; k < 8; ++k) {
		const Integer pk = int_pow(p, k);
		for (Integer u = 0; u < pk; ++u) {
			const Rational r(u, pk);
			if (denominator_of(a - r) % p != 0) return r;
		}
	}
	ADD_FAILURE() << "no fractional part found";
	return Rational(0);
}

// Integral of chi_p(beta x) over |x|_p <= p^N as a sum over cells
// x0 + p^L Z_p on which beta x is constant mod Z_p.
std::complex<double> char_ball_by_cosets(const Rational& beta, int N, std::int64_t p)
{
	int L = 0;
	while (!valuation_at_least(beta * rational_pow(p, L), 0, p)) ++L;
	if (L < -N) L = -N;
	std::complex<double> sum = 0;
	const long cells = int_pow(p, static_cast<unsigned>(N + L)).convert_to<long>();
	for (long k = 0; k < cells; ++k) {
		const Rational x = Rational(k) * rational_pow(p, -N);
		const double turns = frac_by_search(beta * x, p).convert_to<double>();
		sum += std::polar(1.0, 2 * std::numbers::pi * turns);
	}
	return sum * rational_pow(p, -L).convert_to<double>();
}

}  // namespace

TEST(Padic, Valuation)
{
	EXPECT_EQ(valuation(Q("12"), 2), 2);
	EXPECT_FALSE(valuation(Q("0"), 7).has_value());
	EXPECT_EQ(valuation(Q("7/25"), 5), -2);
	EXPECT_EQ(valuation(Q("-3/8"), 3), 1);
}

TEST(Padic, Norm)
{
	EXPECT_EQ(norm_p(Q("12"), PrimeContext(2)), Q("1/4"));
	EXPECT_EQ(norm_p(Q("7/25"), PrimeContext(5)), Q("25"));
	EXPECT_EQ(norm_p(Q("3"), PrimeContext(7)), Q("1"));
	EXPECT_EQ(norm_p(Q("0"), PrimeContext(7)), Q("0"));
}

TEST(Padic, FracPartExamples)
{
	EXPECT_EQ(frac_part(Q("3"), 7), Q("0"));
	EXPECT_EQ(frac_part(Q("1/2"), 2), Q("1/2"));
	EXPECT_EQ(frac_part(Q("-1/3"), 3), Q("2/3"));
	EXPECT_EQ(frac_part(Q("7/25"), 5), Q("7/25"));
	// oracle agreement on the derived examples
	EXPECT_EQ(frac_by_search(Q("-1/3"), 3), Q("2/3"));
	EXPECT_EQ(frac_by_search(Q("7/25"), 5), Q("7/25"));
}

TEST(Padic, FracPartMatchesSearch)
{
	RationalSampler rng(11);
	for (std::int64_t p : {2, 3, 5, 7}) {
		for (int i = 0; i < 60; ++i) {
			const Rational a = rng.with_valuation(p, -3, 2);
			EXPECT_EQ(frac_part(a, p), frac_by_search(a, p)) << to_string(a) << " p=" << p;
		}
	}
}

TEST(Padic, ExpandDigitsExamples)
{
	const PrimeContext ctx(5);
	const auto one = expand_digits(Q("1"), ctx);
	EXPECT_EQ(one.valuation, 0);
	EXPECT_EQ(one.digits[0], 1);
	for (std::size_t i = 1; i < one.digits.size(); ++i) EXPECT_EQ(one.digits[i], 0);

	const auto minus_one = expand_digits(Q("-1"), ctx);
	EXPECT_EQ(minus_one.valuation, 0);
	for (int d : minus_one.digits) EXPECT_EQ(d, 4);
	// 1 + sum 4 * 5^i == 0 mod 5^N
	const Integer modulus = int_pow(5, static_cast<unsigned>(ctx.digit_precision));
	EXPECT_EQ(mod_floor(1 + numerator_of(minus_one.reconstruct()), modulus), 0);

	const auto d = expand_digits(Q("7/25"), ctx);
	EXPECT_EQ(d.valuation, -2);
	EXPECT_EQ(d.digits[0], 2);
	EXPECT_EQ(d.digits[1], 1);
	for (std::size_t i = 2; i < d.digits.size(); ++i) EXPECT_EQ(d.digits[i], 0);
	EXPECT_EQ(to_string(d).substr(0, 10), "-2: 2 1 0 ");
}

TEST(Padic, DigitsOfZero)
{
	const auto z = expand_digits(Q("0"), PrimeContext(3, 4));
	EXPECT_FALSE(z.valuation.has_value());
	EXPECT_EQ(to_string(z), "inf: 0 0 0 0");
}

TEST(Padic, ReconstructionProperty)
{
	RationalSampler rng(5);
	for (std::int64_t p : {2, 3, 5, 7, 11}) {
		const PrimeContext ctx(p, 20);
		for (int i = 0; i < 50; ++i) {
			const Rational a = rng.with_valuation(p, -4, 4);
			const auto d = expand_digits(a, ctx);
			for (int x : d.digits) {
				EXPECT_GE(x, 0);
				EXPECT_LT(x, p);
			}
			EXPECT_NE(d.digits[0], 0);
			// a - reconstruction has valuation >= nu + N
			EXPECT_TRUE(valuation_at_least(a - d.reconstruct(), *d.valuation + ctx.digit_precision, p));
		}
	}
}

TEST(Padic, CharIntegralBallExamples)
{
	const PrimeContext ctx(5);
	EXPECT_EQ(char_integral_ball(Q("0"), 3, ctx), Q("125"));
	EXPECT_EQ(char_integral_ball(Q("1/25"), 1, ctx), Q("0"));
	EXPECT_EQ(char_integral_ball(Q("5"), 1, ctx), Q("5"));
	EXPECT_NEAR(std::abs(char_ball_by_cosets(Q("1/25"), 1, 5)), 0.0, 1e-12);
	EXPECT_NEAR(std::abs(char_ball_by_cosets(Q("5"), 1, 5) - 5.0), 0.0, 1e-12);
	// beta = 1 on |x| <= 5 still oscillates
	EXPECT_EQ(char_integral_ball(Q("1"), 1, ctx), Q("0"));
	EXPECT_NEAR(std::abs(char_ball_by_cosets(Q("1"), 1, 5)), 0.0, 1e-12);
}

TEST(Padic, CharIntegralBallMatchesCosetSum)
{
	RationalSampler rng(17);
	for (std::int64_t p : {2, 3, 5}) {
		const PrimeContext ctx(p);
		for (int i = 0; i < 25; ++i) {
			const Rational beta = rng.with_valuation(p, -3, 3);
			const int N = static_cast<int>(rng.uniform(-2, 2));
			const double exact = char_integral_ball(beta, N, ctx).convert_to<double>();
			EXPECT_NEAR(std::abs(char_ball_by_cosets(beta, N, p) - exact), 0.0, 1e-9)
				<< to_string(beta) << " N=" << N << " p=" << p;
		}
	}
}

TEST(Padic, CharIntegralBallRange)
{
	const PrimeContext ctx(3, 32, 4);
	EXPECT_THROW(char_integral_ball(Q("1"), 5, ctx), Error);
	EXPECT_THROW(char_integral_ball(Q("1"), -5, ctx), Error);
	EXPECT_NO_THROW(char_integral_ball(Q("1"), 4, ctx));
}

TEST(Padic, PrimeContextRejectsComposite)
{
	EXPECT_THROW(PrimeContext(9), Error);
	EXPECT_THROW(PrimeContext(1), Error);
	try {
		PrimeContext bad(15);
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), ErrorCode::not_prime);
		EXPECT_NE(std::string(e.what()).find("prime"), std::string::npos);
	}
}

TEST(Padic, NormProperties)
{
	RationalSampler rng(23);
	for (std::int64_t p : {2, 3, 5, 7}) {
		const PrimeContext ctx(p);
		for (int i = 0; i < 100; ++i) {
			const Rational a = rng.with_valuation(p, -4, 4);
			const Rational b = rng.coin() ? rng.with_valuation(p, -4, 4) : -a + rng.with_valuation(p, 0, 6);
			const Rational na = norm_p(a, ctx), nb = norm_p(b, ctx), nab = norm_p(a + b, ctx);
			// ultrametric, with equality for distinct norms
			EXPECT_LE(nab, std::max(na, nb));
			if (na != nb) {
				EXPECT_EQ(nab, std::max(na, nb));
			}
			EXPECT_EQ(norm_p(a * b, ctx), na * nb);
			// fractional-part soundness and additivity mod 1
			EXPECT_TRUE(valuation_at_least(a - frac_part(a, p), 0, p));
			const Rational defect = frac_part(a + b, p) - frac_part(a, p) - frac_part(b, p);
			EXPECT_EQ(denominator_of(defect), 1);
		}
	}
}

TEST(Padic, ProductFormula)
{
	RationalSampler rng(29);
	for (int i = 0; i < 100; ++i) {
		const Rational a = rng.any_nonzero(5000);
		Rational product = abs(a);
		Integer n = abs(Rational(numerator_of(a))).convert_to<Integer>() * denominator_of(a);
		for (std::int64_t p = 2; n > 1; ++p) {
			if (!is_prime(p) || n % p != 0) continue;
			remove_factor(n, p);
			product *= norm_p(a, PrimeContext(p));
		}
		EXPECT_EQ(product, 1) << to_string(a);
	}
}
