#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gwzero {

using BigInt = boost::multiprecision::mpz_int;

/**
 * Exact rational number, always reduced with positive denominator.
 * The whole engine computes in these; no floating point anywhere.
 */
class Rational {
  public:
	Rational() : v_(0) {}
	Rational(long long n) : v_(n) {}
	Rational(int n) : v_(n) {}
	Rational(long n) : v_(static_cast<long long>(n)) {}
	Rational(BigInt n) : v_(std::move(n)) {}
	Rational(BigInt num, BigInt den)
	{
		if (den == 0)
			throw std::invalid_argument("rational with zero denominator");
		v_.assign(boost::multiprecision::mpq_rational(std::move(num),
		                                              std::move(den)));
		canonicalize();
	}

	/** Parse "p" or "p/q". Rejects q == 0 and any trailing garbage. */
	static Rational parse(std::string_view s)
	{
		auto slash = s.find('/');
		try
		{
			if (slash == std::string_view::npos)
				return Rational(BigInt(std::string(s)));
			BigInt num{std::string(s.substr(0, slash))};
			BigInt den{std::string(s.substr(slash + 1))};
			return Rational(std::move(num), std::move(den));
		}
		catch (std::invalid_argument const &)
		{
			throw;
		}
		catch (std::exception const &)
		{
			throw std::invalid_argument("malformed rational '" +
			                            std::string(s) + "'");
		}
	}

	/** Canonical rendering: "p" when the denominator is 1, else "p/q". */
	std::string str() const
	{
		if (denominator(v_) == 1)
			return numerator(v_).str();
		return numerator(v_).str() + "/" + denominator(v_).str();
	}

	BigInt num() const { return BigInt(numerator(v_)); }
	BigInt den() const { return BigInt(denominator(v_)); }

	bool is_zero() const { return v_.is_zero(); }
	bool is_integer() const { return denominator(v_) == 1; }
	int sign() const { return v_.sign(); }

	Rational &operator+=(Rational const &o)
	{
		v_ += o.v_;
		return *this;
	}
	Rational &operator-=(Rational const &o)
	{
		v_ -= o.v_;
		return *this;
	}
	Rational &operator*=(Rational const &o)
	{
		v_ *= o.v_;
		return *this;
	}
	Rational &operator/=(Rational const &o)
	{
		if (o.is_zero())
			throw std::invalid_argument("rational division by zero");
		v_ /= o.v_;
		return *this;
	}

	friend Rational operator+(Rational a, Rational const &b) { return a += b; }
	friend Rational operator-(Rational a, Rational const &b) { return a -= b; }
	friend Rational operator*(Rational a, Rational const &b) { return a *= b; }
	friend Rational operator/(Rational a, Rational const &b) { return a /= b; }
	Rational operator-() const
	{
		Rational r;
		r.v_ = -v_;
		return r;
	}

	friend bool operator==(Rational const &a, Rational const &b)
	{
		return a.v_ == b.v_;
	}
	friend std::strong_ordering operator<=>(Rational const &a,
	                                        Rational const &b)
	{
		if (a.v_ < b.v_)
			return std::strong_ordering::less;
		if (a.v_ > b.v_)
			return std::strong_ordering::greater;
		return std::strong_ordering::equal;
	}

	/** n! as an exact integer. */
	static Rational factorial(unsigned n)
	{
		BigInt r = 1;
		for (unsigned k = 2; k <= n; ++k)
			r *= k;
		return Rational(std::move(r));
	}

	/** Binomial coefficient C(n, k), 0 outside the triangle. */
	static Rational binomial(long long n, long long k)
	{
		if (k < 0 || k > n)
			return Rational(0);
		BigInt r = 1;
		for (long long i = 0; i < k; ++i)
		{
			r *= BigInt(n - i);
			r /= BigInt(i + 1);
		}
		return Rational(std::move(r));
	}

  private:
	// GMP requires canonical form before arithmetic; enforce it on the raw
	// construction paths.
	void canonicalize() { mpq_canonicalize(v_.backend().data()); }

	boost::multiprecision::mpq_rational v_;
};

} // namespace gwzero
