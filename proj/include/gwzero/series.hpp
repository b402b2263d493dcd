#pragma once

#include "gwzero/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwzero {

/** Parity of each t-variable; odd variables square to zero. */
struct SignRule {
	std::vector<unsigned char> parity; // 1 = odd

	bool operator==(SignRule const &) const = default;
	size_t var_count() const { return parity.size(); }
	bool odd(size_t i) const { return parity[i] != 0; }
};

/**
 * Monomial t_0^{a_0} ... t_m^{a_m} q^beta in canonical variable order.
 * beta is a point of the curve-class lattice (the Novikov exponent).
 */
struct SeriesMonomial {
	std::vector<int32_t> t;
	std::vector<int64_t> beta;

	friend auto operator<=>(SeriesMonomial const &,
	                        SeriesMonomial const &) = default;

	int total_t_degree() const
	{
		return std::accumulate(t.begin(), t.end(), 0);
	}
	int parity(SignRule const &s) const
	{
		int p = 0;
		for (size_t i = 0; i < t.size(); ++i)
			if (s.odd(i))
				p += t[i];
		return p & 1;
	}
};

/**
 * Multiply monomials in canonical order, accumulating the Koszul sign of
 * the reordering. Returns sign 0 when an odd variable would square.
 */
inline std::pair<SeriesMonomial, int>
monomial_mul(SeriesMonomial const &a, SeriesMonomial const &b,
             SignRule const &s)
{
	if (a.t.size() != b.t.size() || a.t.size() != s.var_count())
		throw std::invalid_argument("monomial_mul: variable-count mismatch");
	if (a.beta.size() != b.beta.size())
		throw std::invalid_argument("monomial_mul: lattice-rank mismatch");
	SeriesMonomial r;
	r.t.resize(a.t.size());
	r.beta.resize(a.beta.size());
	// Each t_j of b moves left past the tail t_k (k > j) of a.
	long swaps = 0;
	long odd_tail = 0; // number of odd-variable factors of a right of position j
	for (size_t j = a.t.size(); j-- > 0;)
	{
		if (s.odd(j))
		{
			if (a.t[j] + b.t[j] >= 2)
				return {r, 0};
			swaps += b.t[j] * odd_tail;
			odd_tail += a.t[j];
		}
		r.t[j] = a.t[j] + b.t[j];
	}
	for (size_t i = 0; i < a.beta.size(); ++i)
		r.beta[i] = a.beta[i] + b.beta[i];
	return {r, swaps % 2 == 0 ? +1 : -1};
}

/**
 * Sign of the reordering (t_0 T_0)^{a_0} ... (t_m T_m)^{a_m} into
 * T_0^{a_0}...T_m^{a_m} t_0^{a_0}...t_m^{a_m}, where t_i and T_i share the
 * parity given by the sign rule.
 */
inline int epsilon_sign(std::span<const int32_t> a, SignRule const &s)
{
	if (a.size() != s.var_count())
		throw std::invalid_argument("epsilon_sign: variable-count mismatch");
	long inv = 0;
	long odd_prefix = 0;
	for (size_t i = 0; i < a.size(); ++i)
	{
		if (!s.odd(i))
			continue;
		if (a[i] >= 2)
			throw std::invalid_argument(
			    "epsilon_sign: odd variable with exponent >= 2");
		// t_i inverts against T_i and against every odd T_j with j < i.
		inv += a[i] * (1 + odd_prefix);
		odd_prefix += a[i];
	}
	return inv % 2 == 0 ? +1 : -1;
}

/** Truncation bounds, both inclusive. */
struct SeriesCutoff {
	Rational t_weight_max;     // max weighted t-degree, weight(t_i) = deg_st T_i
	int64_t novikov_max = 0; // max beta . c1

	bool operator==(SeriesCutoff const &) const = default;
	static SeriesCutoff min(SeriesCutoff const &a, SeriesCutoff const &b)
	{
		return {std::min(a.t_weight_max, b.t_weight_max),
		        std::min(a.novikov_max, b.novikov_max)};
	}
};

/** Shared variable data: parities, grading weights and the c1 pairing. */
struct SeriesVars {
	SignRule sign;
	std::vector<Rational> weight;  // deg_st of each variable
	std::vector<int64_t> c1;     // Novikov degree of a lattice generator

	bool operator==(SeriesVars const &) const = default;
	size_t var_count() const { return sign.var_count(); }
	size_t rank() const { return c1.size(); }

	Rational t_weighted_degree(SeriesMonomial const &m) const
	{
		Rational d;
		for (size_t i = 0; i < m.t.size(); ++i)
			if (m.t[i] != 0)
				d += weight[i] * Rational(m.t[i]);
		return d;
	}
	int64_t novikov_degree(SeriesMonomial const &m) const
	{
		int64_t d = 0;
		for (size_t i = 0; i < m.beta.size(); ++i)
			d += c1[i] * m.beta[i];
		return d;
	}
};

/**
 * Sparse supercommutative polynomial in the t-variables and Novikov
 * exponents, exact rational coefficients, explicit truncation order.
 * Immutable in spirit: operations return fresh values.
 */
class TruncatedSeries {
  public:
	TruncatedSeries() = default;
	TruncatedSeries(std::shared_ptr<const SeriesVars> vars, SeriesCutoff cut)
	    : vars_(std::move(vars)), cutoff_(std::move(cut))
	{
	}

	static TruncatedSeries constant(std::shared_ptr<const SeriesVars> vars,
	                                SeriesCutoff cut, Rational c)
	{
		TruncatedSeries s(std::move(vars), std::move(cut));
		SeriesMonomial one;
		one.t.assign(s.vars_->var_count(), 0);
		one.beta.assign(s.vars_->rank(), 0);
		s.add_term(one, std::move(c));
		return s;
	}

	std::shared_ptr<const SeriesVars> vars() const { return vars_; }
	SeriesCutoff const &cutoff() const { return cutoff_; }
	std::map<SeriesMonomial, Rational> const &terms() const { return terms_; }
	bool is_zero() const { return terms_.empty(); }

	/** Accumulate one term; drops zero results and out-of-cutoff monomials. */
	void add_term(SeriesMonomial const &m, Rational c)
	{
		if (c.is_zero() || !within_cutoff(m))
			return;
		auto it = terms_.find(m);
		if (it == terms_.end())
			terms_.emplace(m, std::move(c));
		else
		{
			it->second += c;
			if (it->second.is_zero())
				terms_.erase(it);
		}
	}

	bool within_cutoff(SeriesMonomial const &m) const
	{
		return vars_->t_weighted_degree(m) <= cutoff_.t_weight_max &&
		       vars_->novikov_degree(m) <= cutoff_.novikov_max;
	}

	Rational coefficient(SeriesMonomial const &m) const
	{
		auto it = terms_.find(m);
		return it == terms_.end() ? Rational(0) : it->second;
	}

	/** Total parity if homogeneous, -1 if mixed, 0 for the zero series. */
	int parity() const
	{
		int p = -2;
		for (auto const &[m, c] : terms_)
		{
			int q = m.parity(vars_->sign);
			if (p == -2)
				p = q;
			else if (p != q)
				return -1;
		}
		return p == -2 ? 0 : p;
	}

	TruncatedSeries &operator+=(TruncatedSeries const &o)
	{
		require_same_vars(o);
		cutoff_ = SeriesCutoff::min(cutoff_, o.cutoff_);
		std::erase_if(terms_,
		              [&](auto const &kv) { return !within_cutoff(kv.first); });
		for (auto const &[m, c] : o.terms_)
			add_term(m, c);
		return *this;
	}
	friend TruncatedSeries operator+(TruncatedSeries a,
	                                 TruncatedSeries const &b)
	{
		return a += b;
	}
	friend TruncatedSeries operator-(TruncatedSeries const &a,
	                                 TruncatedSeries const &b)
	{
		return a + (b * Rational(-1));
	}

	friend TruncatedSeries operator*(TruncatedSeries const &a, Rational const &c)
	{
		TruncatedSeries r(a.vars_, a.cutoff_);
		if (c.is_zero())
			return r;
		for (auto const &[m, x] : a.terms_)
			r.terms_.emplace(m, x * c);
		return r;
	}
	friend TruncatedSeries operator*(Rational const &c, TruncatedSeries const &a)
	{
		return a * c;
	}

	friend TruncatedSeries operator*(TruncatedSeries const &a,
	                                 TruncatedSeries const &b)
	{
		a.require_same_vars(b);
		TruncatedSeries r(a.vars_, SeriesCutoff::min(a.cutoff_, b.cutoff_));
		for (auto const &[ma, ca] : a.terms_)
			for (auto const &[mb, cb] : b.terms_)
			{
				auto [m, sg] = monomial_mul(ma, mb, a.vars_->sign);
				if (sg == 0)
					continue;
				r.add_term(m, sg > 0 ? ca * cb : -(ca * cb));
			}
		return r;
	}

	friend bool operator==(TruncatedSeries const &a, TruncatedSeries const &b)
	{
		return *a.vars_ == *b.vars_ && a.terms_ == b.terms_;
	}

	std::string str(std::span<const std::string> names = {}) const;

  private:
	void require_same_vars(TruncatedSeries const &o) const
	{
		if (!vars_ || !o.vars_ || !(*vars_ == *o.vars_))
			throw std::invalid_argument("series over different variable sets");
	}

	std::shared_ptr<const SeriesVars> vars_;
	SeriesCutoff cutoff_;
	std::map<SeriesMonomial, Rational> terms_;
};

/**
 * Formal left derivative with Koszul sign: the derivation is moved past
 * the canonical prefix t_0^{a_0} ... t_{i-1}^{a_{i-1}}.
 */
inline TruncatedSeries partial_derivative(TruncatedSeries const &x, size_t i)
{
	auto vars = x.vars();
	if (i >= vars->var_count())
		throw std::invalid_argument("partial_derivative: variable out of range");
	TruncatedSeries r(vars, x.cutoff());
	for (auto const &[m, c] : x.terms())
	{
		if (m.t[i] == 0)
			continue;
		int prefix_odd = 0;
		if (vars->sign.odd(i))
			for (size_t j = 0; j < i; ++j)
				if (vars->sign.odd(j))
					prefix_odd += m.t[j];
		SeriesMonomial d = m;
		d.t[i] -= 1;
		Rational coeff = c * Rational(m.t[i]);
		r.add_term(d, (prefix_odd & 1) ? -coeff : coeff);
	}
	return r;
}

inline std::string TruncatedSeries::str(std::span<const std::string> names) const
{
	if (terms_.empty())
		return "0";
	std::string out;
	for (auto const &[m, c] : terms_)
	{
		if (!out.empty())
			out += " + ";
		std::string mono;
		for (size_t i = 0; i < m.t.size(); ++i)
		{
			if (m.t[i] == 0)
				continue;
			if (!mono.empty())
				mono += "*";
			mono += i < names.size() ? names[i] : "t" + std::to_string(i);
			if (m.t[i] > 1)
				mono += "^" + std::to_string(m.t[i]);
		}
		bool q = false;
		for (auto b : m.beta)
			q = q || b != 0;
		if (q)
		{
			if (!mono.empty())
				mono += "*";
			mono += "q^(";
			for (size_t i = 0; i < m.beta.size(); ++i)
				mono += (i ? "," : "") + std::to_string(m.beta[i]);
			mono += ")";
		}
		if (mono.empty())
			out += c.str();
		else if (c == Rational(1))
			out += mono;
		else if (c == Rational(-1))
			out += "-" + mono;
		else
			out += "(" + c.str() + ")*" + mono;
	}
	return out;
}

} // namespace gwzero
