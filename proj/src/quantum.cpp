#include "gwzero/quantum.hpp"
#include "gwzero/reconstruct.hpp"

#include <json.hpp>

#include <functional>

namespace gwzero {

namespace {

SeriesCutoff potential_cutoff(GwTarget const &t, int64_t max_c1, int max_n)
{
	// every selection-rule-compatible monomial with n <= max_n has
	// weighted degree at most 2(dim + max_c1) + 2(max_n - 3); triple
	// products of third partials stay within three times that, so the
	// weight bound never cuts into the (max_c1, max_n) window
	Rational w = Rational(2 * t.dim) + Rational(2) * Rational(max_c1) +
	             Rational(2 * (max_n - 3));
	return {w * Rational(3), max_c1};
}

/** Iterate exponent vectors a with |a| = n; odd variables capped at 1. */
void enumerate_exponents(GwTarget const &t, int n,
                         std::function<void(std::vector<int32_t> const &)> const &f)
{
	int m = t.class_count();
	std::vector<int32_t> a(m, 0);
	std::function<void(int, int)> rec = [&](int i, int left) {
		if (i == m - 1)
		{
			if (t.parity(m - 1) && left > 1)
				return;
			a[m - 1] = left;
			f(a);
			return;
		}
		int cap = t.parity(i) ? std::min(left, 1) : left;
		for (a[i] = 0; a[i] <= cap; ++a[i])
			rec(i + 1, left - a[i]);
		a[i] = 0;
	};
	if (m == 1)
	{
		if (!(t.parity(0) && n > 1))
		{
			a[0] = n;
			f(a);
		}
		return;
	}
	rec(0, n);
}

std::vector<int> exponents_to_classes(std::vector<int32_t> const &a)
{
	std::vector<int> ids;
	for (size_t i = 0; i < a.size(); ++i)
		ids.insert(ids.end(), a[i], static_cast<int>(i));
	return ids;
}

Rational exponents_factorial(std::vector<int32_t> const &a)
{
	Rational f(1);
	for (auto e : a)
		f *= Rational::factorial(e);
	return f;
}

Rational table_value(GwTarget const &t, CorrelatorTable const &table,
                     CorrelatorKey const &key)
{
	auto red = reduce_full(t, key);
	if (red.is_value)
		return red.value;
	return red.multiplier * get_or_fail(table, red.residual);
}

} // namespace

Potential build_potential(GwTarget const &t, CorrelatorTable const &table,
                          int64_t max_c1, int max_n)
{
	Potential p;
	p.target = &t;
	p.vars = t.series_vars();
	p.max_c1 = max_c1;
	p.max_n = std::max(max_n, 3);
	p.series = TruncatedSeries(p.vars, potential_cutoff(t, max_c1, p.max_n));

	auto sign_rule = p.vars->sign;
	for (auto const &beta : effective_classes_up_to(t, max_c1))
	{
		for (int n = 3; n <= p.max_n; ++n)
		{
			Rational selection = selection_degree(t, n, beta);
			enumerate_exponents(t, n, [&](std::vector<int32_t> const &a) {
				Rational total;
				for (size_t i = 0; i < a.size(); ++i)
					if (a[i])
						total += t.st(static_cast<int>(i)) * Rational(a[i]);
				if (total != selection)
					return;
				CorrelatorKey key{beta, exponents_to_classes(a), +1};
				Rational v = table_value(t, table, key);
				if (v.is_zero())
					return;
				int eps = epsilon_sign(a, sign_rule);
				Rational coeff = v / exponents_factorial(a);
				SeriesMonomial mono{a, beta};
				p.series.add_term(mono, eps > 0 ? coeff : -coeff);
			});
		}
	}
	return p;
}

TruncatedSeries third_partial(Potential const &p, int i, int j, int h)
{
	return partial_derivative(
	    partial_derivative(partial_derivative(p.series, h), j), i);
}

TruncatedSeries third_partial_direct(Potential const &p,
                                     CorrelatorTable const &table, int i,
                                     int j, int h)
{
	GwTarget const &t = *p.target;
	TruncatedSeries out(p.vars, p.series.cutoff());
	auto const &sign_rule = p.vars->sign;

	// Koszul sign of a left derivative by variable k applied to t^b.
	auto left_sign = [&](std::vector<int32_t> const &b, int k) {
		if (!sign_rule.odd(k))
			return +1;
		int pre = 0;
		for (int r = 0; r < k; ++r)
			if (sign_rule.odd(r))
				pre += b[r];
		return (pre & 1) ? -1 : +1;
	};

	for (auto const &beta : effective_classes_up_to(t, p.max_c1))
	{
		for (int n = 0; n + 3 <= p.max_n; ++n)
		{
			enumerate_exponents(t, n, [&](std::vector<int32_t> const &a) {
				auto b = a;
				++b[i], ++b[j], ++b[h];
				for (size_t k = 0; k < b.size(); ++k)
					if (sign_rule.odd(k) && b[k] > 1)
						return; // odd square, the correlator vanishes
				std::vector<int> ids = exponents_to_classes(b);
				Rational v = table_value(t, table,
				                         CorrelatorKey{beta, std::move(ids), +1});
				if (v.is_zero())
					return;
				// eps(b) together with the three left-derivative signs;
				// all +1 for even classes, where this is the plain
				// third-derivative identity
				int sgn = epsilon_sign(b, sign_rule);
				sgn *= left_sign(b, h);
				--b[h];
				sgn *= left_sign(b, j);
				--b[j];
				sgn *= left_sign(b, i);
				Rational coeff = v / exponents_factorial(a);
				out.add_term(SeriesMonomial{a, beta},
				             sgn > 0 ? coeff : -coeff);
			});
		}
	}
	return out;
}

QuantumElement basis_element(Potential const &p, int i)
{
	QuantumElement x;
	int m = p.target->class_count();
	SeriesCutoff cut = p.series.cutoff();
	for (int k = 0; k < m; ++k)
		x.coeff.push_back(TruncatedSeries::constant(
		    p.vars, cut, Rational(k == i ? 1 : 0)));
	return x;
}

QuantumElement quantum_mul(Potential const &p, QuantumElement const &x,
                           QuantumElement const &y)
{
	GwTarget const &t = *p.target;
	int m = t.class_count();
	if (static_cast<int>(x.coeff.size()) != m ||
	    static_cast<int>(y.coeff.size()) != m)
		throw std::invalid_argument("quantum_mul: wrong element length");
	if (!(x.coeff[0].cutoff() == y.coeff[0].cutoff()))
		throw std::invalid_argument("quantum_mul: cutoff mismatch");

	QuantumElement out;
	SeriesCutoff cut =
	    SeriesCutoff::min(x.coeff[0].cutoff(), y.coeff[0].cutoff());
	for (int k = 0; k < m; ++k)
		out.coeff.push_back(TruncatedSeries(p.vars, cut));

	auto diag = diagonal_class(t);
	for (int a = 0; a < m; ++a)
	{
		if (x.coeff[a].is_zero())
			continue;
		for (int b = 0; b < m; ++b)
		{
			if (y.coeff[b].is_zero())
				continue;
			TruncatedSeries xy = x.coeff[a] * y.coeff[b];
			if (xy.is_zero())
				continue;
			for (auto const &[e, f, gef] : diag)
			{
				TruncatedSeries d3 = third_partial(p, a, b, e);
				if (d3.is_zero())
					continue;
				out.coeff[f] += xy * d3 * gef;
			}
		}
	}
	return out;
}

QuantumElement evaluate_t(QuantumElement const &x,
                          std::vector<Rational> const &t_point)
{
	QuantumElement out;
	for (auto const &series : x.coeff)
	{
		TruncatedSeries r(series.vars(), series.cutoff());
		for (auto const &[mono, c] : series.terms())
		{
			Rational v = c;
			SeriesMonomial collapsed;
			collapsed.t.assign(mono.t.size(), 0);
			collapsed.beta = mono.beta;
			for (size_t i = 0; i < mono.t.size() && !v.is_zero(); ++i)
				for (int32_t k = 0; k < mono.t[i]; ++k)
					v *= t_point.at(i);
			r.add_term(collapsed, v);
		}
		out.coeff.push_back(std::move(r));
	}
	return out;
}

TruncatedSeries wdvv_residual(Potential const &p, int i, int j, int h, int l)
{
	GwTarget const &t = *p.target;
	auto diag = diagonal_class(t);
	TruncatedSeries lhs(p.vars, p.series.cutoff());
	TruncatedSeries rhs(p.vars, p.series.cutoff());
	for (auto const &[e, f, gef] : diag)
	{
		lhs += third_partial(p, i, j, e) * third_partial(p, f, h, l) * gef;
		rhs += third_partial(p, j, h, e) * third_partial(p, f, i, l) * gef;
	}
	int sgn = t.parity(i) * (t.parity(j) + t.parity(h));
	return (sgn & 1) ? lhs + rhs : lhs - rhs;
}

std::optional<WdvvWitness> wdvv_check(Potential const &p)
{
	int m = p.target->class_count();
	for (int i = 0; i < m; ++i)
		for (int j = 0; j < m; ++j)
			for (int h = 0; h < m; ++h)
				for (int l = 0; l < m; ++l)
				{
					TruncatedSeries r = wdvv_residual(p, i, j, h, l);
					for (auto const &[mono, c] : r.terms())
						if (mono.total_t_degree() + 3 <= p.max_n)
							return WdvvWitness{i, j, h, l, mono, c};
				}
	return std::nullopt;
}

std::string AssociativityReport::str(GwTarget const &t) const
{
	if (ok)
		return "associative";
	return "associativity fails at (" + t.basis[i].label + "," +
	       t.basis[j].label + "," + t.basis[h].label + ")";
}

AssociativityReport associativity_check(Potential const &p)
{
	int m = p.target->class_count();
	std::vector<QuantumElement> basis;
	for (int i = 0; i < m; ++i)
		basis.push_back(basis_element(p, i));
	for (int i = 0; i < m; ++i)
		for (int j = 0; j < m; ++j)
		{
			QuantumElement ij = quantum_mul(p, basis[i], basis[j]);
			for (int h = 0; h < m; ++h)
			{
				QuantumElement left = quantum_mul(p, ij, basis[h]);
				QuantumElement right = quantum_mul(
				    p, basis[i], quantum_mul(p, basis[j], basis[h]));
				for (int k = 0; k < m; ++k)
				{
					TruncatedSeries diff = left.coeff[k] - right.coeff[k];
					for (auto const &[mono, c] : diff.terms())
						if (mono.total_t_degree() + 3 <= p.max_n)
							return {false, i, j, h, mono};
				}
			}
		}
	return {};
}

std::optional<SeriesMonomial> homogeneity_violation(Potential const &p)
{
	GwTarget const &t = *p.target;
	Rational expected(2 * (t.dim - 3));
	for (auto const &[mono, c] : p.series.terms())
	{
		Rational w = p.vars->t_weighted_degree(mono) -
		             Rational(2 * mono.total_t_degree()) -
		             Rational(2 * p.vars->novikov_degree(mono));
		if (w != expected)
			return mono;
	}
	return std::nullopt;
}

std::string potential_to_json(Potential const &p)
{
	// the export format is a plain list of term objects
	nlohmann::json terms = nlohmann::json::array();
	for (auto const &[mono, c] : p.series.terms())
	{
		nlohmann::json row;
		row["t_exponents"] = mono.t;
		row["beta"] = mono.beta;
		row["coefficient"] = c.str();
		terms.push_back(std::move(row));
	}
	return terms.dump(2) + "\n";
}

std::string QuantumElement::str(GwTarget const &t) const
{
	std::vector<std::string> names;
	for (auto const &b : t.basis)
		names.push_back(b.label);
	std::string out;
	for (size_t k = 0; k < coeff.size(); ++k)
	{
		if (coeff[k].is_zero())
			continue;
		if (!out.empty())
			out += " + ";
		std::string c = coeff[k].str(names);
		if (c == "1")
			out += t.basis[k].label;
		else if (c.find(' ') != std::string::npos)
			out += "(" + c + ")*" + t.basis[k].label;
		else
			out += c + "*" + t.basis[k].label;
	}
	return out.empty() ? "0" : out;
}

} // namespace gwzero
