#include "gwzero/target.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace gwzero {

using nlohmann::json;

int GwTarget::label_to_id(std::string const &s) const
{
	for (auto const &b : basis)
		if (b.label == s)
			return b.id;
	// fall back to T<i> regardless of custom labels
	if (s.size() > 1 && (s[0] == 'T' || s[0] == 't'))
	{
		try
		{
			int i = std::stoi(s.substr(1));
			if (i >= 0 && i < class_count())
				return i;
		}
		catch (std::exception const &)
		{
		}
	}
	throw std::invalid_argument("unknown basis symbol '" + s + "'");
}

std::optional<std::vector<std::vector<Rational>>>
invert_matrix(std::vector<std::vector<Rational>> const &m)
{
	size_t n = m.size();
	auto a = m;
	std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
	for (size_t i = 0; i < n; ++i)
		inv[i][i] = Rational(1);
	for (size_t col = 0; col < n; ++col)
	{
		size_t pivot = col;
		while (pivot < n && a[pivot][col].is_zero())
			++pivot;
		if (pivot == n)
			return std::nullopt;
		std::swap(a[pivot], a[col]);
		std::swap(inv[pivot], inv[col]);
		Rational p = a[col][col];
		for (size_t j = 0; j < n; ++j)
		{
			a[col][j] /= p;
			inv[col][j] /= p;
		}
		for (size_t row = 0; row < n; ++row)
		{
			if (row == col || a[row][col].is_zero())
				continue;
			Rational f = a[row][col];
			for (size_t j = 0; j < n; ++j)
			{
				a[row][j] -= f * a[col][j];
				inv[row][j] -= f * inv[col][j];
			}
		}
	}
	return inv;
}

std::vector<std::tuple<int, int, Rational>> diagonal_class(GwTarget const &t)
{
	if (t.pairing.g_inv.empty())
		throw std::runtime_error("degenerate pairing: no inverse available");
	std::vector<std::tuple<int, int, Rational>> out;
	int m = t.class_count();
	for (int e = 0; e < m; ++e)
		for (int f = 0; f < m; ++f)
			if (!t.pairing.g_inv[e][f].is_zero())
				out.emplace_back(e, f, t.pairing.g_inv[e][f]);
	return out;
}

std::vector<std::pair<LatticeVector, LatticeVector>>
splittings(GwTarget const &t, LatticeVector const &beta)
{
	if (beta.size() != static_cast<size_t>(t.lattice.rank) ||
	    !GwTarget::effective(beta))
		throw std::invalid_argument("splittings: beta not effective");
	std::vector<std::pair<LatticeVector, LatticeVector>> out;
	LatticeVector b1(beta.size(), 0);
	auto rec = [&](auto &&self, size_t i) -> void {
		if (i == beta.size())
		{
			LatticeVector b2(beta.size());
			for (size_t j = 0; j < beta.size(); ++j)
				b2[j] = beta[j] - b1[j];
			out.emplace_back(b1, std::move(b2));
			return;
		}
		for (b1[i] = 0; b1[i] <= beta[i]; ++b1[i])
			self(self, i + 1);
		b1[i] = 0;
	};
	rec(rec, 0);
	return out;
}

Rational selection_degree(GwTarget const &t, int n, LatticeVector const &beta)
{
	if (n < 3)
		throw std::invalid_argument("selection_degree: n < 3");
	return Rational(2 * (t.dim + t.beta_dot_c1(beta)) + 2 * (n - 3));
}

FactorThroughDegree2 factor_through_degree2(GwTarget const &t, int id)
{
	if (t.st(id) <= Rational(2))
		return {true, {}};
	auto it = t.degree2_generation.find(id);
	if (it == t.degree2_generation.end())
		throw std::runtime_error("class " + t.basis[id].label +
		                         " is not generated in degree 2");
	return {false, it->second};
}

namespace {

std::string class_name(GwTarget const &t, int i) { return t.basis[i].label; }

void validate_basis(GwTarget const &t, ValidationReport &r)
{
	if (t.basis.empty())
	{
		r.errors.push_back("empty basis");
		return;
	}
	for (int i = 0; i < t.class_count(); ++i)
	{
		auto const &b = t.basis[i];
		if (b.id != i)
			r.errors.push_back("basis ids must be 0..m in file order");
		if (b.classical_degree < 0)
			r.errors.push_back(class_name(t, i) + ": negative classical degree");
		if (b.banding_order_r < 1)
			r.errors.push_back(class_name(t, i) + ": banding order r < 1");
		if (b.age.sign() < 0)
			r.errors.push_back(class_name(t, i) + ": negative age");
		if (!(b.age * Rational(b.banding_order_r)).is_integer())
			r.errors.push_back(class_name(t, i) +
			                   ": age denominator does not divide r");
	}
	auto const &t0 = t.basis[0];
	if (t0.classical_degree != 0 || !t0.age.is_zero() || t0.banding_order_r != 1)
		r.errors.push_back("T0 must be the untwisted identity class "
		                   "(degree 0, age 0, r 1)");
}

void validate_involution(GwTarget const &t, ValidationReport &r)
{
	int m = t.class_count();
	auto const &p = t.involution.perm;
	if (static_cast<int>(p.size()) != m)
	{
		r.errors.push_back("involution has wrong length");
		return;
	}
	for (int i = 0; i < m; ++i)
		if (p[i] < 0 || p[i] >= m)
		{
			r.errors.push_back("involution entry out of range");
			return;
		}
	for (int i = 0; i < m; ++i)
		if (p[p[i]] != i)
		{
			r.errors.push_back("involution not self-inverse");
			break;
		}
	if (p[0] != 0)
		r.errors.push_back("involution must fix T0");
	for (int i = 0; i < m; ++i)
	{
		if (t.st(i) != t.st(p[i]))
			r.errors.push_back("involution does not preserve st-degree at " +
			                   class_name(t, i));
		if (t.basis[i].banding_order_r != t.basis[p[i]].banding_order_r)
			r.errors.push_back("involution does not preserve banding order at " +
			                   class_name(t, i));
	}
}

void validate_pairing(GwTarget const &t, ValidationReport &r)
{
	int m = t.class_count();
	auto const &g = t.pairing.g;
	if (static_cast<int>(g.size()) != m)
	{
		r.errors.push_back("pairing matrix has wrong shape");
		return;
	}
	for (auto const &row : g)
		if (static_cast<int>(row.size()) != m)
		{
			r.errors.push_back("pairing matrix has wrong shape");
			return;
		}
	if (t.pairing.g_inv.empty())
		r.errors.push_back("pairing degenerate");
	else
	{
		// exact identity check of g * g_inv
		for (int i = 0; i < m; ++i)
			for (int j = 0; j < m; ++j)
			{
				Rational s;
				for (int k = 0; k < m; ++k)
					s += g[i][k] * t.pairing.g_inv[k][j];
				if (s != Rational(i == j ? 1 : 0))
				{
					r.errors.push_back("pairing inverse check failed");
					i = m;
					break;
				}
			}
	}
	Rational two_dim(2 * t.dim);
	for (int e = 0; e < m; ++e)
		for (int f = 0; f < m; ++f)
		{
			if (!g[e][f].is_zero() && t.st(e) + t.st(f) != two_dim)
				r.errors.push_back("pairing entry (" + class_name(t, e) + "," +
				                   class_name(t, f) +
				                   ") violates complementary-degree support");
			Rational sym = g[f][e];
			if ((t.parity(e) & t.parity(f)) != 0)
				sym = -sym;
			if (g[e][f] != sym)
				r.errors.push_back("pairing not graded-symmetric at (" +
				                   class_name(t, e) + "," + class_name(t, f) +
				                   ")");
		}
	if (static_cast<int>(t.involution.perm.size()) == m)
	{
		auto const &p = t.involution.perm;
		for (int e = 0; e < m; ++e)
			for (int f = 0; f < m; ++f)
			{
				Rational a = g[e][f], b = g[p[f]][p[e]];
				if (a != b && a != -b)
				{
					r.warnings.push_back(
					    "pairing not involution-compatible: g(" +
					    class_name(t, e) + "," + class_name(t, f) +
					    ") != +-g(iota(f),iota(e))");
					return;
				}
			}
	}
}

void validate_cup(GwTarget const &t, ValidationReport &r)
{
	int m = t.class_count();
	if (static_cast<int>(t.cup.size()) != m)
	{
		r.errors.push_back("cup table has wrong shape");
		return;
	}
	for (auto const &row : t.cup)
		if (static_cast<int>(row.size()) != m)
		{
			r.errors.push_back("cup table has wrong shape");
			return;
		}
	for (int i = 0; i < m; ++i)
		for (int j = 0; j < m; ++j)
			for (auto const &term : t.cup[i][j])
				if (!term.c.is_zero() &&
				    t.st(i) + t.st(j) != t.st(term.k))
				{
					r.errors.push_back("cup constant c(" + class_name(t, i) +
					                   "," + class_name(t, j) + ")^" +
					                   class_name(t, term.k) +
					                   " violates grading");
				}
	// T0 must act as a two-sided identity
	for (int j = 0; j < m; ++j)
	{
		auto check_identity = [&](std::span<const CupTerm> terms,
		                          std::string const &side) {
			bool ok = terms.size() == 1 && terms[0].k == j &&
			          terms[0].c == Rational(1);
			if (!ok)
				r.errors.push_back("T0 is not a " + side +
				                   " cup identity against " + class_name(t, j));
		};
		check_identity(t.cup_terms(0, j), "left");
		check_identity(t.cup_terms(j, 0), "right");
	}
	// graded commutativity
	auto coeff = [&](int i, int j, int k) {
		for (auto const &term : t.cup[i][j])
			if (term.k == k)
				return term.c;
		return Rational(0);
	};
	for (int i = 0; i < m; ++i)
		for (int j = i; j < m; ++j)
			for (int k = 0; k < m; ++k)
			{
				Rational a = coeff(i, j, k), b = coeff(j, i, k);
				if ((t.parity(i) & t.parity(j)) != 0)
					b = -b;
				if (a != b)
					r.errors.push_back("cup not graded-commutative at (" +
					                   class_name(t, i) + "," +
					                   class_name(t, j) + ")");
			}
	// associativity
	auto product = [&](std::vector<Rational> const &x, int j) {
		std::vector<Rational> out(m);
		for (int i = 0; i < m; ++i)
		{
			if (x[i].is_zero())
				continue;
			for (auto const &term : t.cup[i][j])
				out[term.k] += x[i] * term.c;
		}
		return out;
	};
	for (int i = 0; i < m && r.errors.empty(); ++i)
		for (int j = 0; j < m; ++j)
			for (int h = 0; h < m; ++h)
			{
				std::vector<Rational> ij(m), jh(m);
				for (auto const &term : t.cup[i][j])
					ij[term.k] += term.c;
				for (auto const &term : t.cup[j][h])
					jh[term.k] += term.c;
				auto left = product(ij, h);
				// i cup (j cup h)
				std::vector<Rational> right(m);
				for (int k = 0; k < m; ++k)
				{
					if (jh[k].is_zero())
						continue;
					for (auto const &term : t.cup[i][k])
						right[term.k] += jh[k] * term.c;
				}
				if (left != right)
				{
					r.errors.push_back("cup product not associative at (" +
					                   class_name(t, i) + "," +
					                   class_name(t, j) + "," +
					                   class_name(t, h) + ")");
					i = j = h = m;
				}
			}
	// the classical triple form must be S3-symmetric up to Koszul signs
	for (int i = 0; i < m; ++i)
		for (int j = 0; j < m; ++j)
			for (int k = j; k < m; ++k)
			{
				Rational a = t.classical_triple(i, j, k);
				Rational b = t.classical_triple(i, k, j);
				if ((t.parity(j) & t.parity(k)) != 0)
					b = -b;
				if (a != b)
				{
					r.errors.push_back(
					    "classical triple form not symmetric at (" +
					    class_name(t, i) + "," + class_name(t, j) + "," +
					    class_name(t, k) + ")");
					i = m;
					j = k = m;
				}
			}
}

void validate_lattice(GwTarget const &t, ValidationReport &r)
{
	auto const &l = t.lattice;
	if (l.rank < 1)
		r.errors.push_back("lattice rank must be positive");
	if (static_cast<int>(l.c1_pairing.size()) != l.rank)
		r.errors.push_back("c1 pairing has wrong length");
	for (auto v : l.c1_pairing)
		if (v < 0)
			r.errors.push_back("beta.c1 negative on a lattice generator");
	for (auto const &[id, vec] : l.divisor_pairing)
	{
		if (id < 0 || id >= t.class_count())
		{
			r.errors.push_back("divisor pairing for unknown basis id");
			continue;
		}
		if (!(t.basis[id].untwisted() && t.basis[id].classical_degree == 2))
			r.errors.push_back("divisor pairing for " + class_name(t, id) +
			                   " which is not an untwisted degree-2 class");
		if (static_cast<int>(vec.size()) != l.rank)
			r.errors.push_back("divisor pairing for " + class_name(t, id) +
			                   " has wrong length");
	}
	for (auto const &b : t.basis)
		if (b.untwisted() && b.classical_degree == 2 &&
		    l.divisor_pairing.count(b.id) == 0)
			r.errors.push_back("untwisted degree-2 class " + b.label +
			                   " lacks a curve pairing vector");
}

void validate_degree2(GwTarget const &t, ValidationReport &r)
{
	for (auto const &[id, terms] : t.degree2_generation)
	{
		if (id < 0 || id >= t.class_count())
		{
			r.errors.push_back("degree2_generation for unknown basis id");
			continue;
		}
		if (t.st(id) <= Rational(2))
		{
			r.warnings.push_back("degree2_generation for " + class_name(t, id) +
			                     " is unnecessary (st-degree <= 2)");
			continue;
		}
		std::vector<Rational> expansion(t.class_count());
		bool shape_ok = true;
		for (auto const &term : terms)
		{
			if (term.dprime < 0 || term.dprime >= t.class_count() ||
			    term.d2 < 0 || term.d2 >= t.class_count())
			{
				r.errors.push_back("degree2_generation for " +
				                   class_name(t, id) + " has bad indices");
				shape_ok = false;
				break;
			}
			if (t.st(term.d2) != Rational(2))
			{
				r.errors.push_back("degree2_generation for " +
				                   class_name(t, id) +
				                   ": factor delta is not st-degree 2");
				shape_ok = false;
			}
			if (t.st(term.dprime) != t.st(id) - Rational(2))
			{
				r.errors.push_back("degree2_generation for " +
				                   class_name(t, id) +
				                   ": delta' degree must drop by exactly 2");
				shape_ok = false;
			}
			for (auto const &ct : t.cup_terms(term.dprime, term.d2))
				expansion[ct.k] += term.c * ct.c;
		}
		if (!shape_ok)
			continue;
		for (int k = 0; k < t.class_count(); ++k)
			if (expansion[k] != Rational(k == id ? 1 : 0))
			{
				r.errors.push_back("degree2_generation for " +
				                   class_name(t, id) +
				                   " does not expand to the class itself");
				break;
			}
	}
}

void validate_seeds(GwTarget const &t, ValidationReport &r)
{
	std::map<std::pair<LatticeVector, std::vector<int>>, Rational> seen;
	for (auto const &s : t.seeds)
	{
		if (s.classes.size() != 3)
		{
			r.errors.push_back("seed with n != 3");
			continue;
		}
		bool ids_ok = true;
		for (int c : s.classes)
			if (c < 0 || c >= t.class_count())
				ids_ok = false;
		if (!ids_ok)
		{
			r.errors.push_back("seed with unknown basis id");
			continue;
		}
		if (s.beta.size() != static_cast<size_t>(t.lattice.rank) ||
		    !GwTarget::effective(s.beta))
		{
			r.errors.push_back("seed with non-effective beta");
			continue;
		}
		Rational total;
		for (int c : s.classes)
			total += t.st(c);
		if (total != selection_degree(t, 3, s.beta))
		{
			r.errors.push_back("seed violates the selection rule");
			continue;
		}
		if (t.beta_dot_c1(s.beta) > t.dim + 1)
			r.warnings.push_back("seed outside the initial system "
			                     "(beta.c1 > dim+1)");
		bool has_deg2 = false;
		for (int c : s.classes)
			has_deg2 = has_deg2 || t.st(c) == Rational(2);
		if (!has_deg2)
			r.warnings.push_back("seed without a degree-2 insertion");
		auto key = std::make_pair(s.beta, s.classes);
		auto [it, inserted] = seen.emplace(key, s.value);
		if (!inserted && it->second != s.value)
			r.errors.push_back("conflicting duplicate seed values");
	}
}

} // namespace

ValidationReport validate_target(GwTarget const &t)
{
	ValidationReport r;
	validate_basis(t, r);
	if (!r.errors.empty())
		return r;
	validate_involution(t, r);
	validate_pairing(t, r);
	validate_cup(t, r);
	validate_lattice(t, r);
	validate_degree2(t, r);
	validate_seeds(t, r);
	return r;
}

namespace {

Rational json_rational(json const &j, std::string const &where)
{
	try
	{
		if (j.is_number_integer())
			return Rational(static_cast<long long>(j.get<int64_t>()));
		if (j.is_string())
			return Rational::parse(j.get<std::string>());
	}
	catch (std::exception const &e)
	{
		throw std::invalid_argument(where + ": " + e.what());
	}
	throw std::invalid_argument(where + ": expected rational string");
}

/** Sort basis ids, accumulating the Koszul sign of odd-odd transpositions. */
std::pair<std::vector<int>, int> sorted_with_sign(std::vector<int> ids,
                                                  GwTarget const &t)
{
	int sign = 1;
	for (size_t i = 1; i < ids.size(); ++i)
		for (size_t j = i; j > 0 && ids[j] < ids[j - 1]; --j)
		{
			if (t.parity(ids[j]) && t.parity(ids[j - 1]))
				sign = -sign;
			std::swap(ids[j], ids[j - 1]);
		}
	return {std::move(ids), sign};
}

} // namespace

GwTarget parse_target(std::string const &text)
{
	json doc = json::parse(text);
	GwTarget t;
	t.name = doc.at("name").get<std::string>();
	t.dim = doc.at("dim").get<int>();
	for (auto const &b : doc.at("basis"))
	{
		BasisClass c;
		c.id = b.at("id").get<int>();
		c.classical_degree = b.at("classical_degree").get<int>();
		if (b.contains("component"))
			c.component = b.at("component").is_string()
			                  ? b.at("component").get<std::string>()
			                  : b.at("component").dump();
		c.age = json_rational(b.at("age"), "basis age");
		c.banding_order_r = b.at("r").get<int>();
		c.label = b.contains("label") ? b.at("label").get<std::string>()
		                              : "T" + std::to_string(c.id);
		t.basis.push_back(std::move(c));
	}
	int m = t.class_count();
	t.involution.perm = doc.at("involution").get<std::vector<int>>();

	auto const &pj = doc.at("pairing");
	for (auto const &row : pj)
	{
		std::vector<Rational> r;
		for (auto const &v : row)
			r.push_back(json_rational(v, "pairing"));
		t.pairing.g.push_back(std::move(r));
	}
	if (static_cast<int>(t.pairing.g.size()) == m)
	{
		bool square = true;
		for (auto const &row : t.pairing.g)
			square = square && static_cast<int>(row.size()) == m;
		if (square)
			if (auto inv = invert_matrix(t.pairing.g))
				t.pairing.g_inv = std::move(*inv);
	}

	t.cup.assign(m, std::vector<std::vector<CupTerm>>(m));
	std::vector<std::vector<bool>> given(m, std::vector<bool>(m, false));
	for (auto const &e : doc.at("cup"))
	{
		int i = e.at("i").get<int>();
		int j = e.at("j").get<int>();
		int k = e.at("k").get<int>();
		if (i < 0 || i >= m || j < 0 || j >= m || k < 0 || k >= m)
			throw std::invalid_argument("cup entry index out of range");
		t.cup[i][j].push_back({k, json_rational(e.at("c"), "cup constant")});
		given[i][j] = true;
	}
	// fill T0 rows and the graded-commutative mirrors the file omitted
	for (int j = 0; j < m; ++j)
	{
		if (!given[0][j])
			t.cup[0][j] = {{j, Rational(1)}};
		if (!given[j][0])
			t.cup[j][0] = {{j, Rational(1)}};
	}
	for (int i = 0; i < m; ++i)
		for (int j = 0; j < m; ++j)
			if (given[i][j] && !given[j][i] && i != j)
			{
				for (auto term : t.cup[i][j])
				{
					if (t.basis[i].parity() && t.basis[j].parity())
						term.c = -term.c;
					t.cup[j][i].push_back(term);
				}
				given[j][i] = true;
			}

	auto const &lj = doc.at("lattice");
	t.lattice.rank = lj.at("rank").get<int>();
	t.lattice.c1_pairing = lj.at("c1").get<std::vector<int64_t>>();
	if (lj.contains("divisors"))
		for (auto const &[key, val] : lj.at("divisors").items())
			t.lattice.divisor_pairing[std::stoi(key)] =
			    val.get<std::vector<int64_t>>();

	if (doc.contains("degree2_generation"))
		for (auto const &[key, val] : doc.at("degree2_generation").items())
		{
			std::vector<Degree2Term> terms;
			for (auto const &e : val)
				terms.push_back({json_rational(e.at("c"), "degree2_generation"),
				                 e.at("dp").get<int>(), e.at("d2").get<int>()});
			t.degree2_generation[std::stoi(key)] = std::move(terms);
		}

	if (doc.contains("seeds"))
		for (auto const &e : doc.at("seeds"))
		{
			SeedCorrelator s;
			s.beta = e.at("beta").get<std::vector<int64_t>>();
			s.classes = e.at("classes").get<std::vector<int>>();
			s.value = json_rational(e.at("value"), "seed value");
			for (int c : s.classes)
				if (c < 0 || c >= m)
					throw std::invalid_argument("seed class id out of range");
			auto [sorted, sign] = sorted_with_sign(s.classes, t);
			s.classes = std::move(sorted);
			if (sign < 0)
				s.value = -s.value;
			t.seeds.push_back(std::move(s));
		}
	return t;
}

GwTarget load_target(std::string const &path)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open target file " + path);
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_target(ss.str());
}

} // namespace gwzero
