#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gwzero/quantum.hpp"
#include "gwzero/reconstruct.hpp"
#include "oracles.hpp"

#include <random>

using namespace gwzero;

namespace {

GwTarget load(std::string const &name)
{
	return load_target(std::string(GWZERO_TARGET_DIR) + "/" + name);
}

SeriesMonomial mono(Potential const &p, std::vector<int32_t> t,
                    std::vector<int64_t> beta)
{
	SeriesMonomial m;
	m.t = std::move(t);
	m.t.resize(p.vars->var_count(), 0);
	m.beta = std::move(beta);
	m.beta.resize(p.vars->rank(), 0);
	return m;
}

bool is_basis_multiple(QuantumElement const &x, int k, TruncatedSeries const &s)
{
	for (size_t i = 0; i < x.coeff.size(); ++i)
	{
		if (static_cast<int>(i) == k)
		{
			if (!(x.coeff[i] == s))
				return false;
		}
		else if (!x.coeff[i].is_zero())
			return false;
	}
	return true;
}

} // namespace

TEST_CASE("classical part of the P2 potential via brute-force cup integrals")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {6, 6, 1});
	Potential p = build_potential(p2, table, 6, 6);

	// brute force: sum over all 3-element multisets {a,b,c} of the
	// classical triple <T_a,T_b,T_c>_0 t_a t_b t_c / |Aut|
	TruncatedSeries classical(p.vars, p.series.cutoff());
	for (int a = 0; a < 3; ++a)
		for (int b = a; b < 3; ++b)
			for (int c = b; c < 3; ++c)
			{
				Rational v =
				    (a == 0) ? p2.pairing.g[b][c] : p2.classical_triple(a, b, c);
				std::vector<int32_t> e(3, 0);
				++e[a], ++e[b], ++e[c];
				Rational aut(1);
				for (auto k : e)
					aut *= Rational::factorial(k);
				classical.add_term(mono(p, e, {0}), v / aut);
			}
	// expected: t0^2 t2 / 2 + t0 t1^2 / 2
	TruncatedSeries expect(p.vars, p.series.cutoff());
	expect.add_term(mono(p, {2, 0, 1}, {0}), Rational(BigInt(1), BigInt(2)));
	expect.add_term(mono(p, {1, 2, 0}, {0}), Rational(BigInt(1), BigInt(2)));
	CHECK(classical == expect);

	// and the potential's q^0 part equals it
	TruncatedSeries q0(p.vars, p.series.cutoff());
	for (auto const &[m, c] : p.series.terms())
		if (p.vars->novikov_degree(m) == 0)
			q0.add_term(m, c);
	CHECK(q0 == expect);

	// the quantum coefficient t1 t2^2 q^1 carries <H,H2,H2>_1 / (1! 2!)
	CHECK(p.series.coefficient(mono(p, {0, 1, 2}, {1})) ==
	      Rational(BigInt(1), BigInt(2)));

	// no t^a terms with |a| < 3
	for (auto const &[m, c] : p.series.terms())
		CHECK(m.total_t_degree() >= 3);
}

TEST_CASE("build_potential reports missing correlators")
{
	auto p2 = load("p2.json");
	CorrelatorTable empty;
	CHECK_THROWS_AS(build_potential(p2, empty, 6, 6), UnknownCorrelator);
}

TEST_CASE("third partials at t = 0 and against the direct assembly")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {12, 10, 1});
	Potential p = build_potential(p2, table, 12, 10);

	SeriesMonomial one = mono(p, {0, 0, 0}, {0});
	SeriesMonomial q1 = mono(p, {0, 0, 0}, {1});

	// d3/dt1 dt2 dt2 at t=0 is q^1 <H,H2,H2>_1 = q
	auto d122 = third_partial(p, 1, 2, 2);
	CHECK(d122.coefficient(q1) == Rational(1));
	CHECK(d122.coefficient(one) == Rational(0));

	// d3/dt0 dt1 dt2 at t=0 is the classical pairing <H, H2> ... = 0,
	// while d3/dt0 dt1 dt1 = g(H,H) = 1
	CHECK(third_partial(p, 0, 1, 2).coefficient(one) == Rational(0));
	CHECK(third_partial(p, 0, 1, 1).coefficient(one) == Rational(1));
	CHECK(third_partial(p, 0, 0, 2).coefficient(one) == Rational(1));

	// zero potential: all partials vanish
	Potential zero = p;
	zero.series = TruncatedSeries(p.vars, p.series.cutoff());
	CHECK(third_partial(zero, 1, 2, 2).is_zero());

	// the derivative of the series equals the direct table assembly
	for (int i = 0; i < 3; ++i)
		for (int j = 0; j < 3; ++j)
			for (int h = 0; h < 3; ++h)
				CHECK(third_partial(p, i, j, h) ==
				      third_partial_direct(p, table, i, j, h));

	// and the partial is totally symmetric for an even target
	CHECK(third_partial(p, 1, 2, 1) == third_partial(p, 1, 1, 2));
	CHECK(third_partial(p, 2, 1, 1) == third_partial(p, 1, 1, 2));
}

TEST_CASE("small quantum ring of P2")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {12, 10, 1});
	Potential p = build_potential(p2, table, 12, 10);

	auto T0 = basis_element(p, 0);
	auto H = basis_element(p, 1);
	auto H2 = basis_element(p, 2);

	std::vector<Rational> origin(3, Rational(0));
	auto at0 = [&](QuantumElement const &x) { return evaluate_t(x, origin); };

	SeriesCutoff cut = p.series.cutoff();
	auto constant = [&](Rational c) {
		return TruncatedSeries::constant(p.vars, cut, c);
	};
	TruncatedSeries q(p.vars, cut);
	q.add_term(mono(p, {0, 0, 0}, {1}), Rational(1));

	// H * H = H2
	CHECK(is_basis_multiple(at0(quantum_mul(p, H, H)), 2, constant(1)));
	// H * H2 = q T0
	CHECK(is_basis_multiple(at0(quantum_mul(p, H, H2)), 0, q));
	// H2 * H2 = q H
	CHECK(is_basis_multiple(at0(quantum_mul(p, H2, H2)), 1, q));
	// H * H * H = q T0: the relation H^3 = q
	CHECK(is_basis_multiple(at0(quantum_mul(p, quantum_mul(p, H, H), H)), 0,
	                        q));
	// T0 is a two-sided identity even before evaluating at t = 0
	for (int i = 0; i < 3; ++i)
	{
		auto Ti = basis_element(p, i);
		CHECK(is_basis_multiple(quantum_mul(p, T0, Ti), i, constant(1)));
		CHECK(is_basis_multiple(quantum_mul(p, Ti, T0), i, constant(1)));
	}
}

TEST_CASE("quantum product is supercommutative on random even elements")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {9, 8, 1});
	Potential p = build_potential(p2, table, 9, 8);
	std::mt19937 rng(29);
	std::uniform_int_distribution<int> coeff(-3, 3);
	for (int trial = 0; trial < 50; ++trial)
	{
		QuantumElement x = basis_element(p, 0), y = basis_element(p, 0);
		for (int k = 0; k < 3; ++k)
		{
			x.coeff[k] = x.coeff[k] * Rational(coeff(rng));
			y.coeff[k] = y.coeff[k] * Rational(coeff(rng));
		}
		// rebuild as honest multiples of distinct basis vectors
		for (int k = 0; k < 3; ++k)
		{
			x.coeff[k] = TruncatedSeries::constant(p.vars, p.series.cutoff(),
			                                       Rational(coeff(rng)));
			y.coeff[k] = TruncatedSeries::constant(p.vars, p.series.cutoff(),
			                                       Rational(coeff(rng)));
		}
		auto xy = quantum_mul(p, x, y);
		auto yx = quantum_mul(p, y, x);
		for (int k = 0; k < 3; ++k)
			CHECK(xy.coeff[k] == yx.coeff[k]);
	}
}

TEST_CASE("WDVV residual vanishes for P2 and detects a perturbation")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {12, 10, 1});
	Potential p = build_potential(p2, table, 12, 10);
	CHECK(!wdvv_check(p).has_value());

	// zero potential trivially passes
	Potential zero = p;
	zero.series = TruncatedSeries(p.vars, p.series.cutoff());
	CHECK(!wdvv_check(zero).has_value());

	// perturb N_3 = 12 -> 13 and expect a witness
	CorrelatorTable bad;
	for (auto const &[key, e] : table.entries())
		bad.insert(key, key == CorrelatorKey{{3}, std::vector<int>(8, 2), +1}
		                    ? Rational(13)
		                    : e.value,
		           e.prov);
	Potential pbad = build_potential(p2, bad, 12, 10);
	auto witness = wdvv_check(pbad);
	REQUIRE(witness.has_value());
	CHECK(p2.beta_dot_c1(witness->monomial.beta) <= 9); // d = 3 instance
	CHECK(!witness->value.is_zero());
}

TEST_CASE("associativity check passes, fails on perturbation, and on the classical ring")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {9, 9, 1});
	Potential p = build_potential(p2, table, 9, 9);
	CHECK(associativity_check(p).ok);

	CorrelatorTable bad;
	for (auto const &[key, e] : table.entries())
		bad.insert(key, key == CorrelatorKey{{3}, std::vector<int>(8, 2), +1}
		                    ? Rational(13)
		                    : e.value,
		           e.prov);
	Potential pbad = build_potential(p2, bad, 9, 9);
	auto report = associativity_check(pbad);
	CHECK(!report.ok);
	CHECK(report.str(p2).find("associativity fails") != std::string::npos);

	// classical-only potential: the cup product is associative
	Potential classical = p;
	classical.series = TruncatedSeries(p.vars, p.series.cutoff());
	for (auto const &[m, c] : p.series.terms())
		if (p.vars->novikov_degree(m) == 0)
			classical.series.add_term(m, c);
	CHECK(associativity_check(classical).ok);
}

TEST_CASE("potential homogeneity and WDVV across bundled targets")
{
	for (auto const *name : {"p1.json", "p2.json", "p3.json", "p1xp1.json"})
	{
		auto t = load(name);
		CorrelatorTable table = reconstruct_all(t, {8, 7, 1});
		Potential p = build_potential(t, table, 8, 7);
		CHECK(!homogeneity_violation(p).has_value());
		CHECK(!wdvv_check(p).has_value());

		// break one coefficient: the violation is found
		Potential broken = p;
		SeriesMonomial bad;
		bad.t.assign(t.class_count(), 0);
		bad.t[0] = 5;
		bad.beta.assign(t.lattice.rank, 0);
		broken.series.add_term(bad, Rational(1));
		CHECK(homogeneity_violation(broken).has_value());
	}
}

TEST_CASE("orbifold potential: rational grading end to end")
{
	auto orb = load("mu3_orbicurve.json");
	CorrelatorTable table; // classical triples only, no seeds needed
	Potential p = build_potential(orb, table, 0, 3);
	CHECK(!p.series.is_zero());
	CHECK(!homogeneity_violation(p).has_value());
	// <E1,E1,E1>_0 = 1/3 shows up as t2^3 / 3! * (1/3)... times 3!/aut
	SeriesMonomial e1cubed;
	e1cubed.t = {0, 0, 3, 0, 0, 0};
	e1cubed.beta = {0};
	CHECK(p.series.coefficient(e1cubed) ==
	      Rational(BigInt(1), BigInt(18)));
	// T0 * E1 = E1 through the fractional pairing
	auto T0 = basis_element(p, 0);
	auto E1 = basis_element(p, 2);
	auto prod = quantum_mul(p, T0, E1);
	CHECK(is_basis_multiple(prod, 2,
	                        TruncatedSeries::constant(p.vars,
	                                                  p.series.cutoff(),
	                                                  Rational(1))));
}

TEST_CASE("quantum_mul rejects mismatched cutoffs")
{
	auto p2 = load("p2.json");
	CorrelatorTable table = reconstruct_all(p2, {6, 6, 1});
	Potential p = build_potential(p2, table, 6, 6);
	auto x = basis_element(p, 1);
	auto y = basis_element(p, 1);
	for (auto &s : y.coeff)
	{
		TruncatedSeries shrunk(p.vars, {Rational(1), 0});
		for (auto const &[m, c] : s.terms())
			shrunk.add_term(m, c);
		s = shrunk;
	}
	CHECK_THROWS_AS(quantum_mul(p, x, y), std::invalid_argument);
}

TEST_CASE("potential JSON export")
{
	auto p1 = load("p1.json");
	CorrelatorTable table = reconstruct_all(p1, {4, 4, 1});
	Potential p = build_potential(p1, table, 4, 4);
	auto json = potential_to_json(p);
	CHECK(json.find("\"t_exponents\"") != std::string::npos);
	CHECK(json.find("\"coefficient\"") != std::string::npos);
}
