#pragma once

#include "gwzero/rational.hpp"
#include "gwzero/series.hpp"

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gwzero {

using LatticeVector = std::vector<int64_t>;

/** One generator of the age-graded cohomology of the inertia model. */
struct BasisClass {
	int id = 0;
	int classical_degree = 0;
	std::string component;
	Rational age;
	int banding_order_r = 1;
	std::string label; // printable name, defaults to "T<id>"

	Rational st_degree() const
	{
		return Rational(classical_degree) + Rational(2) * age;
	}
	int parity() const { return classical_degree & 1; }
	bool untwisted() const { return banding_order_r == 1 && age.is_zero(); }
};

struct InvolutionMap {
	std::vector<int> perm;
};

struct PairingData {
	std::vector<std::vector<Rational>> g;
	std::vector<std::vector<Rational>> g_inv;
};

struct CurveLattice {
	int rank = 1;
	std::vector<int64_t> c1_pairing;
	std::map<int, std::vector<int64_t>> divisor_pairing; // basis id -> beta.gamma
};

/** One summand of a factorization gamma = sum c * (T_dprime cup T_d2). */
struct Degree2Term {
	Rational c;
	int dprime = 0;
	int d2 = 0;
};

struct SeedCorrelator {
	LatticeVector beta;
	std::vector<int> classes; // canonically sorted
	Rational value;
};

struct CupTerm {
	int k;
	Rational c;
};

/**
 * Complete description of a Gromov-Witten target: graded basis with
 * orbifold metadata, pairing, involution, cup constants, curve lattice,
 * c1 and the seed correlators. Immutable after validation.
 */
struct GwTarget {
	std::string name;
	int dim = 0;
	std::vector<BasisClass> basis;
	InvolutionMap involution;
	PairingData pairing;
	std::vector<std::vector<std::vector<CupTerm>>> cup; // cup[i][j] sparse in k
	CurveLattice lattice;
	std::map<int, std::vector<Degree2Term>> degree2_generation;
	std::vector<SeedCorrelator> seeds;

	int class_count() const { return static_cast<int>(basis.size()); }
	Rational st(int i) const { return basis[i].st_degree(); }
	int parity(int i) const { return basis[i].parity(); }
	bool has_odd_classes() const
	{
		for (auto const &b : basis)
			if (b.parity())
				return true;
		return false;
	}

	/** Untwisted degree-2 class with a recorded curve pairing. */
	bool is_divisor_class(int i) const
	{
		return basis[i].untwisted() && basis[i].classical_degree == 2 &&
		       lattice.divisor_pairing.count(i) > 0;
	}

	int64_t beta_dot_c1(LatticeVector const &beta) const
	{
		int64_t d = 0;
		for (size_t i = 0; i < beta.size(); ++i)
			d += lattice.c1_pairing[i] * beta[i];
		return d;
	}
	int64_t beta_dot_divisor(int id, LatticeVector const &beta) const
	{
		auto const &v = lattice.divisor_pairing.at(id);
		int64_t d = 0;
		for (size_t i = 0; i < beta.size(); ++i)
			d += v[i] * beta[i];
		return d;
	}

	static bool effective(LatticeVector const &beta)
	{
		for (auto b : beta)
			if (b < 0)
				return false;
		return true;
	}

	std::span<const CupTerm> cup_terms(int i, int j) const { return cup[i][j]; }

	/** Classical triple form <T_i, T_j, T_k> = pairing(T_i cup T_j, T_k). */
	Rational classical_triple(int i, int j, int k) const
	{
		Rational v;
		for (auto const &t : cup[i][j])
			v += t.c * pairing.g[t.k][k];
		return v;
	}

	int label_to_id(std::string const &s) const;

	SignRule sign_rule() const
	{
		SignRule r;
		for (auto const &b : basis)
			r.parity.push_back(static_cast<unsigned char>(b.parity()));
		return r;
	}

	std::shared_ptr<const SeriesVars> series_vars() const
	{
		auto v = std::make_shared<SeriesVars>();
		v->sign = sign_rule();
		for (auto const &b : basis)
			v->weight.push_back(b.st_degree());
		v->c1 = lattice.c1_pairing;
		return v;
	}
};

struct ValidationReport {
	std::vector<std::string> errors;
	std::vector<std::string> warnings;

	bool ok() const { return errors.empty(); }
};

/** Full invariant check; reconstruction refuses targets with errors. */
ValidationReport validate_target(GwTarget const &t);

/** Nonzero entries (e, f, g^{ef}) of the inverse pairing. */
std::vector<std::tuple<int, int, Rational>> diagonal_class(GwTarget const &t);

/** All ordered effective pairs beta1 + beta2 = beta. */
std::vector<std::pair<LatticeVector, LatticeVector>>
splittings(GwTarget const &t, LatticeVector const &beta);

/**
 * Total st-degree an n-point correlator of class beta must have to be
 * nonzero: 2(dim + beta.c1) + 2(n-3).
 */
Rational selection_degree(GwTarget const &t, int n, LatticeVector const &beta);

struct FactorThroughDegree2 {
	bool already_low = false; // st-degree <= 2, nothing to factor
	std::span<const Degree2Term> terms;
};

/** Decomposition gamma = sum delta' cup delta with deg_st delta = 2. */
FactorThroughDegree2 factor_through_degree2(GwTarget const &t, int id);

/** Inverts a square rational matrix; nullopt when singular. */
std::optional<std::vector<std::vector<Rational>>>
invert_matrix(std::vector<std::vector<Rational>> const &m);

GwTarget load_target(std::string const &path);
GwTarget parse_target(std::string const &json_text);

} // namespace gwzero
