#pragma once

#include "gwzero/correlator.hpp"

#include <optional>

namespace gwzero {

/**
 * Truncated genus-zero potential: the coefficient of t^a q^beta is
 * eps(a) <T^a>_beta / a! for |a| >= 3 and 0 below. Cutoffs are the
 * reconstruction cutoffs (max beta.c1, max n); coefficients for
 * correlators up to those bounds are complete.
 */
struct Potential {
	GwTarget const *target = nullptr;
	std::shared_ptr<const SeriesVars> vars;
	TruncatedSeries series;
	int64_t max_c1 = 0;
	int max_n = 3;
};

/** Assemble the potential; missing irreducible correlators are an error. */
Potential build_potential(GwTarget const &t, CorrelatorTable const &table,
                          int64_t max_c1, int max_n);

/** d^3 Phi / dt_i dt_j dt_h as a formal left derivative. */
TruncatedSeries third_partial(Potential const &p, int i, int j, int h);

/**
 * The same series assembled directly from the correlator table,
 * sum (1/n!) <T_i T_j T_h gamma^n>_beta q^beta. Independent route used to
 * cross-check third_partial.
 */
TruncatedSeries third_partial_direct(Potential const &p,
                                     CorrelatorTable const &table, int i,
                                     int j, int h);

/** Cohomology-basis-indexed vector with series coefficients. */
struct QuantumElement {
	std::vector<TruncatedSeries> coeff;

	std::string str(GwTarget const &t) const;
};

QuantumElement basis_element(Potential const &p, int i);

/** Big quantum product, extended bilinearly over series coefficients. */
QuantumElement quantum_mul(Potential const &p, QuantumElement const &x,
                           QuantumElement const &y);

/** Substitute exact values for the t-variables; q survives. */
QuantumElement evaluate_t(QuantumElement const &x,
                          std::vector<Rational> const &t_point);

/**
 * LHS - sign * RHS of the associativity equation on third partials for the
 * index quadruple (i, j, h, l), truncated to the potential's cutoff.
 */
TruncatedSeries wdvv_residual(Potential const &p, int i, int j, int h, int l);

struct WdvvWitness {
	int i, j, h, l;
	SeriesMonomial monomial;
	Rational value;
};

/**
 * Check the residual of every index quadruple on the window where the
 * truncated potential determines it (|a| + 3 <= max_n). Empty result
 * means the equation holds to that order.
 */
std::optional<WdvvWitness> wdvv_check(Potential const &p);

struct AssociativityReport {
	bool ok = true;
	int i = -1, j = -1, h = -1;
	SeriesMonomial monomial;
	std::string str(GwTarget const &t) const;
};

/** (T_i * T_j) * T_h vs T_i * (T_j * T_h) for all basis triples. */
AssociativityReport associativity_check(Potential const &p);

/**
 * Every monomial of the potential carries the same total weight
 * 2(dim - 3), where t_i weighs deg_st T_i - 2 and q^beta weighs
 * -2 beta.c1. Returns an offending monomial if not.
 */
std::optional<SeriesMonomial> homogeneity_violation(Potential const &p);

std::string potential_to_json(Potential const &p);

} // namespace gwzero
