#pragma once

#include "gwzero/correlator.hpp"

#include <set>
#include <string>
#include <vector>

namespace gwzero {

/**
 * Partial order on cells (beta, n): a cell dominates another when the
 * beta difference is effective and nonzero, or beta agrees and n is
 * larger. Well-founded on the effective orthant x {n >= 3}.
 */
struct CellOrder {
	static bool strictly_greater(LatticeVector const &beta_a, int n_a,
	                             LatticeVector const &beta_b, int n_b)
	{
		bool equal = true, dominates = true;
		for (size_t i = 0; i < beta_a.size(); ++i)
		{
			if (beta_a[i] != beta_b[i])
				equal = false;
			if (beta_a[i] < beta_b[i])
				dominates = false;
		}
		if (!equal && dominates)
			return true;
		return equal && n_a > n_b;
	}
};

struct MissingSeeds : std::runtime_error {
	std::vector<CorrelatorKey> keys;
	explicit MissingSeeds(std::vector<CorrelatorKey> k)
	    : std::runtime_error("missing seed correlators"), keys(std::move(k))
	{
	}
};

struct NotReconstructible : std::runtime_error {
	CorrelatorKey key;
	NotReconstructible(CorrelatorKey k, std::string const &why)
	    : std::runtime_error(why), key(std::move(k))
	{
	}
};

struct ReconstructOptions {
	int64_t max_c1 = 0;
	int max_n = 3;
	int jobs = 1;
};

/**
 * Demand-driven solver: computes correlator values from the seed system
 * by the WDVV induction, memoizing every sub-correlator in the shared
 * table. One instance per thread; the table may be shared.
 */
class Reconstructor {
  public:
	Reconstructor(GwTarget const &t, CorrelatorTable &table);

	/** Value of an arbitrary insertion list (canonicalized internally). */
	Rational value(LatticeVector const &beta, std::vector<int> classes);

	GwTarget const &target() const { return t_; }
	CorrelatorTable &table() { return table_; }

	/**
	 * Solve one WDVV instance directly: the value of
	 * <others (x) (T_dp cup T_d2)>_beta with the factor pair placed in the
	 * last two slots. Exposed for the factorization-independence checks.
	 */
	Rational instance_lump(LatticeVector const &beta,
	                       std::vector<int> const &others, int dp, int d2);

  private:
	Rational value_traced(LatticeVector const &beta, std::vector<int> classes,
	                      Derivation *collect);
	Rational irreducible_value(CorrelatorKey const &key, Derivation *collect);
	Rational solve_designated(CorrelatorKey const &key, int desig_pos);
	Rational instance_lump_traced(LatticeVector const &beta,
	                              std::vector<int> const &others, int dp,
	                              int d2, Derivation &deriv);

	GwTarget const &t_;
	CorrelatorTable &table_;
	std::vector<std::tuple<int, int, Rational>> diag_;
	std::set<std::pair<CorrelatorKey, int>> in_progress_;
	int depth_ = 0;
};

/**
 * Exhaustive reconstruction: every irreducible correlator with
 * beta.c1 <= max_c1 and n <= max_n, from the target's seed system.
 */
CorrelatorTable reconstruct_all(GwTarget const &t, ReconstructOptions const &o);

/** Effective classes with beta.c1 <= max, in lexicographic order. */
std::vector<LatticeVector> effective_classes_up_to(GwTarget const &t,
                                                   int64_t max_c1);

/** Human-readable derivation trace of a table entry. */
std::string explain(GwTarget const &t, CorrelatorTable const &table,
                    LatticeVector const &beta, std::vector<int> classes);

} // namespace gwzero
