#pragma once

#include "gwzero/target.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gwzero {

/**
 * Canonical correlator key: effective curve class plus the insertion
 * multiset stored as a sorted id vector. The sign is the Koszul sign
 * accumulated while sorting odd insertions; stored table entries always
 * carry sign +1.
 */
struct CorrelatorKey {
	LatticeVector beta;
	std::vector<int> classes;
	int sign = +1;

	int n() const { return static_cast<int>(classes.size()); }
	friend bool operator==(CorrelatorKey const &a, CorrelatorKey const &b)
	{
		return a.beta == b.beta && a.classes == b.classes;
	}
	friend auto operator<=>(CorrelatorKey const &a, CorrelatorKey const &b)
	{
		if (auto c = a.beta <=> b.beta; c != 0)
			return c;
		return a.classes <=> b.classes;
	}
	std::string str(GwTarget const &t) const;
};

struct Canonicalized {
	CorrelatorKey key; // sign +1
	int sign = +1;
	bool forced_zero = false; // duplicate odd insertion
};

/** Sort insertions, tracking the S_n-covariance sign. */
Canonicalized canonicalize(GwTarget const &t, LatticeVector beta,
                           std::vector<int> classes);

enum class Provenance { Seed, Reduced, Reconstructed };

std::string provenance_str(Provenance p);
Provenance provenance_parse(std::string const &s);

/** How a stored value was obtained, for derivation traces. */
struct Derivation {
	Provenance prov = Provenance::Seed;
	int factored_class = -1;               // reconstructed only
	std::vector<Degree2Term> pieces;       // factorization used
	std::vector<CorrelatorKey> table_deps; // stored keys referenced
	long reduced_terms = 0;                // axiom-evaluated terms folded in
};

/**
 * Canonical store of genus-zero correlators. Single writer, many readers:
 * reconstruction inserts entries in dependency order.
 */
class CorrelatorTable {
  public:
	struct Entry {
		Rational value;
		Provenance prov;
		std::shared_ptr<const Derivation> deriv;
	};

	CorrelatorTable() = default;
	CorrelatorTable(CorrelatorTable &&o) noexcept
	    : entries_(std::move(o.entries_))
	{
	}
	CorrelatorTable &operator=(CorrelatorTable &&o) noexcept
	{
		entries_ = std::move(o.entries_);
		return *this;
	}

	std::optional<Rational> lookup(CorrelatorKey const &key) const;
	Entry const *entry(CorrelatorKey const &key) const;

	/** Insert, or verify agreement when the key is already present. */
	void insert(CorrelatorKey const &key, Rational value, Provenance prov,
	            std::shared_ptr<const Derivation> deriv = nullptr);

	size_t size() const { return entries_.size(); }
	std::map<CorrelatorKey, Entry> const &entries() const { return entries_; }

	std::string to_csv() const;
	std::string to_json() const;
	static CorrelatorTable from_csv(std::string const &text);
	static CorrelatorTable from_json(std::string const &text);
	void save(std::string const &path, std::string const &format) const;
	static CorrelatorTable load(std::string const &path);

  private:
	std::map<CorrelatorKey, Entry> entries_;
	mutable std::mutex mu_;
};

struct Reduction {
	enum class Kind { Value, Reduced, Irreducible };
	Kind kind = Kind::Irreducible;
	Rational value;          // Kind::Value
	CorrelatorKey smaller;   // Kind::Reduced
	Rational multiplier;     // Kind::Reduced
	std::string rule;        // human-readable rule name
};

/**
 * One normalizing step: effectivity, selection rule, fundamental class,
 * classical triple, divisor stripping, in that order.
 */
Reduction reduce_step(GwTarget const &t, CorrelatorKey const &key);

struct FullReduction {
	bool is_value = false;
	Rational value;          // when is_value
	CorrelatorKey residual;  // irreducible key otherwise
	Rational multiplier;     // residual coefficient
	std::vector<std::string> rules;
};

/** Drive reduce_step to a value or an irreducible key (at most n steps). */
FullReduction reduce_full(GwTarget const &t, CorrelatorKey key);

/** Value of an irreducible key; throws UnknownCorrelator when absent. */
Rational get_or_fail(CorrelatorTable const &table, CorrelatorKey const &key);

struct UnknownCorrelator : std::runtime_error {
	CorrelatorKey key;
	explicit UnknownCorrelator(CorrelatorKey k, std::string const &what)
	    : std::runtime_error(what), key(std::move(k))
	{
	}
};

} // namespace gwzero
