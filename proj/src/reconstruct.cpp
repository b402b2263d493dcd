#include "gwzero/reconstruct.hpp"

#include <algorithm>
#include <functional>
#include <thread>

namespace gwzero {

namespace {

constexpr int kMaxDepth = 20000;

/** Multiset view of a sorted id vector: (id, multiplicity) pairs. */
std::vector<std::pair<int, int>> multiset_of(std::vector<int> const &ids)
{
	std::vector<std::pair<int, int>> out;
	for (int id : ids)
	{
		if (!out.empty() && out.back().first == id)
			++out.back().second;
		else
			out.emplace_back(id, 1);
	}
	return out;
}

int64_t ways_count(std::vector<std::pair<int, int>> const &ms,
                   std::vector<int> const &take)
{
	int64_t w = 1;
	for (size_t i = 0; i < ms.size(); ++i)
	{
		int64_t n = ms[i].second, k = take[i], c = 1;
		for (int64_t j = 0; j < k; ++j)
			c = c * (n - j) / (j + 1);
		w *= c;
	}
	return w;
}

} // namespace

Reconstructor::Reconstructor(GwTarget const &t, CorrelatorTable &table)
    : t_(t), table_(table), diag_(diagonal_class(t))
{
	if (t_.has_odd_classes())
		throw NotReconstructible(
		    {},
		    "reconstruction is only supported for targets with even "
		    "cohomology classes (odd classes: the seed system is not "
		    "claimed sufficient)");
}

Rational Reconstructor::value(LatticeVector const &beta,
                              std::vector<int> classes)
{
	return value_traced(beta, std::move(classes), nullptr);
}

Rational Reconstructor::value_traced(LatticeVector const &beta,
                                     std::vector<int> classes,
                                     Derivation *collect)
{
	auto canon = canonicalize(t_, beta, std::move(classes));
	if (canon.forced_zero)
		return Rational(0);
	auto red = reduce_full(t_, canon.key);
	if (red.is_value)
	{
		if (collect)
			++collect->reduced_terms;
		return canon.sign > 0 ? red.value : -red.value;
	}
	Rational v = red.multiplier * irreducible_value(red.residual, collect);
	return canon.sign > 0 ? v : -v;
}

Rational Reconstructor::irreducible_value(CorrelatorKey const &key,
                                          Derivation *collect)
{
	if (auto hit = table_.lookup(key))
	{
		if (collect)
			collect->table_deps.push_back(key);
		return *hit;
	}
	// pick the insertion of maximal st-degree as the designated slot
	int pos = 0;
	for (int i = 1; i < key.n(); ++i)
		if (t_.st(key.classes[i]) >= t_.st(key.classes[pos]))
			pos = i;
	Rational v = solve_designated(key, pos);
	if (collect)
		collect->table_deps.push_back(key);
	return v;
}

/**
 * Value of an irreducible key derived by the WDVV induction on the
 * designated slot: factor it through degree 2 and solve each instance for
 * the top-order term. Every other instance term lies strictly lower in
 * the cell order, except the one same-cell family, which recurses here
 * with the designated degree reduced by 2.
 */
Rational Reconstructor::solve_designated(CorrelatorKey const &key,
                                         int desig_pos)
{
	if (auto hit = table_.lookup(key))
		return *hit;
	int desig = key.classes[desig_pos];
	auto guard_key = std::make_pair(key, desig);
	if (in_progress_.count(guard_key) || depth_ >= kMaxDepth)
		throw std::logic_error(
		    "cycle detected in the reconstruction cell order "
		    "(implementation bug) at " +
		    key.str(t_));
	++depth_;
	in_progress_.insert(guard_key);
	struct Guard {
		Reconstructor *r;
		std::pair<CorrelatorKey, int> k;
		~Guard()
		{
			r->in_progress_.erase(k);
			--r->depth_;
		}
	} guard{this, guard_key};

	bool has_deg2_slot = false;
	for (int c : key.classes)
		has_deg2_slot = has_deg2_slot || t_.st(c) == Rational(2);
	if (key.n() == 3 && has_deg2_slot)
	{
		// an initial-system key: 3 points, a degree-2 slot, and
		// beta.c1 <= dim+1 forced by the selection rule
		throw MissingSeeds({key});
	}
	if (t_.st(desig) <= Rational(2))
		throw NotReconstructible(
		    key, "cannot reconstruct " + key.str(t_) +
		             ": no insertion of st-degree > 2 is left to factor and "
		             "no divisor can be stripped (twisted degree-2 classes "
		             "do not satisfy the divisor axiom)");

	auto factorization = factor_through_degree2(t_, desig);
	std::vector<int> others = key.classes;
	others.erase(others.begin() + desig_pos);

	auto deriv = std::make_shared<Derivation>();
	deriv->prov = Provenance::Reconstructed;
	deriv->factored_class = desig;
	deriv->pieces.assign(factorization.terms.begin(),
	                     factorization.terms.end());

	Rational v;
	for (auto const &piece : factorization.terms)
		v += piece.c *
		     instance_lump_traced(key.beta, others, piece.dprime, piece.d2,
		                          *deriv);

	std::sort(deriv->table_deps.begin(), deriv->table_deps.end());
	deriv->table_deps.erase(
	    std::unique(deriv->table_deps.begin(), deriv->table_deps.end()),
	    deriv->table_deps.end());
	table_.insert(key, v, Provenance::Reconstructed, std::move(deriv));
	return v;
}

Rational Reconstructor::instance_lump(LatticeVector const &beta,
                                      std::vector<int> const &others, int dp,
                                      int d2)
{
	Derivation scratch;
	return instance_lump_traced(beta, others, dp, d2, scratch);
}

/**
 * One WDVV instance on the insertions (others..., T_dp, T_d2) with the
 * special indices {1, 2, n, n+1}. Solves for the top-order term
 * <others (x) (T_dp cup T_d2)>_beta; all correlators are evaluated
 * through the memoized value path.
 */
Rational Reconstructor::instance_lump_traced(LatticeVector const &beta,
                                             std::vector<int> const &others,
                                             int dp, int d2, Derivation &deriv)
{
	int gi = others[0];
	int gj = others[1];
	std::vector<int> byst(others.begin() + 2, others.end());
	auto ms = multiset_of(byst);

	Rational rhs_minus_lhs;

	auto splits = splittings(t_, beta);
	std::vector<int> take(ms.size(), 0);
	std::vector<int> a_part, b_part;

	std::function<void(size_t)> enumerate = [&](size_t slot) {
		if (slot < ms.size())
		{
			for (take[slot] = 0; take[slot] <= ms[slot].second; ++take[slot])
				enumerate(slot + 1);
			take[slot] = 0;
			return;
		}
		a_part.clear();
		b_part.clear();
		for (size_t i = 0; i < ms.size(); ++i)
		{
			a_part.insert(a_part.end(), take[i], ms[i].first);
			b_part.insert(b_part.end(), ms[i].second - take[i], ms[i].first);
		}
		Rational w(ways_count(ms, take));
		bool b_empty = b_part.empty();

		for (auto const &[b1, b2] : splits)
		{
			bool b2_zero = true;
			for (auto x : b2)
				b2_zero = b2_zero && x == 0;
			bool top = b2_zero && b_empty;

			// LHS family <gi, gj, A, Te>_b1 g^{ef} <Tf, B, dp, d2>_b2;
			// the (b1 = beta, B empty) family is the unknown top-order term.
			if (!top)
			{
				for (auto const &[e, f, gef] : diag_)
				{
					std::vector<int> ka = {gi, gj, e};
					ka.insert(ka.end(), a_part.begin(), a_part.end());
					Rational va = value_traced(b1, std::move(ka), &deriv);
					if (!va.is_zero())
					{
						std::vector<int> kb = {f, dp, d2};
						kb.insert(kb.end(), b_part.begin(), b_part.end());
						rhs_minus_lhs -=
						    w * va * gef * value_traced(b2, std::move(kb), &deriv);
					}
				}
			}

			// RHS family <gj, dp, A, Te>_b1 g^{ef} <Tf, B, gi, d2>_b2;
			// the (b1 = beta, B empty) family stays in the same cell and is
			// routed through the designated slot dp (its st-degree dropped
			// by 2), which is what makes the induction terminate.
			if (top)
			{
				for (auto const &ct : t_.cup_terms(gi, d2))
				{
					std::vector<int> ids = {gj, ct.k};
					ids.insert(ids.end(), byst.begin(), byst.end());
					ids.push_back(dp);
					auto canon = canonicalize(t_, beta, std::move(ids));
					if (canon.forced_zero)
						continue;
					auto red = reduce_full(t_, canon.key);
					Rational vr;
					if (red.is_value)
					{
						++deriv.reduced_terms;
						vr = red.value;
					}
					else
					{
						int p = -1;
						for (int q = 0; q < red.residual.n(); ++q)
							if (red.residual.classes[q] == dp)
								p = q;
						// stripping may have consumed dp; fall back to the
						// maximal slot
						if (p < 0)
							vr = irreducible_value(red.residual, &deriv);
						else
						{
							vr = solve_designated(red.residual, p);
							deriv.table_deps.push_back(red.residual);
						}
						vr *= red.multiplier;
					}
					rhs_minus_lhs +=
					    ct.c * (canon.sign > 0 ? vr : -vr);
				}
				continue;
			}
			for (auto const &[e, f, gef] : diag_)
			{
				std::vector<int> ka = {gj, dp, e};
				ka.insert(ka.end(), a_part.begin(), a_part.end());
				Rational va = value_traced(b1, std::move(ka), &deriv);
				if (!va.is_zero())
				{
					std::vector<int> kb = {f, gi, d2};
					kb.insert(kb.end(), b_part.begin(), b_part.end());
					rhs_minus_lhs +=
					    w * va * gef * value_traced(b2, std::move(kb), &deriv);
				}
			}
		}
	};
	enumerate(0);
	return rhs_minus_lhs;
}

std::vector<LatticeVector> effective_classes_up_to(GwTarget const &t,
                                                   int64_t max_c1)
{
	for (auto c : t.lattice.c1_pairing)
		if (c <= 0)
			throw std::runtime_error(
			    "exhaustive enumeration needs beta.c1 > 0 on every lattice "
			    "generator");
	std::vector<LatticeVector> out;
	LatticeVector beta(t.lattice.rank, 0);
	std::function<void(int, int64_t)> rec = [&](int i, int64_t used) {
		if (i == t.lattice.rank)
		{
			out.push_back(beta);
			return;
		}
		int64_t c = t.lattice.c1_pairing[i];
		for (beta[i] = 0; used + beta[i] * c <= max_c1; ++beta[i])
			rec(i + 1, used + beta[i] * c);
		beta[i] = 0;
	};
	rec(0, 0);
	return out;
}

namespace {

/** All sorted id multisets of size n over 0..m-1. */
void enumerate_multisets(int m, int n,
                         std::function<void(std::vector<int> const &)> const &f)
{
	std::vector<int> ids(n, 0);
	std::function<void(int, int)> rec = [&](int slot, int min_id) {
		if (slot == n)
		{
			f(ids);
			return;
		}
		for (int id = min_id; id < m; ++id)
		{
			ids[slot] = id;
			rec(slot + 1, id);
		}
	};
	rec(0, 0);
}

} // namespace

CorrelatorTable reconstruct_all(GwTarget const &t, ReconstructOptions const &o)
{
	auto report = validate_target(t);
	if (!report.ok())
	{
		std::string msg = "invalid target:";
		for (auto const &e : report.errors)
			msg += "\n  " + e;
		throw std::runtime_error(msg);
	}

	CorrelatorTable table;
	for (auto const &s : t.seeds)
		table.insert(CorrelatorKey{s.beta, s.classes, +1}, s.value,
		             Provenance::Seed, std::make_shared<Derivation>());

	// candidate irreducible keys, grouped by cell level (beta.c1, n)
	std::vector<CorrelatorKey> todo;
	for (auto const &beta : effective_classes_up_to(t, o.max_c1))
		for (int n = 3; n <= o.max_n; ++n)
			enumerate_multisets(t.class_count(), n, [&](auto const &ids) {
				Rational total;
				for (int c : ids)
					total += t.st(c);
				if (total != selection_degree(t, n, beta))
					return;
				CorrelatorKey key{beta, ids, +1};
				if (reduce_step(t, key).kind == Reduction::Kind::Irreducible)
					todo.push_back(std::move(key));
			});
	std::stable_sort(todo.begin(), todo.end(),
	                 [&](CorrelatorKey const &a, CorrelatorKey const &b) {
		                 auto la = std::make_pair(t.beta_dot_c1(a.beta), a.n());
		                 auto lb = std::make_pair(t.beta_dot_c1(b.beta), b.n());
		                 return la < lb;
	                 });

	std::mutex err_mu;
	std::vector<CorrelatorKey> missing;
	std::vector<std::string> hard_errors;

	if (t.has_odd_classes())
		throw NotReconstructible(
		    {}, "reconstruction is only supported for targets with even "
		        "cohomology classes (odd classes: the seed system is not "
		        "claimed sufficient)");

	auto run_chunk = [&](std::vector<CorrelatorKey const *> const &chunk) {
		Reconstructor rec(t, table);
		for (auto const *key : chunk)
		{
			try
			{
				rec.value(key->beta, key->classes);
			}
			catch (MissingSeeds const &m)
			{
				std::lock_guard lock(err_mu);
				missing.insert(missing.end(), m.keys.begin(), m.keys.end());
			}
			catch (std::exception const &e)
			{
				std::lock_guard lock(err_mu);
				hard_errors.push_back(e.what());
			}
		}
	};

	// cells with the same level are independent; levels run in order
	size_t i = 0;
	while (i < todo.size())
	{
		size_t j = i;
		auto level = std::make_pair(t.beta_dot_c1(todo[i].beta), todo[i].n());
		while (j < todo.size() &&
		       std::make_pair(t.beta_dot_c1(todo[j].beta), todo[j].n()) == level)
			++j;
		int jobs = std::max(1, o.jobs);
		if (jobs == 1 || j - i < 2)
		{
			std::vector<CorrelatorKey const *> chunk;
			for (size_t k = i; k < j; ++k)
				chunk.push_back(&todo[k]);
			run_chunk(chunk);
		}
		else
		{
			std::vector<std::vector<CorrelatorKey const *>> chunks(
			    std::min<size_t>(jobs, j - i));
			for (size_t k = i; k < j; ++k)
				chunks[(k - i) % chunks.size()].push_back(&todo[k]);
			std::vector<std::thread> pool;
			for (auto const &c : chunks)
				pool.emplace_back(run_chunk, std::cref(c));
			for (auto &th : pool)
				th.join();
		}
		i = j;
	}

	if (!hard_errors.empty())
		throw std::runtime_error(hard_errors.front());
	if (!missing.empty())
	{
		std::sort(missing.begin(), missing.end());
		missing.erase(std::unique(missing.begin(), missing.end()),
		              missing.end());
		throw MissingSeeds(std::move(missing));
	}
	return table;
}

namespace {

void explain_rec(GwTarget const &t, CorrelatorTable const &table,
                 CorrelatorKey const &key, int indent,
                 std::set<CorrelatorKey> &visited, std::string &out)
{
	std::string pad(indent * 2, ' ');
	auto const *e = table.entry(key);
	if (e == nullptr)
	{
		auto red = reduce_full(t, key);
		if (red.is_value)
		{
			out += pad + key.str(t) + " = " + red.value.str() + "  [";
			for (size_t i = 0; i < red.rules.size(); ++i)
				out += (i ? "; " : "") + red.rules[i];
			out += "]\n";
			return;
		}
		if (!red.rules.empty())
		{
			// a strip chain ending in a stored irreducible key
			auto const *res = table.entry(red.residual);
			if (res == nullptr)
				throw UnknownCorrelator(key,
				                        "unknown correlator " + key.str(t));
			out += pad + key.str(t) + " = " +
			       (red.multiplier * res->value).str() + "  [";
			for (size_t i = 0; i < red.rules.size(); ++i)
				out += (i ? "; " : "") + red.rules[i];
			out += "]\n";
			explain_rec(t, table, red.residual, indent + 1, visited, out);
			return;
		}
		throw UnknownCorrelator(key, "unknown correlator " + key.str(t));
	}
	out += pad + key.str(t) + " = " + e->value.str() + "  [" +
	       provenance_str(e->prov) + "]\n";
	if (!visited.insert(key).second)
	{
		if (e->deriv && e->deriv->prov == Provenance::Reconstructed)
			out += pad + "  (derivation shown above)\n";
		return;
	}
	if (e->deriv && e->deriv->prov == Provenance::Reconstructed)
	{
		out += pad + "  via WDVV, factoring " +
		       t.basis[e->deriv->factored_class].label + " = ";
		for (size_t i = 0; i < e->deriv->pieces.size(); ++i)
		{
			auto const &p = e->deriv->pieces[i];
			if (i)
				out += " + ";
			if (p.c != Rational(1))
				out += "(" + p.c.str() + ")*";
			out += t.basis[p.dprime].label + " cup " + t.basis[p.d2].label;
		}
		out += "; " + std::to_string(e->deriv->reduced_terms) +
		       " axiom-reduced terms, referenced entries:\n";
		for (auto const &dep : e->deriv->table_deps)
			if (!(dep == key))
				explain_rec(t, table, dep, indent + 2, visited, out);
	}
}

} // namespace

std::string explain(GwTarget const &t, CorrelatorTable const &table,
                    LatticeVector const &beta, std::vector<int> classes)
{
	auto canon = canonicalize(t, beta, std::move(classes));
	std::string out;
	if (canon.forced_zero)
		return canon.key.str(t) + " = 0  [repeated odd insertion => 0]\n";
	if (canon.sign < 0)
		out += "sign -1 from sorting odd insertions\n";
	std::set<CorrelatorKey> visited;
	explain_rec(t, table, canon.key, 0, visited, out);
	return out;
}

} // namespace gwzero
