#pragma once

// Test-only oracles, kept independent of the engine's implementation paths.

#include "gwzero/rational.hpp"
#include "gwzero/series.hpp"

#include <vector>

namespace gwzero::oracles {

/**
 * Rational plane curve counts N_d through 3d-1 general points, via the
 * two-term binomial recursion obtained by instantiating the associativity
 * equation on the projective plane at four marked points:
 *
 *   N_d = sum_{d1+d2=d} N_{d1} N_{d2} (d1^2 d2^2 C(3d-4, 3d1-2)
 *                                      - d1^3 d2  C(3d-4, 3d1-1)),  N_1 = 1.
 */
inline Rational kontsevich_number(int d)
{
	if (d < 1)
		throw std::invalid_argument("kontsevich_number: d < 1");
	std::vector<Rational> n(d + 1);
	n[1] = Rational(1);
	for (int k = 2; k <= d; ++k)
	{
		Rational acc;
		for (int d1 = 1; d1 < k; ++d1)
		{
			int d2 = k - d1;
			Rational term = Rational(d1) * Rational(d1) * Rational(d2) *
			                    Rational(d2) *
			                    Rational::binomial(3 * k - 4, 3 * d1 - 2) -
			                Rational(d1) * Rational(d1) * Rational(d1) *
			                    Rational(d2) *
			                    Rational::binomial(3 * k - 4, 3 * d1 - 1);
			acc += n[d1] * n[d2] * term;
		}
		n[k] = acc;
	}
	return n[d];
}

/**
 * Sign of sorting a parity-labelled sequence by brute-force bubble sort,
 * flipping once per transposition of two odd entries.
 */
inline int bubble_sort_sign(std::vector<int> ids,
                            std::vector<int> const &parity)
{
	int sign = 1;
	bool moved = true;
	while (moved)
	{
		moved = false;
		for (size_t i = 0; i + 1 < ids.size(); ++i)
			if (ids[i] > ids[i + 1])
			{
				if (parity[ids[i]] && parity[ids[i + 1]])
					sign = -sign;
				std::swap(ids[i], ids[i + 1]);
				moved = true;
			}
	}
	return sign;
}

/**
 * Brute-force evaluation of the reordering sign eps(a): lay out the word
 * (t_0 T_0)^{a_0} ... (t_m T_m)^{a_m} as explicit symbols and bubble it
 * into T_0^{a_0}...T_m^{a_m} t_0^{a_0}...t_m^{a_m}.
 */
inline int epsilon_bubble_oracle(std::vector<int32_t> const &a,
                                 SignRule const &s)
{
	struct Sym {
		bool is_t;
		int var;
		int odd;
	};
	std::vector<Sym> word;
	for (size_t i = 0; i < a.size(); ++i)
		for (int k = 0; k < a[i]; ++k)
		{
			word.push_back({true, static_cast<int>(i), s.odd(i) ? 1 : 0});
			word.push_back({false, static_cast<int>(i), s.odd(i) ? 1 : 0});
		}
	// target order: all T symbols (by variable), then all t symbols
	auto rank = [&](Sym const &x) {
		return (x.is_t ? 1000000 : 0) + x.var;
	};
	int sign = 1;
	bool moved = true;
	while (moved)
	{
		moved = false;
		for (size_t i = 0; i + 1 < word.size(); ++i)
			if (rank(word[i]) > rank(word[i + 1]))
			{
				if (word[i].odd && word[i + 1].odd)
					sign = -sign;
				std::swap(word[i], word[i + 1]);
				moved = true;
			}
	}
	return sign;
}

} // namespace gwzero::oracles
