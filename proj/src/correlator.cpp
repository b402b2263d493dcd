#include "gwzero/correlator.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gwzero {

using nlohmann::json;

std::string CorrelatorKey::str(GwTarget const &t) const
{
	std::string s = "<";
	for (size_t i = 0; i < classes.size(); ++i)
		s += (i ? "," : "") + t.basis[classes[i]].label;
	s += ">_(";
	for (size_t i = 0; i < beta.size(); ++i)
		s += (i ? "," : "") + std::to_string(beta[i]);
	return s + ")";
}

Canonicalized canonicalize(GwTarget const &t, LatticeVector beta,
                           std::vector<int> classes)
{
	if (beta.size() != static_cast<size_t>(t.lattice.rank))
		throw std::invalid_argument("canonicalize: beta has wrong rank");
	for (int c : classes)
		if (c < 0 || c >= t.class_count())
			throw std::invalid_argument("canonicalize: basis id out of range");
	Canonicalized out;
	int sign = 1;
	for (size_t i = 1; i < classes.size(); ++i)
		for (size_t j = i; j > 0 && classes[j] < classes[j - 1]; --j)
		{
			if (t.parity(classes[j]) && t.parity(classes[j - 1]))
				sign = -sign;
			std::swap(classes[j], classes[j - 1]);
		}
	for (size_t i = 1; i < classes.size(); ++i)
		if (classes[i] == classes[i - 1] && t.parity(classes[i]))
			out.forced_zero = true;
	out.key = {std::move(beta), std::move(classes), +1};
	out.sign = sign;
	return out;
}

std::string provenance_str(Provenance p)
{
	switch (p)
	{
	case Provenance::Seed:
		return "seed";
	case Provenance::Reduced:
		return "reduced";
	case Provenance::Reconstructed:
		return "reconstructed";
	}
	return "?";
}

Provenance provenance_parse(std::string const &s)
{
	if (s == "seed")
		return Provenance::Seed;
	if (s == "reduced")
		return Provenance::Reduced;
	if (s == "reconstructed")
		return Provenance::Reconstructed;
	throw std::invalid_argument("unknown provenance '" + s + "'");
}

std::optional<Rational> CorrelatorTable::lookup(CorrelatorKey const &key) const
{
	std::lock_guard lock(mu_);
	auto it = entries_.find(key);
	if (it == entries_.end())
		return std::nullopt;
	return it->second.value;
}

CorrelatorTable::Entry const *CorrelatorTable::entry(CorrelatorKey const &key) const
{
	std::lock_guard lock(mu_);
	auto it = entries_.find(key);
	return it == entries_.end() ? nullptr : &it->second;
}

void CorrelatorTable::insert(CorrelatorKey const &key, Rational value,
                             Provenance prov,
                             std::shared_ptr<const Derivation> deriv)
{
	std::lock_guard lock(mu_);
	auto it = entries_.find(key);
	if (it != entries_.end())
	{
		if (it->second.value != value)
			throw std::logic_error("conflicting values for stored correlator");
		return;
	}
	entries_.emplace(key, Entry{std::move(value), prov, std::move(deriv)});
}

namespace {

std::string join_ints(auto const &v)
{
	std::string s;
	for (size_t i = 0; i < v.size(); ++i)
		s += (i ? ";" : "") + std::to_string(v[i]);
	return s;
}

template <typename Int>
std::vector<Int> split_ints(std::string const &s)
{
	std::vector<Int> out;
	std::stringstream ss(s);
	std::string part;
	while (std::getline(ss, part, ';'))
		out.push_back(static_cast<Int>(std::stoll(part)));
	return out;
}

} // namespace

std::string CorrelatorTable::to_csv() const
{
	std::lock_guard lock(mu_);
	std::string out = "beta,classes,value,provenance\n";
	for (auto const &[key, e] : entries_)
		out += join_ints(key.beta) + "," + join_ints(key.classes) + "," +
		       e.value.str() + "," + provenance_str(e.prov) + "\n";
	return out;
}

CorrelatorTable CorrelatorTable::from_csv(std::string const &text)
{
	CorrelatorTable t;
	std::stringstream ss(text);
	std::string line;
	if (!std::getline(ss, line) || line != "beta,classes,value,provenance")
		throw std::invalid_argument("bad CSV header for correlator table");
	size_t lineno = 1;
	while (std::getline(ss, line))
	{
		++lineno;
		if (line.empty())
			continue;
		std::vector<std::string> cols;
		std::stringstream ls(line);
		std::string col;
		while (std::getline(ls, col, ','))
			cols.push_back(col);
		if (cols.size() != 4)
			throw std::invalid_argument("bad CSV row at line " +
			                            std::to_string(lineno));
		CorrelatorKey key{split_ints<int64_t>(cols[0]),
		                  split_ints<int>(cols[1]), +1};
		t.insert(key, Rational::parse(cols[2]), provenance_parse(cols[3]));
	}
	return t;
}

std::string CorrelatorTable::to_json() const
{
	std::lock_guard lock(mu_);
	json entries = json::array();
	for (auto const &[key, e] : entries_)
	{
		json row;
		row["beta"] = key.beta;
		row["classes"] = key.classes;
		row["value"] = e.value.str();
		row["provenance"] = provenance_str(e.prov);
		entries.push_back(std::move(row));
	}
	json doc;
	doc["entries"] = std::move(entries);
	return doc.dump(2) + "\n";
}

CorrelatorTable CorrelatorTable::from_json(std::string const &text)
{
	json doc = json::parse(text);
	CorrelatorTable t;
	for (auto const &row : doc.at("entries"))
	{
		CorrelatorKey key{row.at("beta").get<std::vector<int64_t>>(),
		                  row.at("classes").get<std::vector<int>>(), +1};
		t.insert(key, Rational::parse(row.at("value").get<std::string>()),
		         provenance_parse(row.at("provenance").get<std::string>()));
	}
	return t;
}

void CorrelatorTable::save(std::string const &path,
                           std::string const &format) const
{
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw std::runtime_error("cannot write " + path);
	out << (format == "json" ? to_json() : to_csv());
}

CorrelatorTable CorrelatorTable::load(std::string const &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw std::runtime_error("cannot open table file " + path);
	std::stringstream ss;
	ss << in.rdbuf();
	std::string text = ss.str();
	auto first = text.find_first_not_of(" \t\r\n");
	if (first != std::string::npos && text[first] == '{')
		return from_json(text);
	return from_csv(text);
}

Reduction reduce_step(GwTarget const &t, CorrelatorKey const &key)
{
	Reduction r;
	int n = key.n();
	if (n < 3)
		return {Reduction::Kind::Value, Rational(0), {}, {}, "n<3 => 0"};
	if (!GwTarget::effective(key.beta))
		return {Reduction::Kind::Value, Rational(0), {}, {}, "effectivity => 0"};

	Rational total;
	for (int c : key.classes)
		total += t.st(c);
	if (total != selection_degree(t, n, key.beta))
		return {Reduction::Kind::Value, Rational(0), {}, {}, "grading => 0"};

	bool beta_zero = true;
	for (auto b : key.beta)
		beta_zero = beta_zero && b == 0;

	if (!key.classes.empty() && key.classes.front() == 0)
	{
		// fundamental-class insertion
		if (beta_zero && n == 3)
			return {Reduction::Kind::Value,
			        t.pairing.g[key.classes[1]][key.classes[2]],
			        {},
			        {},
			        "fundamental class (pairing)"};
		return {Reduction::Kind::Value, Rational(0), {}, {},
		        "fundamental class => 0"};
	}
	if (beta_zero && n == 3)
		return {Reduction::Kind::Value,
		        t.classical_triple(key.classes[0], key.classes[1],
		                           key.classes[2]),
		        {},
		        {},
		        "classical triple"};
	if (n > 3)
	{
		for (size_t i = 0; i < key.classes.size(); ++i)
		{
			int id = key.classes[i];
			if (!t.is_divisor_class(id))
				continue;
			CorrelatorKey smaller = key;
			smaller.classes.erase(smaller.classes.begin() + i);
			return {Reduction::Kind::Reduced, {},
			        std::move(smaller),
			        Rational(t.beta_dot_divisor(id, key.beta)),
			        "divisor strip " + t.basis[id].label};
		}
	}
	r.kind = Reduction::Kind::Irreducible;
	return r;
}

FullReduction reduce_full(GwTarget const &t, CorrelatorKey key)
{
	FullReduction out;
	out.multiplier = Rational(1);
	int guard = key.n() + 2;
	while (guard-- > 0)
	{
		Reduction r = reduce_step(t, key);
		if (r.kind == Reduction::Kind::Value)
		{
			out.is_value = true;
			out.value = out.multiplier * r.value;
			out.rules.push_back(r.rule);
			return out;
		}
		if (r.kind == Reduction::Kind::Irreducible)
		{
			out.residual = std::move(key);
			return out;
		}
		out.rules.push_back(r.rule + " x(" + r.multiplier.str() + ")");
		out.multiplier *= r.multiplier;
		if (out.multiplier.is_zero())
		{
			out.is_value = true;
			out.value = Rational(0);
			return out;
		}
		key = std::move(r.smaller);
	}
	throw std::logic_error("reduce did not terminate in n steps");
}

Rational get_or_fail(CorrelatorTable const &table, CorrelatorKey const &key)
{
	if (auto v = table.lookup(key))
		return *v;
	throw UnknownCorrelator(key, "unknown correlator");
}

} // namespace gwzero
