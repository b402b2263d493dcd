#include "gwzero/quantum.hpp"
#include "gwzero/reconstruct.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace gwzero;

namespace {

// exit codes: 0 ok, 1 mathematical failure, 2 missing inputs, 3 i/o or parse
constexpr int kOk = 0, kMathFail = 1, kMissing = 2, kIoError = 3;

struct KeySpec {
	LatticeVector beta;
	std::vector<int> classes;
};

/** Parse "b1;b2;...|C1,C2,..." where classes are labels or ids. */
KeySpec parse_key(GwTarget const &t, std::string const &s)
{
	auto bar = s.find('|');
	if (bar == std::string::npos)
		throw std::invalid_argument(
		    "key must look like 'beta|classes', e.g. '1|H2,H2,H'");
	KeySpec k;
	std::stringstream bs(s.substr(0, bar));
	std::string part;
	while (std::getline(bs, part, ';'))
		k.beta.push_back(std::stoll(part));
	std::stringstream cs(s.substr(bar + 1));
	while (std::getline(cs, part, ','))
		k.classes.push_back(t.label_to_id(part));
	if (k.beta.size() != static_cast<size_t>(t.lattice.rank))
		throw std::invalid_argument("key beta has wrong rank");
	return k;
}

int print_validation(GwTarget const &t)
{
	auto report = validate_target(t);
	for (auto const &w : report.warnings)
		std::cout << "warning: " << w << "\n";
	for (auto const &e : report.errors)
		std::cout << "error: " << e << "\n";
	if (report.ok())
	{
		std::cout << t.name << ": valid (" << t.class_count()
		          << " basis classes, dim " << t.dim << ")\n";
		return kOk;
	}
	return kMathFail;
}

CorrelatorTable table_for(GwTarget const &t, std::string const &table_path,
                          ReconstructOptions const &opts)
{
	if (!table_path.empty())
		return CorrelatorTable::load(table_path);
	return reconstruct_all(t, opts);
}

void write_out(std::string const &path, std::string const &content)
{
	if (path.empty() || path == "-")
	{
		std::cout << content;
		return;
	}
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw std::runtime_error("cannot write " + path);
	out << content;
}

int run(int argc, char **argv)
{
	CLI::App app{"exact genus-zero Gromov-Witten engine"};
	app.require_subcommand(1);

	std::string target_path, table_path, out_path, format = "csv", trace_key,
	            at_point;
	long long max_c1 = 0;
	int max_n = 3, jobs = 1;

	auto add_common = [&](CLI::App *cmd, bool with_cutoff) {
		cmd->add_option("target", target_path, "target JSON file")
		    ->required();
		if (with_cutoff)
		{
			cmd->add_option("--max-c1", max_c1, "Novikov cutoff beta.c1");
			cmd->add_option("--max-n", max_n, "max number of insertions");
			cmd->add_option("--jobs", jobs, "worker threads");
		}
	};

	auto *validate = app.add_subcommand("validate", "check target invariants");
	add_common(validate, false);

	auto *reconstruct =
	    app.add_subcommand("reconstruct", "compute all correlators to cutoff");
	add_common(reconstruct, true);
	reconstruct->add_option("-o,--out", out_path, "output path");
	reconstruct->add_option("--format", format, "csv|json")
	    ->check(CLI::IsMember({"csv", "json"}));
	reconstruct->add_option("--trace", trace_key,
	                        "print the derivation of one key, 'beta|classes'");

	auto *potential =
	    app.add_subcommand("potential", "emit the truncated potential");
	add_common(potential, true);
	potential->add_option("-o,--out", out_path, "output path");
	potential->add_option("--table", table_path, "correlator table to use");

	auto *qmul = app.add_subcommand("qmul", "quantum product of basis classes");
	add_common(qmul, true);
	std::vector<std::string> symbols;
	qmul->add_option("classes", symbols, "basis symbols, e.g. H H")
	    ->required()
	    ->expected(-1);
	qmul->add_option("--table", table_path, "correlator table to use");
	qmul->add_option("--at", at_point,
	                 "t-point 't0=0,t1=1/2,...' (default: all zero)");

	auto *wdvv = app.add_subcommand("wdvv", "verify the WDVV equation");
	add_common(wdvv, true);
	wdvv->add_option("--table", table_path, "correlator table to use");

	auto *explain_cmd =
	    app.add_subcommand("explain", "derivation trace of one correlator");
	add_common(explain_cmd, true);
	std::string explain_key;
	explain_cmd->add_option("key", explain_key, "'beta|classes'")->required();
	explain_cmd->add_option("--table", table_path, "correlator table to use");

	try
	{
		app.parse(argc, argv);
	}
	catch (CLI::ParseError const &e)
	{
		int code = app.exit(e);
		return code == 0 ? kOk : kIoError;
	}

	GwTarget t = load_target(target_path);
	ReconstructOptions opts{max_c1, max_n, jobs};

	if (validate->parsed())
		return print_validation(t);

	// every other command needs a valid target
	if (!validate_target(t).ok())
	{
		print_validation(t);
		return kMathFail;
	}

	if (reconstruct->parsed())
	{
		auto t0 = std::chrono::steady_clock::now();
		CorrelatorTable table = reconstruct_all(t, opts);
		auto dt = std::chrono::duration<double>(
		              std::chrono::steady_clock::now() - t0)
		              .count();
		size_t seeds = 0;
		for (auto const &[k, e] : table.entries())
			seeds += e.prov == Provenance::Seed ? 1 : 0;
		table.save(out_path.empty() ? "-" : out_path, format);
		if (!out_path.empty())
			std::cout << "wrote " << out_path << "\n";
		std::cout << "cells computed: " << table.size() << " (seeds: " << seeds
		          << ", reconstructed: " << table.size() - seeds << ") in "
		          << dt << "s\n";
		if (!trace_key.empty())
		{
			auto k = parse_key(t, trace_key);
			std::cout << explain(t, table, k.beta, k.classes);
		}
		return kOk;
	}

	if (potential->parsed())
	{
		CorrelatorTable table = table_for(t, table_path, opts);
		Potential p = build_potential(t, table, max_c1, max_n);
		write_out(out_path, potential_to_json(p));
		if (auto bad = homogeneity_violation(p))
			std::cout << "warning: potential not homogeneous\n";
		return kOk;
	}

	if (qmul->parsed())
	{
		if (max_c1 == 0)
			max_c1 = 2 * (t.dim + 1);
		opts.max_c1 = max_c1;
		CorrelatorTable table = table_for(t, table_path, opts);
		Potential p = build_potential(t, table, max_c1, max_n);
		std::vector<Rational> t_point(t.class_count(), Rational(0));
		if (!at_point.empty())
		{
			std::stringstream ss(at_point);
			std::string item;
			while (std::getline(ss, item, ','))
			{
				auto eq = item.find('=');
				if (eq == std::string::npos)
					throw std::invalid_argument("bad --at entry " + item);
				int id = t.label_to_id(item.substr(0, eq));
				t_point[id] = Rational::parse(item.substr(eq + 1));
			}
		}
		QuantumElement acc = basis_element(p, t.label_to_id(symbols[0]));
		for (size_t i = 1; i < symbols.size(); ++i)
			acc = quantum_mul(p, acc,
			                  basis_element(p, t.label_to_id(symbols[i])));
		acc = evaluate_t(acc, t_point);
		std::cout << acc.str(t) << "\n";
		return kOk;
	}

	if (wdvv->parsed())
	{
		CorrelatorTable table = table_for(t, table_path, opts);
		Potential p = build_potential(t, table, max_c1, max_n);
		if (auto w = wdvv_check(p))
		{
			std::vector<std::string> names;
			for (auto const &b : t.basis)
				names.push_back(b.label);
			TruncatedSeries mono(p.vars, p.series.cutoff());
			mono.add_term(w->monomial, w->value);
			std::cout << "WDVV fails at (" << t.basis[w->i].label << ","
			          << t.basis[w->j].label << "," << t.basis[w->h].label
			          << "," << t.basis[w->l].label
			          << "): residual term " << mono.str(names) << "\n";
			return kMathFail;
		}
		std::cout << "WDVV residual vanishes for all "
		          << t.class_count() * t.class_count() * t.class_count() *
		                 t.class_count()
		          << " index quadruples (beta.c1 <= " << max_c1
		          << ", n <= " << max_n << ")\n";
		return kOk;
	}

	if (explain_cmd->parsed())
	{
		auto k = parse_key(t, explain_key);
		if (!table_path.empty())
		{
			CorrelatorTable table = CorrelatorTable::load(table_path);
			std::cout << explain(t, table, k.beta, k.classes);
		}
		else
		{
			// demand-driven: compute just the dependency cone of the key
			CorrelatorTable table;
			for (auto const &s : t.seeds)
				table.insert(CorrelatorKey{s.beta, s.classes, +1}, s.value,
				             Provenance::Seed, std::make_shared<Derivation>());
			Reconstructor rec(t, table);
			rec.value(k.beta, k.classes);
			std::cout << explain(t, table, k.beta, k.classes);
		}
		return kOk;
	}
	return kOk;
}

} // namespace

int main(int argc, char **argv)
{
	try
	{
		return run(argc, argv);
	}
	catch (MissingSeeds const &e)
	{
		std::cout << "missing seed correlators:\n";
		for (auto const &k : e.keys)
		{
			std::cout << "  beta=";
			for (size_t i = 0; i < k.beta.size(); ++i)
				std::cout << (i ? ";" : "") << k.beta[i];
			std::cout << " classes=";
			for (size_t i = 0; i < k.classes.size(); ++i)
				std::cout << (i ? "," : "") << k.classes[i];
			std::cout << "\n";
		}
		return kMissing;
	}
	catch (UnknownCorrelator const &e)
	{
		std::cout << "insufficient table coverage: " << e.what() << "\n";
		return kMissing;
	}
	catch (std::invalid_argument const &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return kIoError;
	}
	catch (nlohmann::json::exception const &e)
	{
		std::cerr << "parse error: " << e.what() << "\n";
		return kIoError;
	}
	catch (std::exception const &e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return kIoError;
	}
}
