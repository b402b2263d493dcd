#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gwzero/quantum.hpp"
#include "gwzero/reconstruct.hpp"

namespace py = pybind11;
using namespace gwzero;

namespace {

std::vector<std::string> basis_labels(GwTarget const &t)
{
	std::vector<std::string> out;
	for (auto const &b : t.basis)
		out.push_back(b.label);
	return out;
}

py::dict validation_dict(ValidationReport const &r)
{
	py::dict d;
	d["errors"] = r.errors;
	d["warnings"] = r.warnings;
	d["ok"] = r.ok();
	return d;
}

py::list table_entries(CorrelatorTable const &table)
{
	py::list out;
	for (auto const &[key, e] : table.entries())
	{
		py::dict row;
		row["beta"] = key.beta;
		row["classes"] = key.classes;
		row["value"] = e.value.str();
		row["provenance"] = provenance_str(e.prov);
		out.append(std::move(row));
	}
	return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
	m.doc() = "exact genus-zero Gromov-Witten engine";

	py::class_<GwTarget>(m, "Target")
	    .def_readonly("name", &GwTarget::name)
	    .def_readonly("dim", &GwTarget::dim)
	    .def_property_readonly("labels", &basis_labels)
	    .def("validate",
	         [](GwTarget const &t) { return validation_dict(validate_target(t)); })
	    .def("label_to_id", &GwTarget::label_to_id)
	    .def("selection_degree",
	         [](GwTarget const &t, int n, LatticeVector const &beta) {
		         return selection_degree(t, n, beta).str();
	         })
	    .def("diagonal_class", [](GwTarget const &t) {
		    py::list out;
		    for (auto const &[e, f, g] : diagonal_class(t))
			    out.append(py::make_tuple(e, f, g.str()));
		    return out;
	    });

	py::class_<CorrelatorTable>(m, "Table")
	    .def("__len__", &CorrelatorTable::size)
	    .def("entries", &table_entries)
	    .def("value",
	         [](CorrelatorTable const &table, GwTarget const &t,
	            LatticeVector const &beta, std::vector<int> classes) {
		         auto canon = canonicalize(t, beta, std::move(classes));
		         if (canon.forced_zero)
			         return std::string("0");
		         auto red = reduce_full(t, canon.key);
		         Rational v = red.is_value
		                          ? red.value
		                          : red.multiplier *
		                                get_or_fail(table, red.residual);
		         return (canon.sign > 0 ? v : -v).str();
	         },
	         py::arg("target"), py::arg("beta"), py::arg("classes"))
	    .def("to_csv", &CorrelatorTable::to_csv)
	    .def("to_json", &CorrelatorTable::to_json)
	    .def("save", &CorrelatorTable::save, py::arg("path"),
	         py::arg("format") = "csv")
	    .def_static("load", &CorrelatorTable::load)
	    .def("explain",
	         [](CorrelatorTable const &table, GwTarget const &t,
	            LatticeVector const &beta, std::vector<int> const &classes) {
		         return explain(t, table, beta, classes);
	         });

	py::class_<Potential>(m, "Potential")
	    .def_property_readonly("max_c1",
	                           [](Potential const &p) { return p.max_c1; })
	    .def_property_readonly("max_n",
	                           [](Potential const &p) { return p.max_n; })
	    .def("terms",
	         [](Potential const &p) {
		         py::list out;
		         for (auto const &[mono, c] : p.series.terms())
		         {
			         py::dict row;
			         row["t_exponents"] = mono.t;
			         row["beta"] = mono.beta;
			         row["coefficient"] = c.str();
			         out.append(std::move(row));
		         }
		         return out;
	         })
	    .def("to_json", &potential_to_json)
	    .def("wdvv_ok",
	         [](Potential const &p) { return !wdvv_check(p).has_value(); })
	    .def("associative",
	         [](Potential const &p) { return associativity_check(p).ok; })
	    .def("homogeneous", [](Potential const &p) {
		    return !homogeneity_violation(p).has_value();
	    });

	m.def("load_target", &load_target, py::arg("path"));
	m.def("parse_target", &parse_target, py::arg("json_text"));
	m.def(
	    "reconstruct",
	    [](GwTarget const &t, int64_t max_c1, int max_n, int jobs) {
		    return reconstruct_all(t, {max_c1, max_n, jobs});
	    },
	    py::arg("target"), py::arg("max_c1"), py::arg("max_n"),
	    py::arg("jobs") = 1);
	m.def(
	    "potential",
	    [](GwTarget const &t, CorrelatorTable const &table, int64_t max_c1,
	       int max_n) { return build_potential(t, table, max_c1, max_n); },
	    py::arg("target"), py::arg("table"), py::arg("max_c1"),
	    py::arg("max_n"));
	m.def(
	    "qmul",
	    [](GwTarget const &t, Potential const &p,
	       std::vector<std::string> const &symbols) {
		    QuantumElement acc = basis_element(p, t.label_to_id(symbols.at(0)));
		    for (size_t i = 1; i < symbols.size(); ++i)
			    acc = quantum_mul(p, acc,
			                      basis_element(p, t.label_to_id(symbols[i])));
		    acc = evaluate_t(acc,
		                     std::vector<Rational>(t.class_count(), Rational(0)));
		    return acc.str(t);
	    },
	    py::arg("target"), py::arg("potential"), py::arg("symbols"),
	    "small quantum product of basis symbols at t = 0");

	py::register_exception<MissingSeeds>(m, "MissingSeedsError");
	py::register_exception<UnknownCorrelator>(m, "UnknownCorrelatorError");
}
