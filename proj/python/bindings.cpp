#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "fann/frechet.hpp"
#include "fann/io.hpp"
#include "fann/reduction.hpp"

namespace py = pybind11;
using namespace fann;

namespace {

IndexParams make_params(double eps, double delta, int k, const std::string& variant, const std::string& mode,
                        const std::string& oracle, double budget) {
    IndexParams p;
    p.eps = eps;
    p.delta = delta;
    p.k = k;
    p.variant = parse_variant(variant);
    p.mode = parse_mode(mode);
    p.oracle = parse_oracle(oracle);
    p.budget = budget;
    return p;
}

// Answer as the matching corpus position, or None.
py::object answer(const QueryAnswer& a) {
    if (!a.found) return py::none();
    return py::int_(a.index);
}

} // namespace

PYBIND11_MODULE(_fann, m) {
    m.doc() = "Approximate nearest-neighbour search over polygonal curves under the Frechet distance";

    static py::exception<Error> error(m, "FannError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("frechet_decide", &frechet_decide, py::arg("a"), py::arg("b"), py::arg("eps"));
    m.def("frechet_value", &frechet_value, py::arg("a"), py::arg("b"), py::arg("tol") = 1e-7);
    m.def("discrete_frechet", &discrete_frechet, py::arg("a"), py::arg("b"));

    py::class_<Corpus>(m, "Corpus")
        .def(py::init([](std::vector<std::string> ids, std::vector<Curve> curves) {
                 return make_corpus(std::move(ids), std::move(curves));
             }),
             py::arg("ids"), py::arg("curves"))
        .def_static("load", &load_corpus, py::arg("path"))
        .def_readonly("ids", &Corpus::ids)
        .def_readonly("curves", &Corpus::curves)
        .def_readonly("dim", &Corpus::dim)
        .def("digest", &Corpus::digest)
        .def("__len__", &Corpus::size);

    py::class_<Index>(m, "Index")
        .def_static(
            "build",
            [](const Corpus& c, double eps, double delta, int k, const std::string& variant, const std::string& mode,
               const std::string& oracle, double budget) {
                return Index::build(c, make_params(eps, delta, k, variant, mode, oracle, budget));
            },
            py::arg("corpus"), py::arg("eps") = 0.4, py::arg("delta") = 1.0, py::arg("k") = 3,
            py::arg("variant") = "one-eps", py::arg("mode") = "lazy", py::arg("oracle") = "brute",
            py::arg("budget") = 1e8)
        .def_static("load", &load_index, py::arg("path"))
        .def_static("from_string", &index_from_string, py::arg("text"))
        .def("save", [](const Index& i, const std::string& path) { save_index(i, path); }, py::arg("path"))
        .def("to_string", [](const Index& i) { return index_to_string(i); })
        .def("query", [](const Index& i, const Curve& s) { return answer(i.query(s)); }, py::arg("sigma"))
        .def_property_readonly("corpus", &Index::corpus)
        .def_property_readonly("g1_size", [](const Index& i) { return i.grids().g1.cells().size(); });

    py::class_<Ladder>(m, "Ladder")
        .def_static(
            "build",
            [](const Corpus& c, double eps, int k, const std::string& variant) {
                return std::make_unique<Ladder>(Ladder::build(c, make_params(eps, 1.0, k, variant, "lazy", "brute", 1e8)));
            },
            py::arg("corpus"), py::arg("eps") = 0.4, py::arg("k") = 3, py::arg("variant") = "three-eps")
        .def_property_readonly("scales", &Ladder::scales)
        .def("query", &Ladder::ann_query, py::arg("sigma"));

    m.def("brute_force_nn", &brute_force_nn, py::arg("corpus"), py::arg("sigma"), py::arg("tol") = 1e-7);
}
