#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "canonkit/errors.hpp"
#include "canonkit/io.hpp"
#include "canonkit/lattice.hpp"

namespace py = pybind11;
using namespace canonkit;

namespace {

py::dict counts_dict(const TypeCounts& c) {
    py::dict d;
    for (auto t : kAllTypes) d[type_name(t)] = c[t];
    return d;
}

MoveSequence sequence_from_json(const std::string& text) {
    try {
        return parse_move_json(Json::parse(text)).seq;
    } catch (const Json::exception& e) {
        throw InputError(e.what());
    }
}

}  // namespace

PYBIND11_MODULE(_canonkit, m) {
    m.doc() = "canonical analysis of quadratic discrete actions";

    auto base = py::register_exception<Error>(m, "CanonkitError");
    py::register_exception<InputError>(m, "InputError", base.ptr());
    auto degenerate = py::register_exception<DegeneracyError>(m, "DegeneracyError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", degenerate.ptr());
    auto constraint = py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
    py::register_exception<InconsistentBoundaryError>(m, "InconsistentBoundaryError", constraint.ptr());

    py::class_<QuadraticMove>(m, "Move")
        .def(py::init([](int step_from, const Matrix& a, const Matrix& b, const Matrix& c) {
                 return QuadraticMove{step_from, step_from + 1, a, b, c};
             }),
             py::arg("step_from"), py::arg("a"), py::arg("b"), py::arg("c"))
        .def_readonly("step_from", &QuadraticMove::step_from)
        .def_readonly("step_to", &QuadraticMove::step_to)
        .def_readonly("a", &QuadraticMove::a)
        .def_readonly("b", &QuadraticMove::b)
        .def_readonly("c", &QuadraticMove::c)
        .def("action", &QuadraticMove::action, py::arg("x_from"), py::arg("x_to"));

    py::class_<MoveSequence>(m, "Sequence")
        .def(py::init([](std::vector<QuadraticMove> moves, double hbar) {
                 if (moves.empty()) throw InputError("a sequence needs at least one move");
                 MoveSequence s;
                 s.Q = moves.front().dim();
                 s.hbar = hbar;
                 s.moves = std::move(moves);
                 auto problems = validate(s);
                 if (!problems.empty()) throw InputError(problems.front());
                 return s;
             }),
             py::arg("moves"), py::arg("hbar") = 1.0)
        .def_readonly("Q", &MoveSequence::Q)
        .def_readonly("hbar", &MoveSequence::hbar)
        .def_readonly("moves", &MoveSequence::moves)
        .def("hessian", &MoveSequence::hessian, py::arg("step"))
        .def("to_json", [](const MoveSequence& s) { return move_file_json({s, {}}).dump(); });

    m.def("sequence_from_json", &sequence_from_json, py::arg("text"));
    m.def(
        "expanding_square", [](int n_steps, double mass) { return expanding_square_sequence(n_steps, mass).seq; },
        py::arg("n_steps") = 2, py::arg("mass") = 0.0);

    py::class_<ClassifiedBasis>(m, "ClassifiedBasis")
        .def_readonly("step", &ClassifiedBasis::step)
        .def_readonly("T", &ClassifiedBasis::T)
        .def_property_readonly("labels",
                               [](const ClassifiedBasis& b) {
                                   std::vector<std::string> out;
                                   for (auto t : b.labels) out.push_back(type_name(t));
                                   return out;
                               })
        .def_property_readonly("counts", [](const ClassifiedBasis& b) { return counts_dict(b.counts); });

    m.def(
        "classify", [](const MoveSequence& s, int step, double tol) { return classify_step(s, step, tol); },
        py::arg("sequence"), py::arg("step"), py::arg("tol") = kDefaultTol);

    m.def(
        "constraints",
        [](const MoveSequence& s, int step, double tol) {
            auto b = classify_step(s, step, tol);
            auto table = bracket_table(primary_constraints(s.move_into(step), s.move_out_of(step), b),
                                       s.hessian(step), b, tol);
            py::list out;
            auto loads = py::module_::import("json").attr("loads");
            for (const auto& c : table.constraints) out.append(loads(constraint_json(c).dump()));
            return py::make_tuple(out, table.brackets);
        },
        py::arg("sequence"), py::arg("step"), py::arg("tol") = kDefaultTol);

    m.def(
        "compose",
        [](const MoveSequence& s, int from, int to, double tol) {
            auto e = chain_compose(s, from, to, tol);
            py::dict d;
            d["a"] = e.base.a;
            d["b"] = e.base.b;
            d["c"] = e.base.c;
            d["multipliers"] = e.multipliers.size();
            d["provenance"] = e.provenance;
            return d;
        },
        py::arg("sequence"), py::arg("from_step"), py::arg("to_step"), py::arg("tol") = kDefaultTol);

    m.def(
        "propagator",
        [](const MoveSequence& s, int from, double tol) {
            const auto* mv = s.move_out_of(from);
            if (!mv) throw InputError("no move starts at this step");
            auto k = propagator_from_move(*mv, classify_step(s, from, tol), classify_step(s, from + 1, tol), s.hbar, tol);
            return py::make_tuple(k.amplitude.modulus(), k.amplitude.i_exponent, k.amplitude.continuous_phase);
        },
        py::arg("sequence"), py::arg("from_step"), py::arg("tol") = kDefaultTol);
}
