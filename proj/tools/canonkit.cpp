#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "canonkit/errors.hpp"
#include "canonkit/io.hpp"
#include "canonkit/lattice.hpp"

using namespace canonkit;

namespace {

struct Options {
    std::string input;
    std::optional<int> step, from, to;
    double tol = kDefaultTol;
    double hbar = 1.0;
    bool hbar_set = false;
    std::string format = "text";
    std::string basis_file;
    std::string out;
    std::string data_file;
    std::string free_file;
    std::string example_name;
    std::string quantum_action = "compose";
    double mass = 0.0;
    int steps = 2;
};

struct Context {
    MoveFile file;
    double tol;
    const QuadraticMove* into(int s) const { return file.seq.move_into(s); }
    const QuadraticMove* out_of(int s) const { return file.seq.move_out_of(s); }
};

Context load(const Options& o) {
    if (o.input.empty()) throw InputError("--input is required");
    Context c{read_move_file(o.input), o.tol};
    if (!o.basis_file.empty()) {
        Json j;
        try {
            j = Json::parse(read_text_file(o.basis_file));
        } catch (const Json::parse_error& e) {
            throw InputError(std::string("basis file: ") + e.what());
        }
        for (auto& [s, t] : parse_basis_json(j)) c.file.bases[s] = t;
    }
    if (o.hbar_set) c.file.seq.hbar = o.hbar;
    return c;
}

ClassifiedBasis basis_at(const Context& c, int step) {
    StepMatrices m = step_matrices(c.file.seq, step);
    auto it = c.file.bases.find(step);
    if (it != c.file.bases.end()) return basis_from_rows(step, it->second, m.c_prev, m.c_next, m.h, c.tol);
    return classify_step(step, m.c_prev, m.c_next, m.h, c.tol);
}

int require(const std::optional<int>& v, const char* flag) {
    if (!v) throw InputError(std::string(flag) + " is required");
    return *v;
}

std::vector<int> steps_of(const Context& c, const Options& o) {
    if (o.step) return {*o.step};
    std::vector<int> s;
    for (int n = c.file.seq.first_step(); n <= c.file.seq.last_step(); ++n) s.push_back(n);
    return s;
}

struct Output {
    Json json = Json::object();
    std::ostringstream text;
};

std::vector<LinearConstraint> step_constraints(const Context& c, int step, const ClassifiedBasis& b) {
    auto cs = primary_constraints(c.into(step), c.out_of(step), b);
    auto sec = secondary_constraints(c.into(step), c.out_of(step), b, c.tol);
    cs.insert(cs.end(), sec.begin(), sec.end());
    return cs;
}

void cmd_classify(const Options& o, Output& out) {
    Context c = load(o);
    Json steps = Json::array();
    for (int s : steps_of(c, o)) {
        auto b = basis_at(c, s);
        steps.push_back(basis_json(b));
        out.text << counts_text(s, b.counts);
    }
    out.json["classification"] = steps;
}

void cmd_constraints(const Options& o, Output& out) {
    Context c = load(o);
    Json steps = Json::array();
    for (int s : steps_of(c, o)) {
        auto b = basis_at(c, s);
        auto prim = primary_constraints(c.into(s), c.out_of(s), b);
        auto table = bracket_table(prim, c.file.seq.hessian(s), b, c.tol);
        auto sec = secondary_constraints(c.into(s), c.out_of(s), b, c.tol);
        Json cj = Json::array();
        for (const auto& x : table.constraints) cj.push_back(constraint_json(x));
        Json sj = Json::array();
        for (const auto& x : sec) sj.push_back(constraint_json(x));
        steps.push_back({{"step", s}, {"counts", counts_json(b.counts)}, {"primary", cj},
                         {"brackets", bracket_json(table)}, {"secondary", sj}});
        out.text << counts_text(s, b.counts) << constraints_text(table.constraints) << bracket_text(table);
        if (!sec.empty()) out.text << "induced constraints:\n" << constraints_text(sec);
    }
    out.json["constraints"] = steps;
}

void cmd_evolve(const Options& o, Output& out) {
    Context c = load(o);
    int from = require(o.from, "--from"), to = require(o.to, "--to");
    if (o.data_file.empty()) throw InputError("--data is required");
    CanonicalData d = parse_canonical_json(Json::parse(read_text_file(o.data_file)));
    Vector free;
    if (!o.free_file.empty()) {
        Json fj = Json::parse(read_text_file(o.free_file));
        free = json_vector(fj.is_object() ? fj.at("free") : fj, "free values");
    }
    SolveOptions opt{c.tol, true};
    SolveResult r;
    if (to == from + 1) {
        const auto* m = c.out_of(from);
        if (!m) throw InputError("no move starts at --from");
        r = forward_solve(*m, basis_at(c, from), basis_at(c, to), d, free, opt);
    } else if (to == from - 1) {
        const auto* m = c.into(from);
        if (!m) throw InputError("no move ends at --from");
        r = backward_solve(*m, basis_at(c, to), basis_at(c, from), d, free, opt);
    } else {
        throw InputError("evolve: --to must be adjacent to --from");
    }
    out.json["result"] = canonical_json(r.data);
    out.json["free_rows"] = r.free_rows;
    out.text << "step " << r.data.step << " (" << (r.data.side == MomentumSide::pre ? "pre" : "post") << ")\n"
             << "x = " << r.data.x.transpose() << "\np = " << r.data.p.transpose() << "\n"
             << "free rows: " << r.free_rows.size() << "\n";
}

void cmd_compose(const Options& o, Output& out) {
    Context c = load(o);
    int from = require(o.from, "--from"), to = require(o.to, "--to");
    EffectiveMove eff = chain_compose(c.file.seq, from, to, c.tol);
    out.json["effective"] = effective_json(eff);
    out.text << effective_text(eff);
    // constraints of the effective move at its end steps
    const auto* before = c.into(from);
    const auto* after = c.out_of(to);
    Matrix h_from = eff.base.a + (before ? before->b : Matrix::Zero(eff.base.a.rows(), eff.base.a.cols()));
    Matrix h_to = eff.base.b + (after ? after->a : Matrix::Zero(eff.base.b.rows(), eff.base.b.cols()));
    auto bf = classify_step(from, before ? before->c : Matrix(), eff.base.c, h_from, c.tol);
    auto bt = classify_step(to, eff.base.c, after ? after->c : Matrix(), h_to, c.tol);
    auto cons = effective_constraints(eff, bf, bt, c.tol);
    int npre = 0, npost = 0;
    for (const auto& x : cons) {
        if (x.kind == ConstraintKind::pre) ++npre;
        if (x.kind == ConstraintKind::post) ++npost;
    }
    out.json["effective_constraints"] = {{"pre", npre}, {"post", npost}, {"total", cons.size()}};
    out.text << "  effective constraints: " << npre << " pre at " << from << ", " << npost << " post at " << to
             << ", " << cons.size() - npre - npost << " induced\n";
    if (to == from + 2) {
        auto mono = count_monotonicity(*c.out_of(from), *c.into(to), eff, c.tol);
        out.json["monotonicity"] = {{"d_first", mono.d_first}, {"d_second", mono.d_second},
                                    {"d_hessian", mono.d_hessian}, {"d_effective", mono.d_effective},
                                    {"holds", mono.holds}};
        out.text << "  count monotonicity: D_eff = " << mono.d_effective << " >= max(" << mono.d_first << ", "
                 << mono.d_second << ", " << mono.d_hessian << "): " << (mono.holds ? "yes" : "no") << "\n";
        if (!mono.holds) throw InternalError("count monotonicity violated");
    }
}

int kernel_dim(const GaussianDeltaKernel& k, bool in_side, double tol) {
    QuadraticMove m{k.in_step, k.out_step, k.A, k.B, k.C};
    const Index q = k.dim();
    if (in_side) {
        auto b = classify_step(k.in_step, Matrix(), k.C, Matrix::Zero(q, q) + k.A, tol);
        return hilbert_dims(primary_constraints(nullptr, &m, b), q, MomentumSide::pre, tol);
    }
    auto b = classify_step(k.out_step, k.C, Matrix(), k.B, tol);
    return hilbert_dims(primary_constraints(&m, nullptr, b), q, MomentumSide::post, tol);
}

void cmd_quantum(const Options& o, Output& out) {
    Context c = load(o);
    if (o.quantum_action != "compose" && o.quantum_action != "propagator")
        throw InputError("quantum: action must be 'compose' or 'propagator'");
    int from = require(o.from, "--from"), to = require(o.to, "--to");
    if (to <= from) throw InputError("quantum: need --from < --to");
    if (o.quantum_action == "propagator" && to != from + 1) throw InputError("propagator: need --to = --from + 1");
    const double hbar = c.file.seq.hbar;
    std::vector<GaussianDeltaKernel> props;
    Json moves = Json::array();
    for (int s = from; s < to; ++s) {
        const auto* m = c.out_of(s);
        if (!m) throw InputError("quantum: sequence does not cover the requested range");
        auto k = propagator_from_move(*m, basis_at(c, s), basis_at(c, s + 1), hbar, c.tol);
        int din = kernel_dim(k, true, c.tol), dout = kernel_dim(k, false, c.tol);
        moves.push_back({{"kernel", kernel_json(k)}, {"hilbert_in", din}, {"hilbert_out", dout}});
        out.text << kernel_text(k) << "  hilbert dims: " << din << " -> " << dout << "\n";
        props.push_back(std::move(k));
    }
    out.json["propagators"] = moves;
    if (props.size() > 1) {
        GaussianDeltaKernel k = props[0];
        for (size_t i = 1; i < props.size(); ++i) {
            int s = props[i].in_step;
            ClassifiedBasis mid;
            if (i == 1) mid = basis_at(c, s);
            else mid = classify_step(s, k.C, props[i].C, k.B + props[i].A, c.tol);
            k = compose_kernels(k, props[i], mid, c.tol);
        }
        int din = kernel_dim(k, true, c.tol), dout = kernel_dim(k, false, c.tol);
        out.json["composed"] = {{"kernel", kernel_json(k)}, {"hilbert_in", din}, {"hilbert_out", dout}};
        out.text << "composed " << kernel_text(k) << "  hilbert dims: " << din << " -> " << dout << "\n";
    }
}

void cmd_example(const Options& o, Output& out) {
    if (o.example_name != "square-lattice") throw InputError("unknown example '" + o.example_name + "'");
    if (o.steps < 1) throw InputError("--steps must be at least 1");
    if (!(o.mass >= 0)) throw InputError("--mass must be non-negative");
    auto ex = expanding_square_sequence(o.steps, o.mass);
    MoveFile f;
    f.seq = ex.seq;
    if (o.hbar_set) f.seq.hbar = o.hbar;
    if (o.steps >= 2) f.bases[2] = example_basis_step2(f.seq.Q);
    out.json = move_file_json(f);
    out.text << out.json.dump() << "\n";
}

void cmd_report(const Options& o, Output& out) {
    Context c = load(o);
    const auto& seq = c.file.seq;
    Json steps = Json::array();
    std::map<int, ClassifiedBasis> bases;
    for (int s = seq.first_step(); s <= seq.last_step(); ++s) {
        bases[s] = basis_at(c, s);
        auto cons = step_constraints(c, s, bases[s]);
        auto prim = primary_constraints(c.into(s), c.out_of(s), bases[s]);
        auto table = bracket_table(prim, seq.hessian(s), bases[s], c.tol);
        Json cj = Json::array();
        for (const auto& x : cons) cj.push_back(constraint_json(x));
        steps.push_back({{"step", s}, {"counts", counts_json(bases[s].counts)}, {"constraints", cj},
                         {"brackets", bracket_json(table)}});
        out.text << counts_text(s, bases[s].counts) << bracket_text(table);
    }
    out.json["steps"] = steps;
    Json dofs = Json::array();
    for (int s = seq.first_step() + 1; s < seq.last_step(); ++s) {
        auto prim = primary_constraints(c.into(s), c.out_of(s), bases[s]);
        auto table = bracket_table(prim, seq.hessian(s), bases[s], c.tol);
        auto d = dof_report(*c.into(s), *c.out_of(s), bases[s - 1], bases[s], bases[s + 1], table);
        dofs.push_back(dof_json(d));
        out.text << dof_text(d);
    }
    out.json["dof"] = dofs;
    Json kernels = Json::array();
    for (const auto& m : seq.moves) {
        auto k = propagator_from_move(m, bases[m.step_from], bases[m.step_to], seq.hbar, c.tol);
        kernels.push_back({{"in_step", k.in_step}, {"out_step", k.out_step},
                           {"amplitude", amplitude_json(k.amplitude)}, {"delta_count", 0}});
        out.text << kernel_text(k);
    }
    out.json["kernels"] = kernels;
    if (seq.moves.size() > 1) {
        try {
            auto eff = chain_compose(seq, seq.first_step(), seq.last_step(), c.tol);
            out.json["effective"] = effective_json(eff);
            out.text << effective_text(eff);
        } catch (const DegeneracyError& e) {
            out.json["effective"] = {{"error", e.what()}};
            out.text << "effective move: " << e.what() << "\n";
        }
    }
}

void add_common(CLI::App* app, Options& o) {
    app->add_option("--input", o.input, "move file (JSON)");
    app->add_option("--tol", o.tol, "relative tolerance");
    app->add_option("--hbar", o.hbar, "Planck constant")->each([&o](const std::string&) { o.hbar_set = true; });
    app->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    app->add_option("--basis", o.basis_file, "basis override file");
    app->add_option("--out", o.out, "write the report to this file");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    if (const char* env = std::getenv("CANONKIT_TOL")) {
        try {
            o.tol = std::stod(env);
        } catch (...) {
            std::cerr << "error: CANONKIT_TOL is not a number\n";
            return 2;
        }
    }
    CLI::App app{"canonical analysis of quadratic discrete actions"};
    app.require_subcommand(1);
    std::map<std::string, void (*)(const Options&, Output&)> handlers = {
        {"classify", cmd_classify}, {"constraints", cmd_constraints}, {"evolve", cmd_evolve},
        {"compose", cmd_compose},   {"quantum", cmd_quantum},         {"example", cmd_example},
        {"report", cmd_report}};
    std::map<std::string, CLI::App*> subs;
    subs["classify"] = app.add_subcommand("classify", "classify the null vectors at a step");
    subs["constraints"] = app.add_subcommand("constraints", "constraints and bracket tables");
    subs["evolve"] = app.add_subcommand("evolve", "evolve canonical data across one move");
    subs["compose"] = app.add_subcommand("compose", "effective move of a chain");
    subs["quantum"] = app.add_subcommand("quantum", "propagators and their composition");
    subs["example"] = app.add_subcommand("example", "write an example move file");
    subs["report"] = app.add_subcommand("report", "full analysis of a move file");
    for (auto& [name, sub] : subs) add_common(sub, o);
    for (auto* s : {subs["classify"], subs["constraints"]}) s->add_option("--step", o.step, "step");
    for (auto* s : {subs["evolve"], subs["compose"], subs["quantum"]}) {
        s->add_option("--from", o.from, "first step");
        s->add_option("--to", o.to, "last step");
    }
    subs["evolve"]->add_option("--data", o.data_file, "canonical data file");
    subs["evolve"]->add_option("--free", o.free_file, "free values file");
    subs["quantum"]->add_option("action", o.quantum_action, "compose or propagator");
    subs["example"]->add_option("name", o.example_name, "example name")->required();
    subs["example"]->add_option("--mass", o.mass, "field mass");
    subs["example"]->add_option("--steps", o.steps, "number of moves");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!(o.tol > 0)) {
        std::cerr << "error: tolerance must be positive\n";
        return 2;
    }
    if (!(o.hbar > 0)) {
        std::cerr << "error: hbar must be positive\n";
        return 2;
    }
    try {
        Output out;
        for (auto& [name, sub] : subs)
            if (sub->parsed()) handlers.at(name)(o, out);
        std::string text = o.format == "json" ? out.json.dump(2) + "\n" : out.text.str();
        if (o.out.empty()) std::cout << text;
        else write_text_file(o.out, text);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
