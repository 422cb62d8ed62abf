#include "canonkit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

namespace {

ConstraintClass parse_class(const std::string& s) {
    for (auto c : {ConstraintClass::first, ConstraintClass::second, ConstraintClass::unresolved})
        if (s == class_name(c)) return c;
    throw InputError("unknown constraint class '" + s + "'");
}

const Json& member(const Json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw InputError(std::string(what) + ": missing key '" + key + "'");
    return j.at(key);
}

int as_int(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw InputError(std::string(what) + ": expected an integer");
    return j.get<int>();
}

double as_double(const Json& j, const char* what) {
    if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite number");
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << (v == 0.0 ? 0.0 : v);
    return os.str();
}

}  // namespace

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

Matrix json_matrix(const Json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array of rows");
    const Index r = static_cast<Index>(j.size());
    if (r == 0) return Matrix(0, 0);
    if (!j[0].is_array()) throw InputError(std::string(what) + ": expected an array of rows");
    const Index c = static_cast<Index>(j[0].size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        const Json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != c)
            throw InputError(std::string(what) + ": ragged rows");
        for (Index k = 0; k < c; ++k) m(i, k) = as_double(row[static_cast<size_t>(k)], what);
    }
    return m;
}

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector json_vector(const Json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
    Vector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = as_double(j[static_cast<size_t>(i)], what);
    return v;
}

MoveFile parse_move_json(const Json& j) {
    MoveFile f;
    if (!j.is_object()) throw InputError("move file: top level must be an object");
    int q = as_int(member(j, "Q", "move file"), "Q");
    if (q <= 0) throw InputError("move file: Q must be positive");
    f.seq.Q = q;
    f.seq.hbar = j.contains("hbar") ? as_double(j.at("hbar"), "hbar") : 1.0;
    if (!(f.seq.hbar > 0)) throw InputError("move file: hbar must be positive");
    const Json& moves = member(j, "moves", "move file");
    if (!moves.is_array() || moves.empty()) throw InputError("move file: 'moves' must be a non-empty array");
    for (const auto& mj : moves) {
        QuadraticMove m;
        int n = as_int(member(mj, "n", "move"), "n");
        m.step_from = n - 1;
        m.step_to = n;
        m.a = json_matrix(member(mj, "a", "move"), "a");
        m.b = json_matrix(member(mj, "b", "move"), "b");
        m.c = json_matrix(member(mj, "c", "move"), "c");
        for (const Matrix* x : {&m.a, &m.b, &m.c})
            if (x->rows() != q || x->cols() != q) throw InputError("move file: matrices must be Q x Q");
        f.seq.moves.push_back(std::move(m));
    }
    for (size_t i = 1; i < f.seq.moves.size(); ++i)
        if (f.seq.moves[i].step_from != f.seq.moves[i - 1].step_to)
            throw InputError("move file: moves must be consecutive and ordered");
    if (j.contains("bases")) f.bases = parse_basis_json(j);
    for (const auto& [step, t] : f.bases)
        if (t.rows() != q || t.cols() != q) throw InputError("move file: basis must be Q x Q");
    auto problems = validate(f.seq);
    if (!problems.empty()) throw InputError("move file: " + problems.front());
    return f;
}

Json move_file_json(const MoveFile& f) {
    Json j;
    j["Q"] = f.seq.Q;
    j["hbar"] = f.seq.hbar;
    Json moves = Json::array();
    for (const auto& m : f.seq.moves)
        moves.push_back({{"n", m.step_to}, {"a", matrix_json(m.a)}, {"b", matrix_json(m.b)}, {"c", matrix_json(m.c)}});
    j["moves"] = moves;
    if (!f.bases.empty()) {
        Json bs = Json::array();
        for (const auto& [step, t] : f.bases) bs.push_back({{"step", step}, {"T", matrix_json(t)}});
        j["bases"] = bs;
    }
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

MoveFile read_move_file(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::parse_error& e) {
        throw InputError("'" + path + "': " + e.what());
    }
    return parse_move_json(j);
}

std::map<int, Matrix> parse_basis_json(const Json& j) {
    std::map<int, Matrix> out;
    const Json& bs = member(j, "bases", "basis file");
    if (!bs.is_array()) throw InputError("basis file: 'bases' must be an array");
    for (const auto& b : bs) {
        int step = as_int(member(b, "step", "basis"), "step");
        Matrix t = json_matrix(member(b, "T", "basis"), "T");
        if (t.rows() != t.cols()) throw InputError("basis file: T must be square");
        out[step] = t;
    }
    return out;
}

CanonicalData parse_canonical_json(const Json& j) {
    CanonicalData d;
    d.step = as_int(member(j, "step", "canonical data"), "step");
    d.x = json_vector(member(j, "x", "canonical data"), "x");
    d.p = json_vector(member(j, "p", "canonical data"), "p");
    std::string side = j.contains("side") ? j.at("side").get<std::string>() : "pre";
    if (side == "pre") d.side = MomentumSide::pre;
    else if (side == "post") d.side = MomentumSide::post;
    else throw InputError("canonical data: side must be 'pre' or 'post'");
    if (d.x.size() != d.p.size()) throw InputError("canonical data: x and p sizes differ");
    return d;
}

Json canonical_json(const CanonicalData& d) {
    return {{"step", d.step},
            {"x", vector_json(d.x)},
            {"p", vector_json(d.p)},
            {"side", d.side == MomentumSide::pre ? "pre" : "post"}};
}

Json counts_json(const TypeCounts& c) {
    Json j = Json::object();
    for (auto t : kAllTypes) j[type_name(t)] = c[t];
    return j;
}

Json basis_json(const ClassifiedBasis& b) {
    Json labels = Json::array();
    for (auto t : b.labels) labels.push_back(type_name(t));
    return {{"step", b.step}, {"counts", counts_json(b.counts)}, {"labels", labels}, {"T", matrix_json(b.T)}};
}

Json constraint_json(const LinearConstraint& c) {
    Json j = {{"label", c.label()},
              {"step", c.step},
              {"kind", kind_name(c.kind)},
              {"class", class_name(c.cls)},
              {"source_type", type_name(c.source_type)},
              {"source_row", c.source_row},
              {"trivial", c.trivial},
              {"p", vector_json(c.p_coeffs)},
              {"x", vector_json(c.x_coeffs)}};
    if (c.kind == ConstraintKind::boundary_data || c.x_coeffs_other.size()) {
        j["step_other"] = c.step_other;
        j["x_other"] = vector_json(c.x_coeffs_other);
    }
    if (c.multiplier_coeffs.size()) j["multipliers"] = vector_json(c.multiplier_coeffs);
    if (!c.provenance.empty()) j["provenance"] = c.provenance;
    return j;
}

LinearConstraint json_constraint(const Json& j) {
    LinearConstraint c;
    c.step = as_int(member(j, "step", "constraint"), "step");
    c.kind = parse_kind(member(j, "kind", "constraint").get<std::string>());
    c.cls = parse_class(member(j, "class", "constraint").get<std::string>());
    c.source_type = parse_type(member(j, "source_type", "constraint").get<std::string>());
    c.source_row = member(j, "source_row", "constraint").get<Index>();
    c.trivial = member(j, "trivial", "constraint").get<bool>();
    c.p_coeffs = json_vector(member(j, "p", "constraint"), "p");
    c.x_coeffs = json_vector(member(j, "x", "constraint"), "x");
    if (j.contains("step_other")) c.step_other = as_int(j.at("step_other"), "step_other");
    if (j.contains("x_other")) c.x_coeffs_other = json_vector(j.at("x_other"), "x_other");
    if (j.contains("multipliers")) c.multiplier_coeffs = json_vector(j.at("multipliers"), "multipliers");
    if (j.contains("provenance")) c.provenance = j.at("provenance").get<std::string>();
    return c;
}

Json bracket_json(const BracketTable& t) {
    Json labels = Json::array(), classes = Json::array();
    for (const auto& c : t.constraints) labels.push_back(c.label());
    for (auto c : t.class_split) classes.push_back(class_name(c));
    return {{"labels", labels},
            {"brackets", matrix_json(t.brackets)},
            {"classes", classes},
            {"independent", t.independent},
            {"first_class", t.n_first},
            {"second_class", t.n_second},
            {"m_lambda_rho", t.m_lambda_rho}};
}

Json dof_json(const DofReport& r) {
    Json counts = Json::array();
    for (const auto& [step, c] : r.counts) counts.push_back({{"step", step}, {"counts", counts_json(c)}});
    Json pairs = Json::object();
    for (const auto& [name, n] : r.move_pairs) pairs[name] = n;
    return {{"counts", counts},
            {"move_pairs", pairs},
            {"through", r.through},
            {"through_from_constraints", r.through_from_constraints},
            {"m_lambda_rho", r.m_lambda_rho}};
}

Json effective_json(const EffectiveMove& e) {
    Json mult = Json::array();
    for (const auto& m : e.multipliers)
        mult.push_back({{"type", type_name(m.type)}, {"step", m.step}, {"provenance", m.provenance},
                        {"constraint", constraint_json(m.induced)}});
    return {{"from", e.base.step_from},
            {"to", e.base.step_to},
            {"provenance", e.provenance},
            {"a", matrix_json(e.base.a)},
            {"b", matrix_json(e.base.b)},
            {"c", matrix_json(e.base.c)},
            {"max_abs_a", max_abs(e.base.a)},
            {"max_abs_c", max_abs(e.base.c)},
            {"multipliers", mult}};
}

Json amplitude_json(const Amplitude& a) {
    return {{"log_modulus", a.log_modulus},
            {"modulus", a.modulus()},
            {"i_exponent", a.i_exponent},
            {"continuous_phase", a.continuous_phase}};
}

Json kernel_json(const GaussianDeltaKernel& k) {
    Json j = {{"in_step", k.in_step},
              {"out_step", k.out_step},
              {"hbar", k.hbar},
              {"amplitude", amplitude_json(k.amplitude)},
              {"A", matrix_json(k.A)},
              {"B", matrix_json(k.B)},
              {"C", matrix_json(k.C)},
              {"deltas", matrix_json(k.deltas)},
              {"delta_labels", k.delta_labels},
              {"delta_count", k.deltas.rows()}};
    if (k.has_normalized) j["normalized"] = amplitude_json(k.normalized);
    return j;
}

std::string counts_text(int step, const TypeCounts& c) {
    std::ostringstream os;
    os << "step " << step << ":";
    for (auto t : kAllTypes) os << "  N_" << type_name(t) << "=" << c[t];
    os << "\n";
    return os.str();
}

std::string constraints_text(const std::vector<LinearConstraint>& cs) {
    std::ostringstream os;
    for (const auto& c : cs) {
        os << std::left << std::setw(18) << c.label() << std::setw(16) << kind_name(c.kind) << std::setw(11)
           << class_name(c.cls) << (c.trivial ? "trivial " : "") << "p=[";
        for (Index i = 0; i < c.p_coeffs.size(); ++i) os << (i ? " " : "") << fmt(c.p_coeffs(i));
        os << "] x=[";
        for (Index i = 0; i < c.x_coeffs.size(); ++i) os << (i ? " " : "") << fmt(c.x_coeffs(i));
        os << "]";
        if (c.x_coeffs_other.size()) {
            os << " x_" << c.step_other << "=[";
            for (Index i = 0; i < c.x_coeffs_other.size(); ++i) os << (i ? " " : "") << fmt(c.x_coeffs_other(i));
            os << "]";
        }
        os << "\n";
    }
    return os.str();
}

std::string bracket_text(const BracketTable& t) {
    std::ostringstream os;
    os << "brackets (" << t.constraints.size() << " constraints, " << t.independent << " independent): first="
       << t.n_first << " second=" << t.n_second << " m_lambda_rho=" << t.m_lambda_rho << "\n";
    os << "max |bracket| = " << fmt(max_abs(t.brackets)) << "\n";
    return os.str();
}

std::string dof_text(const DofReport& r) {
    std::ostringstream os;
    for (const auto& [step, c] : r.counts) os << counts_text(step, c);
    for (const auto& [name, n] : r.move_pairs) os << "N_{" << name << "} = " << n << "\n";
    os << "through: 2N_gamma + 2N_z + 2m = " << r.through << ", 2Q - 2#first - #second = "
       << r.through_from_constraints << "\n";
    return os.str();
}

std::string effective_text(const EffectiveMove& e) {
    std::ostringstream os;
    os << "effective move " << e.provenance << "\n";
    os << "  max|a~| = " << fmt(max_abs(e.base.a)) << "  max|b~| = " << fmt(max_abs(e.base.b))
       << "  max|c~| = " << fmt(max_abs(e.base.c)) << "\n";
    os << "  multipliers: " << e.multipliers.size() << "\n";
    for (const auto& m : e.multipliers) os << "    " << m.induced.label() << " from " << m.provenance << "\n";
    return os.str();
}

std::string kernel_text(const GaussianDeltaKernel& k) {
    std::ostringstream os;
    os << "kernel " << k.in_step << " -> " << k.out_step << " (hbar = " << k.hbar << ")\n";
    os << "  modulus = " << std::setprecision(12) << k.amplitude.modulus() << "  i_exponent = " << k.amplitude.i_exponent
       << " (units of pi/4)  phase = " << k.amplitude.continuous_phase << "\n";
    if (k.has_normalized)
        os << "  normalized modulus = " << k.normalized.modulus() << "  i_exponent = " << k.normalized.i_exponent << "\n";
    os << std::setprecision(6) << "  max|A| = " << fmt(max_abs(k.A)) << "  max|B| = " << fmt(max_abs(k.B))
       << "  max|C| = " << fmt(max_abs(k.C)) << "  deltas = " << k.deltas.rows() << "\n";
    for (const auto& l : k.delta_labels) os << "    delta " << l << "\n";
    return os.str();
}

}  // namespace canonkit
