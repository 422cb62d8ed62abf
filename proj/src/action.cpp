#include "canonkit/action.hpp"

#include <algorithm>
#include <sstream>

#include "canonkit/errors.hpp"

namespace canonkit {

double QuadraticMove::action(const Vector& x_from, const Vector& x_to) const {
    return 0.5 * x_from.dot(a * x_from) + 0.5 * x_to.dot(b * x_to) + x_from.dot(c * x_to);
}

const QuadraticMove* MoveSequence::move_into(int step) const {
    for (const auto& m : moves)
        if (m.step_to == step) return &m;
    return nullptr;
}

const QuadraticMove* MoveSequence::move_out_of(int step) const {
    for (const auto& m : moves)
        if (m.step_from == step) return &m;
    return nullptr;
}

Matrix MoveSequence::hessian(int step) const {
    Matrix h = Matrix::Zero(Q, Q);
    if (auto* m = move_into(step)) h += m->b;
    if (auto* m = move_out_of(step)) h += m->a;
    return h;
}

namespace {

void check_ragged(const std::vector<RaggedMove>& moves) {
    for (size_t k = 0; k < moves.size(); ++k) {
        const auto& m = moves[k];
        if (m.step_to != m.step_from + 1) throw InputError("move labels must be consecutive steps");
        if (m.a.rows() != m.a.cols() || m.b.rows() != m.b.cols())
            throw InputError("a and b must be square");
        if (m.c.rows() != m.a.rows() || m.c.cols() != m.b.rows())
            throw InputError("c must be dim(from) x dim(to)");
        require_finite(m.a, "a");
        require_finite(m.b, "b");
        require_finite(m.c, "c");
        if (k > 0) {
            const auto& p = moves[k - 1];
            if (p.step_to != m.step_from) throw InputError("moves are not adjacent");
            if (p.b.rows() != m.a.rows()) {
                std::ostringstream os;
                os << "dimension mismatch at step " << m.step_from << ": " << p.b.rows() << " vs "
                   << m.a.rows();
                throw InputError(os.str());
            }
        }
    }
}

Matrix pad(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols, Index q) {
    Matrix out = Matrix::Zero(q, q);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) out(rows[i], cols[j]) = m(i, j);
    return out;
}

}  // namespace

MoveSequence extend_to_square(const std::vector<RaggedMove>& moves, double hbar) {
    check_ragged(moves);
    Index q = 0;
    std::vector<SlotMap> maps;
    for (size_t k = 0; k < moves.size(); ++k) {
        if (k == 0) {
            SlotMap s{moves[k].step_from, {}};
            for (Index i = 0; i < moves[k].a.rows(); ++i) s.slots.push_back(i);
            maps.push_back(s);
            q = std::max(q, moves[k].a.rows());
        }
        SlotMap s{moves[k].step_to, {}};
        for (Index i = 0; i < moves[k].b.rows(); ++i) s.slots.push_back(i);
        maps.push_back(s);
        q = std::max(q, moves[k].b.rows());
    }
    return extend_to_square(moves, maps, q, hbar);
}

MoveSequence extend_to_square(const std::vector<RaggedMove>& moves, const std::vector<SlotMap>& maps,
                              Index q, double hbar) {
    check_ragged(moves);
    if (hbar <= 0) throw InputError("hbar must be positive");
    auto slots_of = [&](int step, Index n) -> const std::vector<Index>& {
        for (const auto& s : maps) {
            if (s.step != step) continue;
            if (static_cast<Index>(s.slots.size()) != n) throw InputError("slot map size mismatch");
            for (Index v : s.slots)
                if (v < 0 || v >= q) throw InputError("slot outside the padded space");
            return s.slots;
        }
        throw InputError("missing slot map for a step");
    };
    MoveSequence seq;
    seq.Q = q;
    seq.hbar = hbar;
    seq.slot_maps = maps;
    for (const auto& m : moves) {
        const auto& rf = slots_of(m.step_from, m.a.rows());
        const auto& rt = slots_of(m.step_to, m.b.rows());
        seq.moves.push_back({m.step_from, m.step_to, pad(m.a, rf, rf, q), pad(m.b, rt, rt, q),
                             pad(m.c, rf, rt, q)});
    }
    return seq;
}

std::vector<RaggedMove> to_ragged(const MoveSequence& seq) {
    std::vector<RaggedMove> out;
    for (const auto& m : seq.moves) out.push_back({m.step_from, m.step_to, m.a, m.b, m.c});
    return out;
}

Vector LegendreMaps::pre_momentum(const Vector& x_from, const Vector& x_to) const {
    return pre_from * x_from + pre_to * x_to;
}

Vector LegendreMaps::post_momentum(const Vector& x_from, const Vector& x_to) const {
    return post_to * x_to + post_from * x_from;
}

LegendreMaps legendre(const QuadraticMove& move) {
    return {-move.a, -move.c, move.b, move.c.transpose()};
}

std::vector<std::string> validate(const MoveSequence& seq, double tol) {
    std::vector<std::string> out;
    for (size_t k = 0; k < seq.moves.size(); ++k) {
        const auto& m = seq.moves[k];
        std::ostringstream tag;
        tag << "move " << m.step_from << "->" << m.step_to;
        bool dims_ok = true;
        for (const Matrix* x : {&m.a, &m.b, &m.c}) {
            if (x->rows() != seq.Q || x->cols() != seq.Q) dims_ok = false;
            else if (!x->allFinite()) out.push_back(tag.str() + ": non-finite entries");
        }
        if (!dims_ok) {
            out.push_back(tag.str() + ": matrices are not Q x Q");
            continue;
        }
        for (auto [name, x] : {std::pair<const char*, const Matrix*>{"a", &m.a}, {"b", &m.b}}) {
            double asym = max_abs(*x - x->transpose());
            if (asym > tol * std::max(1.0, max_abs(*x))) {
                std::ostringstream os;
                os << tag.str() << ": " << name << " is not symmetric (max asymmetry " << asym << ")";
                out.push_back(os.str());
            }
        }
        if (m.step_to != m.step_from + 1) out.push_back(tag.str() + ": labels are not consecutive");
        if (k > 0 && seq.moves[k - 1].step_to != m.step_from) {
            std::ostringstream os;
            os << "gap between step " << seq.moves[k - 1].step_to << " and step " << m.step_from;
            out.push_back(os.str());
        }
    }
    if (seq.hbar <= 0) out.push_back("hbar is not positive");
    return out;
}

}  // namespace canonkit
