#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "canonkit/classify.hpp"
#include "canonkit/constraints.hpp"
#include "canonkit/effective.hpp"
#include "canonkit/evolution.hpp"
#include "canonkit/quantum.hpp"

namespace canonkit {

using Json = nlohmann::json;

// {"Q": int, "hbar": num, "moves": [{"n": int, "a": [[..]], "b": [[..]], "c": [[..]]}],
//  optional "bases": [{"step": int, "T": [[..]]}]}; move n maps step n-1 to step n.
struct MoveFile {
    MoveSequence seq;
    std::map<int, Matrix> bases;
};

Json matrix_json(const Matrix& m);
Matrix json_matrix(const Json& j, const char* what);
Json vector_json(const Vector& v);
Vector json_vector(const Json& j, const char* what);

MoveFile parse_move_json(const Json& j);
Json move_file_json(const MoveFile& f);
MoveFile read_move_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// {"bases": [{"step": int, "T": [[..]]}]}
std::map<int, Matrix> parse_basis_json(const Json& j);
// {"step": int, "x": [..], "p": [..], "side": "pre"|"post"}
CanonicalData parse_canonical_json(const Json& j);
Json canonical_json(const CanonicalData& d);

// Report pieces with stable keys.
Json counts_json(const TypeCounts& c);
Json basis_json(const ClassifiedBasis& b);
Json constraint_json(const LinearConstraint& c);
LinearConstraint json_constraint(const Json& j);
Json bracket_json(const BracketTable& t);
Json dof_json(const DofReport& r);
Json effective_json(const EffectiveMove& e);
Json amplitude_json(const Amplitude& a);
Json kernel_json(const GaussianDeltaKernel& k);

// Human-readable renderings.
std::string counts_text(int step, const TypeCounts& c);
std::string constraints_text(const std::vector<LinearConstraint>& cs);
std::string bracket_text(const BracketTable& t);
std::string dof_text(const DofReport& r);
std::string effective_text(const EffectiveMove& e);
std::string kernel_text(const GaussianDeltaKernel& k);

}  // namespace canonkit
