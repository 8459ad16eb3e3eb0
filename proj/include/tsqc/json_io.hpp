#pragma once

// JSON encoding of the double-precision types. The schema is documented in
// docs/schema.md. Complex numbers are [re, im]; matrices are row-major arrays
// of rows. Decoders validate through the ordinary constructors and report
// malformed input as tsqc::InvalidArgument.

#include <string>

#include "json.hpp"
#include "tsqc/abl.hpp"
#include "tsqc/counterfactual.hpp"
#include "tsqc/ensemble.hpp"

namespace tsqc::io {

using json = nlohmann::json;

json encode(const Complex<double>& c);
json encode(const Vector<double>& v);
json encode(const Matrix<double>& m);
json encode(const PureState& s);
json encode(const ProjectiveMeasurement& m);
json encode(const UnitaryOp& u);
json encode(const BipartiteState& s);
json encode(const DensityMatrix& d);
json encode(const Distribution& d);
json encode(const SelectionContext& ctx);
json encode(const Stage& stage);
json encode(const Protocol& p);
json encode(const BipartiteProtocol& p);
json encode(const EnsembleStats& s);
json encode(const ConditionalFrequencies& c);
json encode(const AgreementReport& r);
json encode(const CounterfactualStatement& s);
json encode(const CotenabilityReport& r);
json encode(const Verdict& v);

Complex<double> decode_complex(const json& j);
Vector<double> decode_vector(const json& j);
Matrix<double> decode_matrix(const json& j);
PureState decode_state(const json& j);
ProjectiveMeasurement decode_pvm(const json& j);
UnitaryOp decode_unitary(const json& j);
BipartiteState decode_bipartite(const json& j);
Distribution decode_distribution(const json& j);
SelectionContext decode_context(const json& j);
Protocol decode_protocol(const json& j);
CounterfactualStatement decode_statement(const json& j);

/// Columns: intermediate_outcome,final_outcome,count. A missing intermediate
/// outcome is written as an empty field.
std::string to_csv(const EnsembleStats& s);

/// Reads and parses a JSON file; failures become InvalidArgument.
json read_json_file(const std::string& path);

/// Canonical text form: two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace tsqc::io
