#include "tsqc/json_io.hpp"

#include <fstream>
#include <sstream>

namespace tsqc::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw InvalidArgument(std::string("expected a JSON object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw InvalidArgument(std::string(what) + ": expected a number");
  return j.get<double>();
}

std::vector<std::string> strings(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InvalidArgument(std::string(what) + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void check_dim(const json& j, long actual, const char* what) {
  if (!j.contains("dim")) return;
  const long declared = static_cast<long>(number(j["dim"], what));
  if (declared != actual) throw DimensionMismatch(what, declared, actual);
}

json encode_labels(const std::vector<std::string>& labels) { return json(labels); }

std::optional<UnitaryOp> optional_unitary(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return decode_unitary(j[key]);
}

}  // namespace

json encode(const Complex<double>& c) { return json::array({c.real(), c.imag()}); }

json encode(const Vector<double>& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(encode(v(i)));
  return out;
}

json encode(const Matrix<double>& m) {
  json out = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(encode(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

json encode(const PureState& s) {
  return {{"dim", s.dim()}, {"basis", encode_labels(s.basis_labels())}, {"amplitudes", encode(s.amplitudes())}};
}

json encode(const ProjectiveMeasurement& m) {
  json outcomes = json::array();
  for (const auto& o : m.outcomes()) {
    json entry = {{"label", o.label}, {"projector", encode(o.projector)}};
    if (o.route) entry["route"] = encode(o.route->matrix());
    outcomes.push_back(std::move(entry));
  }
  return {{"dim", m.dim()}, {"outcomes", std::move(outcomes)}};
}

json encode(const UnitaryOp& u) { return {{"dim", u.dim()}, {"matrix", encode(u.matrix())}}; }

json encode(const BipartiteState& s) {
  return {{"dims", {s.left_dim(), s.right_dim()}},
          {"left_basis", encode_labels(s.left_labels())},
          {"right_basis", encode_labels(s.right_labels())},
          {"amplitudes", encode(s.amplitudes())}};
}

json encode(const DensityMatrix& d) {
  json eig = json::array();
  for (long i = 0; i < d.eigenvalues().size(); ++i) eig.push_back(d.eigenvalues()(i));
  return {{"dim", d.dim()}, {"matrix", encode(d.matrix())}, {"eigenvalues", std::move(eig)}};
}

json encode(const Distribution& d) {
  json out = json::array();
  for (const auto& e : d) out.push_back({{"label", e.label}, {"probability", e.probability}});
  return out;
}

json encode(const SelectionContext& ctx) {
  return {{"pre", encode(ctx.pre)},
          {"post_pvm", encode(ctx.post_pvm)},
          {"post_label", ctx.post_label},
          {"pre_to_t", encode(ctx.pre_to_t)},
          {"t_to_post", encode(ctx.t_to_post)}};
}

json encode(const Stage& stage) {
  if (const auto* m = std::get_if<ProjectiveMeasurement>(&stage)) return {{"kind", "measure"}, {"pvm", encode(*m)}};
  if (const auto* u = std::get_if<UnitaryOp>(&stage)) return {{"kind", "unitary"}, {"unitary", encode(*u)}};
  return {{"kind", "nothing"}};
}

json encode(const Protocol& p) {
  return {{"preparation", encode(p.preparation)},
          {"intermediate", encode(p.intermediate)},
          {"pre_to_t", encode(p.pre_to_t)},
          {"t_to_post", encode(p.t_to_post)},
          {"post_pvm", encode(p.post_pvm)},
          {"selection", p.selection ? json(*p.selection) : json(nullptr)}};
}

json encode(const BipartiteProtocol& p) {
  return {{"state", encode(p.state)},
          {"left_pvm", p.left_pvm ? encode(*p.left_pvm) : json(nullptr)},
          {"right_pvm", encode(p.right_pvm)}};
}

json encode(const EnsembleStats& s) {
  json counts = json::array();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.final_labels.size(); ++c) {
      counts.push_back({{"intermediate_outcome", s.has_intermediate() ? json(s.intermediate_labels[r]) : json(nullptr)},
                        {"final_outcome", s.final_labels[c]},
                        {"count", s.count(r, c)}});
    }
  }
  json protocol = std::visit([](const auto& p) { return encode(p); }, s.protocol);
  return {{"protocol", std::move(protocol)},
          {"trials", s.trials},
          {"seed", s.seed},
          {"intermediate_labels", encode_labels(s.intermediate_labels)},
          {"final_labels", encode_labels(s.final_labels)},
          {"counts", std::move(counts)}};
}

json encode(const ConditionalFrequencies& c) {
  return {{"distribution", encode(c.distribution)}, {"matched", c.matched}, {"trials", c.trials}};
}

json encode(const AgreementReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"label", e.label},
                       {"frequency", e.frequency},
                       {"probability", e.probability},
                       {"gate", e.gate},
                       {"pass", e.pass}});
  }
  return {{"sample_size", r.sample_size}, {"z", r.z}, {"pass", r.pass}, {"entries", std::move(entries)}};
}

json encode(const CounterfactualStatement& s) {
  return {{"base_protocol", encode(s.base_protocol)}, {"query", encode(s.query)}, {"flavor", to_string(s.flavor)}};
}

json encode(const CotenabilityReport& r) {
  return {{"undisturbed", encode(r.undisturbed)},
          {"disturbed", encode(r.disturbed)},
          {"tvd", r.tvd},
          {"delta_selected", r.delta_selected ? json(*r.delta_selected) : json(nullptr)},
          {"cotenable", r.cotenable}};
}

json encode(const Verdict& v) {
  return {{"flavor", to_string(v.flavor)},
          {"claimed", encode(v.claimed)},
          {"counterfactual_world", encode(v.counterfactual_world)},
          {"max_deviation", v.max_deviation},
          {"cotenable", v.cotenable},
          {"classification", to_string(v.classification)},
          {"cotenability", encode(v.cotenability)}};
}

Complex<double> decode_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("complex number: expected [re, im]");
  return {number(j[0], "complex real part"), number(j[1], "complex imaginary part")};
}

Vector<double> decode_vector(const json& j) {
  if (!j.is_array()) throw InvalidArgument("vector: expected an array");
  Vector<double> v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = decode_complex(j[i]);
  return v;
}

Matrix<double> decode_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix: expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix<double> m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InvalidArgument("matrix: ragged or malformed row");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = decode_complex(j[r][c]);
  }
  return m;
}

PureState decode_state(const json& j) {
  Vector<double> amps = decode_vector(field(j, "amplitudes"));
  check_dim(j, amps.size(), "state");
  if (!j.contains("basis")) return PureState(std::move(amps));
  return PureState(strings(j["basis"], "state basis"), std::move(amps));
}

ProjectiveMeasurement decode_pvm(const json& j) {
  const json& outs = field(j, "outcomes");
  if (!outs.is_array()) throw InvalidArgument("pvm outcomes: expected an array");
  std::vector<ProjectiveMeasurement::Outcome> outcomes;
  for (const auto& o : outs) {
    const json& label = field(o, "label");
    if (!label.is_string()) throw InvalidArgument("pvm outcome label: expected a string");
    Matrix<double> projector;
    if (o.contains("projector")) {
      projector = decode_matrix(o["projector"]);
    } else if (o.contains("vector")) {
      Vector<double> v = decode_vector(o["vector"]);
      if (v.norm() == 0.0) throw InvalidArgument("pvm outcome vector is zero");
      v /= v.norm();
      projector = v * v.adjoint();
    } else {
      throw InvalidArgument("pvm outcome '" + label.get<std::string>() + "' needs 'projector' or 'vector'");
    }
    std::optional<UnitaryOp> route;
    if (o.contains("route")) route = UnitaryOp(decode_matrix(o["route"]));
    outcomes.push_back({label.get<std::string>(), std::move(projector), std::move(route)});
  }
  ProjectiveMeasurement pvm(std::move(outcomes));
  check_dim(j, pvm.dim(), "pvm");
  return pvm;
}

UnitaryOp decode_unitary(const json& j) {
  UnitaryOp u(decode_matrix(field(j, "matrix")));
  check_dim(j, u.dim(), "unitary");
  return u;
}

BipartiteState decode_bipartite(const json& j) {
  return BipartiteState(strings(field(j, "left_basis"), "left_basis"), strings(field(j, "right_basis"), "right_basis"),
                        decode_vector(field(j, "amplitudes")));
}

Distribution decode_distribution(const json& j) {
  if (!j.is_array()) throw InvalidArgument("distribution: expected an array");
  std::vector<Distribution::Entry> entries;
  for (const auto& e : j) {
    const json& label = field(e, "label");
    if (!label.is_string()) throw InvalidArgument("distribution label: expected a string");
    entries.push_back({label.get<std::string>(), number(field(e, "probability"), "probability")});
  }
  return Distribution(std::move(entries));
}

SelectionContext decode_context(const json& j) {
  PureState pre = decode_state(field(j, "pre"));
  ProjectiveMeasurement post = decode_pvm(field(j, "post_pvm"));
  const long d = pre.dim();
  UnitaryOp u = optional_unitary(j, "pre_to_t").value_or(UnitaryOp::identity(d));
  UnitaryOp v = optional_unitary(j, "t_to_post").value_or(UnitaryOp::identity(d));
  const json& label = field(j, "post_label");
  if (!label.is_string()) throw InvalidArgument("post_label: expected a string");
  return SelectionContext(SelectionBase(std::move(pre), std::move(post), std::move(u), std::move(v)),
                          label.get<std::string>());
}

Protocol decode_protocol(const json& j) {
  PureState prep = decode_state(field(j, "preparation"));
  const long d = prep.dim();
  Stage stage = Nothing{};
  if (j.contains("intermediate") && !j["intermediate"].is_null()) {
    const json& stage_json = j["intermediate"];
    const json& kind = field(stage_json, "kind");
    if (kind == "measure") {
      stage = decode_pvm(field(stage_json, "pvm"));
    } else if (kind == "unitary") {
      stage = decode_unitary(field(stage_json, "unitary"));
    } else if (kind != "nothing") {
      throw InvalidArgument("intermediate kind must be 'nothing', 'measure' or 'unitary'");
    }
  }
  std::optional<std::string> selection;
  if (j.contains("selection") && !j["selection"].is_null()) {
    if (!j["selection"].is_string()) throw InvalidArgument("selection: expected a string");
    selection = j["selection"].get<std::string>();
  }
  UnitaryOp u = optional_unitary(j, "pre_to_t").value_or(UnitaryOp::identity(d));
  UnitaryOp v = optional_unitary(j, "t_to_post").value_or(UnitaryOp::identity(d));
  return Protocol(std::move(prep), std::move(stage), std::move(u), std::move(v), decode_pvm(field(j, "post_pvm")),
                  std::move(selection));
}

CounterfactualStatement decode_statement(const json& j) {
  const json& flavor = field(j, "flavor");
  Flavor f;
  if (flavor == "single") {
    f = Flavor::SingleAntecedent;
  } else if (flavor == "compound") {
    f = Flavor::CompoundAntecedent;
  } else {
    throw InvalidArgument("flavor must be 'single' or 'compound'");
  }
  return CounterfactualStatement(decode_protocol(field(j, "base_protocol")), decode_pvm(field(j, "query")), f);
}

std::string to_csv(const EnsembleStats& s) {
  std::ostringstream out;
  out << "intermediate_outcome,final_outcome,count\n";
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t c = 0; c < s.final_labels.size(); ++c) {
      out << (s.has_intermediate() ? s.intermediate_labels[r] : "") << ',' << s.final_labels[c] << ','
          << s.count(r, c) << '\n';
    }
  }
  return out.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace tsqc::io
