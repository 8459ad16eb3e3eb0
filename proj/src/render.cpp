#include "tsqc/render.hpp"

#include <iomanip>
#include <sstream>

#include "tsqc/json_io.hpp"

namespace tsqc::render {

using nlohmann::json;

namespace {

std::string fixed(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << v;
  return out.str();
}

std::string sci(double v) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(3) << v;
  return out.str();
}

const char* mark(bool ok) { return ok ? "PASS" : "FAIL"; }

/// Left-aligned columns padded to the widest cell.
class Table {
 public:
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void print(std::ostream& out, const std::string& indent = "  ") const {
    std::vector<std::size_t> width;
    for (const auto& r : rows_) {
      if (width.size() < r.size()) width.resize(r.size(), 0);
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    for (const auto& r : rows_) {
      std::string line = indent;
      for (std::size_t c = 0; c < r.size(); ++c) {
        line += r[c];
        if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
      }
      out << line << '\n';
    }
  }

  bool empty() const { return rows_.empty(); }

 private:
  std::vector<std::vector<std::string>> rows_;
};

json named_distributions(const std::deque<NamedDistribution>& items) {
  json out = json::object();
  for (const auto& d : items) out[d.name] = io::encode(d.distribution);
  return out;
}

void distribution_rows(Table& table, const std::string& name, const Distribution& d) {
  for (const auto& e : d) table.row({name, e.label, fixed(e.probability)});
}

void verdict_text(std::ostream& out, const Verdict& v, const std::string& indent) {
  out << indent << "flavor          " << to_string(v.flavor) << '\n';
  out << indent << "classification  " << to_string(v.classification) << '\n';
  out << indent << "max_deviation   " << sci(v.max_deviation) << '\n';
  out << indent << "cotenable       " << (v.cotenable ? "yes" : "no") << "  (tvd " << fixed(v.cotenability.tvd);
  if (v.cotenability.delta_selected) out << ", delta_selected " << fixed(*v.cotenability.delta_selected);
  out << ")\n";
  Table table;
  table.row({"outcome", "claimed", "counterfactual"});
  for (std::size_t i = 0; i < v.claimed.size(); ++i) {
    table.row({v.claimed[i].label, fixed(v.claimed[i].probability), fixed(v.counterfactual_world[i].probability)});
  }
  table.print(out, indent);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + "\"";
}

void run_csv(std::ostream& out, const std::string& run, const EnsembleStats& stats) {
  for (std::size_t r = 0; r < stats.rows(); ++r) {
    for (std::size_t c = 0; c < stats.final_labels.size(); ++c) {
      out << csv_field(run) << ',' << (stats.has_intermediate() ? csv_field(stats.intermediate_labels[r]) : "") << ','
          << csv_field(stats.final_labels[c]) << ',' << stats.count(r, c) << '\n';
    }
  }
}

void scenario_text(std::ostream& out, const ScenarioReport& r) {
  out << "scenario " << r.name << "  trials=" << r.trials << "  seed=" << r.seed << "  " << mark(r.passed()) << '\n';
  if (!r.params.empty()) out << "params " << r.params.dump() << '\n';
  for (const auto& line : r.narrative) out << "  " << line << '\n';

  if (!r.analytic.empty()) {
    out << "\nanalytic\n";
    Table t;
    for (const auto& d : r.analytic) distribution_rows(t, d.name, d.distribution);
    t.print(out);
  }
  if (!r.values.empty()) {
    out << "\nvalues\n";
    Table t;
    for (const auto& v : r.values) t.row({v.name, fixed(v.value)});
    t.print(out);
  }
  if (!r.empirical.empty()) {
    out << "\nempirical\n";
    Table t;
    for (const auto& d : r.empirical) distribution_rows(t, d.name, d.distribution);
    t.print(out);
  }
  if (!r.gates.empty()) {
    out << "\ngates (z = " << fixed(r.gates.front().report.z) << ")\n";
    Table t;
    t.row({"gate", "outcome", "frequency", "probability", "allowed", "result"});
    for (const auto& g : r.gates) {
      for (const auto& e : g.report.entries) {
        t.row({g.name, e.label, fixed(e.frequency), fixed(e.probability), fixed(e.gate), mark(e.pass)});
      }
    }
    t.print(out);
  }
  if (!r.checks.empty()) {
    out << "\nchecks\n";
    Table t;
    for (const auto& c : r.checks) t.row({c.name, mark(c.pass), c.detail});
    t.print(out);
  }
  for (const auto& v : r.verdicts) {
    out << "\nverdict " << v.name << '\n';
    verdict_text(out, v.verdict, "  ");
  }
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "text") return Format::Text;
  throw InvalidArgument("unknown format '" + name + "' (expected json, csv or text)");
}

json to_json(const ScenarioReport& r) {
  json values = json::object();
  for (const auto& v : r.values) values[v.name] = v.value;
  json runs = json::object();
  for (const auto& run : r.runs) runs[run.name] = io::encode(run.stats);
  json gates = json::object();
  for (const auto& g : r.gates) gates[g.name] = io::encode(g.report);
  json checks = json::object();
  for (const auto& c : r.checks) checks[c.name] = {{"pass", c.pass}, {"detail", c.detail}};
  json verdicts = json::object();
  for (const auto& v : r.verdicts) verdicts[v.name] = io::encode(v.verdict);
  return {{"scenario", r.name},
          {"params", r.params},
          {"trials", r.trials},
          {"seed", r.seed},
          {"pass", r.passed()},
          {"narrative", r.narrative},
          {"analytic", named_distributions(r.analytic)},
          {"values", std::move(values)},
          {"empirical", named_distributions(r.empirical)},
          {"gates", std::move(gates)},
          {"checks", std::move(checks)},
          {"verdicts", std::move(verdicts)},
          {"runs", std::move(runs)}};
}

json to_json(const VerifyReport& report) {
  json suites = json::array();
  for (const auto& s : report.suites) {
    suites.push_back({{"name", s.name},
                      {"pass", s.passed()},
                      {"instances", s.instances},
                      {"failures", s.failures},
                      {"skipped", s.skipped},
                      {"max_deviation", s.max_deviation},
                      {"notes", s.notes},
                      {"summary", s.summary}});
  }
  json scenarios = json::array();
  for (const auto& s : report.scenarios) scenarios.push_back(to_json(s));
  return {{"trials", report.options.trials},
          {"seed", report.options.seed},
          {"pass", report.passed()},
          {"passed", report.passed_count()},
          {"failed", report.failed_count()},
          {"suites", std::move(suites)},
          {"scenarios", std::move(scenarios)}};
}

std::string scenario(const ScenarioReport& report, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Json:
      return io::dump(to_json(report));
    case Format::Csv:
      out << "run,intermediate_outcome,final_outcome,count\n";
      for (const auto& run : report.runs) run_csv(out, run.name, run.stats);
      break;
    case Format::Text:
      scenario_text(out, report);
      break;
  }
  return out.str();
}

std::string verdict(const CounterfactualStatement& statement, const Verdict& v, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Json:
      return io::dump({{"statement", io::encode(statement)}, {"verdict", io::encode(v)}});
    case Format::Csv:
      out << "outcome,claimed,counterfactual\n";
      for (std::size_t i = 0; i < v.claimed.size(); ++i) {
        out << csv_field(v.claimed[i].label) << ',' << fixed(v.claimed[i].probability) << ','
            << fixed(v.counterfactual_world[i].probability) << '\n';
      }
      break;
    case Format::Text:
      verdict_text(out, v, "");
      break;
  }
  return out.str();
}

std::string verification(const VerifyReport& report, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Json:
      return io::dump(to_json(report));
    case Format::Csv:
      out << "kind,name,pass,instances,failures,max_deviation\n";
      for (const auto& s : report.suites) {
        out << "suite," << s.name << ',' << (s.passed() ? "true" : "false") << ',' << s.instances << ','
            << s.failures << ',' << sci(s.max_deviation) << '\n';
      }
      for (const auto& s : report.scenarios) {
        const std::string name = s.params.empty() ? s.name : s.name + " " + s.params.dump();
        out << "scenario," << csv_field(name) << ',' << (s.passed() ? "true" : "false") << ",,,\n";
      }
      break;
    case Format::Text: {
      Table t;
      for (const auto& s : report.suites) {
        std::string detail = std::to_string(s.instances) + " instances";
        if (s.skipped) detail += ", " + std::to_string(s.skipped) + " skipped";
        detail += ", max deviation " + sci(s.max_deviation);
        if (!s.summary.empty()) detail += " (" + s.summary + ")";
        t.row({mark(s.passed()), s.name, detail});
      }
      for (const auto& s : report.scenarios) {
        std::size_t failing = 0;
        for (const auto& g : s.gates) failing += g.report.pass ? 0 : 1;
        for (const auto& c : s.checks) failing += c.pass ? 0 : 1;
        const std::string name = s.params.empty() ? s.name : s.name + " " + s.params.dump();
        t.row({mark(s.passed()), name,
               std::to_string(s.gates.size()) + " gates, " + std::to_string(s.checks.size()) + " checks" +
                   (failing ? ", " + std::to_string(failing) + " failing" : "")});
      }
      t.print(out, "");
      for (const auto& s : report.suites) {
        for (const auto& note : s.notes) out << "  " << s.name << ": " << note << '\n';
      }
      out << report.passed_count() << " passed, " << report.failed_count() << " failed\n";
      break;
    }
  }
  return out.str();
}

std::string catalogue(Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Json: {
      json list = json::array();
      for (const auto& info : scenario_catalogue()) {
        json params = json::array();
        for (const auto& p : info.params) {
          params.push_back(
              {{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"description", p.description}});
        }
        list.push_back({{"name", info.name}, {"summary", info.summary}, {"params", std::move(params)}});
      }
      return io::dump(list);
    }
    case Format::Csv:
      out << "scenario,param,type,default\n";
      for (const auto& info : scenario_catalogue()) {
        if (info.params.empty()) out << info.name << ",,,\n";
        for (const auto& p : info.params) out << info.name << ',' << p.name << ',' << p.type << ',' << p.default_value << '\n';
      }
      break;
    case Format::Text:
      for (const auto& info : scenario_catalogue()) {
        out << info.name << "\n  " << info.summary << '\n';
        for (const auto& p : info.params) {
          out << "    " << p.name << " (" << p.type << ", default " << p.default_value << "): " << p.description << '\n';
        }
      }
      break;
  }
  return out.str();
}

}  // namespace tsqc::render
