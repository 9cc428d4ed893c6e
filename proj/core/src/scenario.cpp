#include "trk/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trk::scenario {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    std::size_t a = cell.find_first_not_of(" \t\r");
    std::size_t b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

Scenario load(const std::string& path) { return parse_json(slurp(path), path); }

Scenario parse_json(const std::string& text, const std::string& origin) {
  try {
    const json j = json::parse(text);
    Scenario sc;
    sc.name = j.value("name", "");
    auto& pb = sc.problem;
    pb.horizon = j.at("horizon").get<int>();
    pb.objective = synthesis::objective_from_string(j.value("objective", "theta"));
    pb.tiebreak_weight = j.value("tiebreak_weight", 0.0);

    const json& sys = j.at("system");
    pb.system.A = sys.at("A").get<std::vector<std::vector<double>>>();
    pb.system.B = sys.at("B").get<std::vector<std::vector<double>>>();
    pb.system.x0 = sys.at("x0").get<std::vector<double>>();
    pb.system.input_bound = sys.at("input_bound").get<double>();
    pb.system.state_box.lo = sys.at("state_box").at("lo").get<std::vector<double>>();
    pb.system.state_box.hi = sys.at("state_box").at("hi").get<std::vector<double>>();

    for (const json& p : j.at("predicates"))
      pb.predicates.add(p.at("name").get<std::string>(),
                        p.at("coeffs").get<std::vector<double>>(), p.at("offset").get<double>());

    sc.formula_text = j.at("formula").get<std::string>();
    pb.formula = stl::parse(sc.formula_text, pb.predicates);
    pb.system.check();
    return sc;
  } catch (const stl::ParseError& e) {
    throw std::runtime_error(origin + ": formula: " + e.what());
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
}

semantics::StateSignal read_state_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "t")
    throw std::runtime_error(path + ": first column must be t");
  std::vector<std::size_t> cols;
  for (std::size_t i = 1; i < header.size(); ++i)
    if (header[i].size() > 1 && header[i][0] == 'x' &&
        header[i].find_first_not_of("0123456789", 1) == std::string::npos)
      cols.push_back(i);
  if (cols.empty()) throw std::runtime_error(path + ": no state columns (x0, x1, ...)");

  semantics::StateSignal sig;
  int expected_t = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() < cols.back() + 1)
      throw std::runtime_error(path + ": short row '" + line + "'");
    if (std::stoi(cells[0]) != expected_t)
      throw std::runtime_error(path + ": expected t=" + std::to_string(expected_t));
    ++expected_t;
    std::vector<double> state;
    for (std::size_t c : cols) state.push_back(std::stod(cells[c]));
    sig.states.push_back(std::move(state));
  }
  if (sig.states.empty()) throw std::runtime_error(path + ": no data rows");
  return sig;
}

semantics::PredicateSignalSet read_predicate_csv(const std::string& path,
                                                 const stl::PredicateTable& table) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "t")
    throw std::runtime_error(path + ": first column must be t");

  std::vector<std::size_t> col_of(table.size(), 0);
  for (int k = 1; k <= table.size(); ++k) {
    const std::string& name = table.by_id(k).name;
    std::size_t col = 0;
    for (std::size_t i = 1; i < header.size(); ++i)
      if (header[i] == name) col = i;
    if (col == 0) throw std::runtime_error(path + ": missing predicate column '" + name + "'");
    col_of[k - 1] = col;
  }

  semantics::PredicateSignalSet sig;
  sig.rows.resize(table.size());
  int expected_t = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (std::stoi(cells[0]) != expected_t)
      throw std::runtime_error(path + ": expected t=" + std::to_string(expected_t));
    ++expected_t;
    for (int k = 1; k <= table.size(); ++k) {
      if (col_of[k - 1] >= cells.size())
        throw std::runtime_error(path + ": short row '" + line + "'");
      const int v = std::stoi(cells[col_of[k - 1]]);
      if (v != 1 && v != -1)
        throw std::runtime_error(path + ": predicate values must be +1 or -1");
      sig.rows[k - 1].push_back(v);
    }
  }
  sig.horizon = expected_t - 1;
  sig.check();
  return sig;
}

void write_trajectory_csv(const std::string& path, const semantics::StateSignal& sig,
                          const std::vector<std::vector<double>>& inputs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const std::size_t n = sig.states.empty() ? 0 : sig.states[0].size();
  const std::size_t m = inputs.empty() ? 0 : inputs[0].size();
  out << "t";
  for (std::size_t d = 0; d < n; ++d) out << ",x" << d;
  for (std::size_t d = 0; d < m; ++d) out << ",u" << d;
  out << "\n";
  for (std::size_t t = 0; t < sig.states.size(); ++t) {
    out << t;
    for (double v : sig.states[t]) out << ',' << fmt_value(v);
    for (std::size_t d = 0; d < m; ++d) {
      out << ',';
      if (t < inputs.size()) out << fmt_value(inputs[t][d]);
    }
    out << "\n";
  }
}

void write_plotdata_csv(const std::string& path, const stl::PredicateTable& table,
                        const semantics::PredicateSignalSet& sig) {
  sig.check();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (int k = 1; k <= table.size(); ++k) out << ',' << table.by_id(k).name;
  out << "\n";
  for (int t = 0; t <= sig.horizon; ++t) {
    out << t;
    for (int k = 1; k <= table.size(); ++k) out << ',' << sig.rows[k - 1][t];
    out << "\n";
  }
}

void write_summary_json(const std::string& path, const Scenario& sc,
                        const synthesis::SynthesisResult& result,
                        const synthesis::ValidationReport& report) {
  json j;
  j["name"] = sc.name;
  j["formula"] = sc.formula_text;
  j["horizon"] = sc.problem.horizon;
  j["objective_kind"] = synthesis::to_string(sc.problem.objective);
  j["objective"] = result.objective_value;
  j["feasible"] = result.feasible;
  j["solver_status"] = result.solver_status;
  j["solve_seconds"] = result.solve_seconds;
  j["satisfied"] = report.char_holds;
  j["validated"] = report.pass;
  j["cross_eval"] = {{"theta", report.theta},
                     {"theta_left", report.theta_left},
                     {"theta_right", report.theta_right}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace trk::scenario
