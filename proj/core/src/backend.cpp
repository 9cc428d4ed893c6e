#include "trk/backend.hpp"

#include <unistd.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fs = std::filesystem;

namespace trk::backend {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string find_driver() {
  if (const char* p = std::getenv("TRK_LP_DRIVER"); p && *p && fs::exists(p)) return p;
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    for (const char* rel : {"milp_solve.py", "../share/trk/milp_solve.py"}) {
      fs::path cand = exe.parent_path() / rel;
      if (fs::exists(cand)) return fs::weakly_canonical(cand, ec).string();
    }
  }
#ifdef TRK_DRIVER_SOURCE_PATH
  if (fs::exists(TRK_DRIVER_SOURCE_PATH)) return TRK_DRIVER_SOURCE_PATH;
#endif
  return "";
}

SolveStatus status_from_word(const std::string& word) {
  if (word == "optimal") return SolveStatus::Optimal;
  if (word == "feasible" || word == "suboptimal") return SolveStatus::Feasible;
  if (word == "infeasible" || word == "unbounded") return SolveStatus::Infeasible;
  if (word == "timeout" || word == "timelimit") return SolveStatus::Timeout;
  return SolveStatus::Error;
}

// "optimal" / "objective 4" / "x_0_0 0.5" lines, as written by the bundled driver.
Solution parse_driver(const std::vector<std::string>& lines) {
  Solution sol;
  bool saw_status = false;
  for (const auto& raw : lines) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (!saw_status) {
      sol.raw_status = line;
      sol.status = status_from_word(lower(line));
      saw_status = true;
      continue;
    }
    if (sol.status == SolveStatus::Error) {
      sol.raw_status += " " + line;
      continue;
    }
    std::istringstream is(line);
    std::string name;
    double v = 0.0;
    if (!(is >> name >> v)) continue;
    if (name == "objective")
      sol.objective = v;
    else
      sol.values[name] = v;
  }
  return sol;
}

// cbc -solu output: a status header, then "<row> <name> <value> <reduced>".
Solution parse_cbc(const std::vector<std::string>& lines) {
  Solution sol;
  if (!lines.empty()) {
    sol.raw_status = trim(lines[0]);
    std::string head = lower(sol.raw_status);
    if (head.rfind("optimal", 0) == 0)
      sol.status = SolveStatus::Optimal;
    else if (head.find("infeasible") != std::string::npos)
      sol.status = SolveStatus::Infeasible;
    else if (head.rfind("stopped", 0) == 0)
      sol.status = SolveStatus::Timeout;
    else
      sol.status = SolveStatus::Error;
    if (auto pos = head.find("objective value"); pos != std::string::npos)
      sol.objective = std::atof(sol.raw_status.c_str() + pos + 15);
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string line = trim(lines[i]);
    if (line.rfind("**", 0) == 0) line = trim(line.substr(2));
    std::istringstream is(line);
    long long idx = 0;
    std::string name;
    double v = 0.0;
    if (is >> idx >> name >> v) sol.values[name] = v;
  }
  return sol;
}

std::string xml_attr(const std::string& line, const std::string& key) {
  auto pos = line.find(key + "=\"");
  if (pos == std::string::npos) return "";
  pos += key.size() + 2;
  auto end = line.find('"', pos);
  if (end == std::string::npos) return "";
  return line.substr(pos, end - pos);
}

Solution parse_xml(const std::vector<std::string>& lines) {
  Solution sol;
  for (const auto& line : lines) {
    if (auto s = xml_attr(line, "solutionStatusString"); !s.empty()) {
      sol.raw_status = s;
      std::string ls = lower(s);
      if (ls.find("infeasible") != std::string::npos)
        sol.status = SolveStatus::Infeasible;
      else if (ls.find("optimal") != std::string::npos)
        sol.status = SolveStatus::Optimal;
      else if (ls.find("time") != std::string::npos)
        sol.status = SolveStatus::Timeout;
      else
        sol.status = SolveStatus::Feasible;
    }
    if (auto o = xml_attr(line, "objectiveValue"); !o.empty()) sol.objective = std::atof(o.c_str());
    std::string name = xml_attr(line, "name");
    std::string value = xml_attr(line, "value");
    if (!name.empty() && !value.empty()) sol.values[name] = std::atof(value.c_str());
  }
  return sol;
}

Solution parse_solution_file(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  std::string first;
  for (const auto& l : lines)
    if (!trim(l).empty()) {
      first = trim(l);
      break;
    }
  if (first.empty()) {
    Solution sol;
    sol.raw_status = "empty solution file";
    return sol;
  }
  if (status_from_word(lower(first)) != SolveStatus::Error || lower(first) == "error")
    return parse_driver(lines);
  if (lower(first).find("objective value") != std::string::npos) return parse_cbc(lines);
  for (const auto& l : lines)
    if (l.find("CPLEXSolution") != std::string::npos || l.find("variable name=") != std::string::npos)
      return parse_xml(lines);
  Solution sol;
  sol.raw_status = "unrecognized solution format: " + first;
  return sol;
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

double Solution::value(const std::string& name, double fallback) const {
  auto it = values.find(name);
  return it == values.end() ? fallback : it->second;
}

SolverConfig default_config() {
  SolverConfig cfg;
  if (const char* cmd = std::getenv("TRK_SOLVER_CMD"); cmd && *cmd) {
    cfg.command_template = cmd;
    return cfg;
  }
  if (std::system("command -v cbc >/dev/null 2>&1") == 0) {
    cfg.command_template =
        "cbc {model} -seconds {time_limit} -ratioGap {mip_gap} solve -solu {solution}";
    return cfg;
  }
  if (std::string driver = find_driver(); !driver.empty()) {
    cfg.command_template = "python3 " + driver +
                           " {model} {solution} --time-limit {time_limit} --mip-gap {mip_gap}";
    return cfg;
  }
  throw std::runtime_error(
      "no MILP solver found: set TRK_SOLVER_CMD, put cbc on PATH, or point "
      "TRK_LP_DRIVER at the bundled milp_solve.py");
}

Solution run(const milp::Model& model, const SolverConfig& config) {
  if (config.command_template.empty())
    throw std::invalid_argument("solver command template is empty");

  fs::path dir;
  bool own_dir = false;
  if (config.work_dir.empty()) {
    std::string tmpl = (fs::temp_directory_path() / "trk_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    dir = buf.data();
    own_dir = true;
  } else {
    dir = config.work_dir;
    fs::create_directories(dir);
  }
  fs::path model_path = dir / "model.lp";
  fs::path sol_path = dir / "model.sol";
  {
    std::ofstream out(model_path);
    out << model.export_lp();
    if (!out) throw std::runtime_error("failed to write " + model_path.string());
  }

  std::string cmd = config.command_template;
  replace_all(cmd, "{model}", model_path.string());
  replace_all(cmd, "{solution}", sol_path.string());
  replace_all(cmd, "{time_limit}", fmt_double(config.time_limit_seconds));
  replace_all(cmd, "{mip_gap}", fmt_double(config.mip_gap));
  cmd += " 2>&1";

  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("failed to start solver: " + cmd);
  std::array<char, 4096> chunk;
  while (std::size_t n = fread(chunk.data(), 1, chunk.size(), pipe))
    output.append(chunk.data(), n);
  int rc = pclose(pipe);

  Solution sol;
  if (fs::exists(sol_path)) {
    sol = parse_solution_file(sol_path.string());
  } else {
    sol.status = SolveStatus::Error;
    std::string tail = output.size() > 2000 ? output.substr(output.size() - 2000) : output;
    sol.raw_status = "no solution file (solver exit " + std::to_string(rc) + "): " + tail;
  }

  if (!config.keep_files) {
    std::error_code ec;
    fs::remove(model_path, ec);
    fs::remove(sol_path, ec);
    if (own_dir) fs::remove(dir, ec);
  }
  return sol;
}

void round_integers(const milp::Model& model, Solution& sol, double tol) {
  for (const auto& var : model.variables()) {
    if (var.kind == milp::VarKind::Continuous) continue;
    auto it = sol.values.find(var.name);
    if (it == sol.values.end()) {
      if (var.lb > 0.0 || var.ub < 0.0)
        throw std::runtime_error("solver omitted integer variable " + var.name +
                                 " whose bounds exclude zero");
      continue;
    }
    double rounded = std::llround(it->second);
    if (std::abs(it->second - rounded) > tol)
      throw std::runtime_error("integer variable " + var.name + " has fractional value " +
                               std::to_string(it->second));
    it->second = rounded;
  }
}

}  // namespace trk::backend
