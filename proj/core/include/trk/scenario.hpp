#pragma once

#include <string>
#include <vector>

#include "trk/semantics.hpp"
#include "trk/synthesis.hpp"

namespace trk::scenario {

struct Scenario {
  std::string name;
  std::string formula_text;
  synthesis::SynthesisProblem problem;
};

// JSON scenario files; see the README for the schema. Errors carry the file
// name and the offending key.
Scenario load(const std::string& path);
Scenario parse_json(const std::string& text, const std::string& origin);

// CSV with a "t,..." header; state columns are the ones named x<dim>, so the
// files written by write_trajectory_csv read back unchanged.
semantics::StateSignal read_state_csv(const std::string& path);

// CSV with a "t,<pred>,..." header and +1/-1 entries; columns are matched to
// table predicates by name, and every predicate must be present.
semantics::PredicateSignalSet read_predicate_csv(const std::string& path,
                                                 const stl::PredicateTable& table);

void write_trajectory_csv(const std::string& path, const semantics::StateSignal& sig,
                          const std::vector<std::vector<double>>& inputs);

// Per-predicate boolean rows, one line per step.
void write_plotdata_csv(const std::string& path, const stl::PredicateTable& table,
                        const semantics::PredicateSignalSet& sig);

void write_summary_json(const std::string& path, const Scenario& sc,
                        const synthesis::SynthesisResult& result,
                        const synthesis::ValidationReport& report);

}  // namespace trk::scenario
