#pragma once

#include <string>
#include <vector>

#include "gazeload/pipeline.hpp"

namespace gazeload {

struct AblationCell {
  int window = 5;
  bool rules = true;
  bool profiles = true;
  bool retrieval = true;
  bool ok = false;
  std::string error;  // set when the cell failed
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double wall_seconds = 0.0;
};

struct AblationGrid {
  std::vector<int> windows = {3, 5, 10, 20};
  bool module_toggles = true;  // adds single-module-off cells + all-off
  int toggle_window = 5;
};

// Runs one pipeline per cell: every window length with all modules on, then
// (optionally) each module toggled off at the toggle window, and all three
// off together (the bare zero-shot prompt configuration). A failing cell is
// recorded with its error and the grid continues. Cells come back in
// construction order, which is deterministic.
std::vector<AblationCell> run_ablations(const Dataset& data, const PipelineConfig& base,
                                        const AblationGrid& grid);

// CSV format:
// window,rules,profiles,retrieval,status,accuracy,macro_f1,wall_seconds,error
std::string ablation_to_csv(const std::vector<AblationCell>& cells);

}  // namespace gazeload
