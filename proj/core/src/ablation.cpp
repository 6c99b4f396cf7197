#include "gazeload/ablation.hpp"

#include "gazeload/error.hpp"
#include "gazeload/io.hpp"

namespace gazeload {

std::vector<AblationCell> run_ablations(const Dataset& data, const PipelineConfig& base,
                                        const AblationGrid& grid) {
  if (grid.windows.empty() && !grid.module_toggles) {
    throw InputError("ablation grid is empty");
  }

  struct CellSpec {
    int window;
    bool rules, profiles, retrieval;
  };
  std::vector<CellSpec> specs;
  for (int w : grid.windows) specs.push_back({w, true, true, true});
  if (grid.module_toggles) {
    specs.push_back({grid.toggle_window, false, true, true});
    specs.push_back({grid.toggle_window, true, false, true});
    specs.push_back({grid.toggle_window, true, true, false});
    specs.push_back({grid.toggle_window, false, false, false});
  }

  std::vector<AblationCell> cells;
  for (const CellSpec& spec : specs) {
    AblationCell cell;
    cell.window = spec.window;
    cell.rules = spec.rules;
    cell.profiles = spec.profiles;
    cell.retrieval = spec.retrieval;

    PipelineConfig cfg = base;
    cfg.window = spec.window;
    cfg.use_rules = spec.rules;
    cfg.use_profiles = spec.profiles;
    cfg.use_retrieval = spec.retrieval;
    try {
      const PipelineResult r = run_pipeline(data, cfg);
      cell.ok = true;
      cell.accuracy = r.report.accuracy;
      cell.macro_f1 = r.report.macro_f1;
      cell.wall_seconds = r.wall_seconds;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::string ablation_to_csv(const std::vector<AblationCell>& cells) {
  std::string out = "window,rules,profiles,retrieval,status,accuracy,macro_f1,wall_seconds,error\n";
  for (const AblationCell& c : cells) {
    std::string error = c.error;
    for (char& ch : error) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out += std::to_string(c.window) + "," + (c.rules ? "on" : "off") + "," +
           (c.profiles ? "on" : "off") + "," + (c.retrieval ? "on" : "off") + "," +
           (c.ok ? "ok" : "failed") + "," + format_fixed(c.accuracy, 6) + "," +
           format_fixed(c.macro_f1, 6) + "," + format_fixed(c.wall_seconds, 3) + "," +
           error + "\n";
  }
  return out;
}

}  // namespace gazeload
