#pragma once

#include "neumann/geometry.hpp"
#include "neumann/theorems.hpp"

#include <memory>

namespace neumann {

struct AnalysisOptions {
  int resolution = 256;
  MorseOptions morse;
  FlowOptions flow;
};

/// Field -> critical points -> separatrices -> labeled partition -> geometry.
struct Analysis {
  FieldPtr field;
  AnalysisOptions options;
  std::shared_ptr<const CriticalSet> cs;
  std::shared_ptr<const NeumannLineSet> nls;
  Partition partition;
  std::vector<DomainGeometry> geometry;
  RadiusCensus census;
};

Analysis analyze(FieldPtr f, const AnalysisOptions& opts = {});

/// Same field, critical set and separatrices, labeled at another resolution.
Analysis relabel(const Analysis& base, int resolution);

}  // namespace neumann
