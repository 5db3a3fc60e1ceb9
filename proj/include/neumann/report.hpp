#pragma once

#include "neumann/pipeline.hpp"
#include "neumann/spectral.hpp"

#include <json.hpp>

namespace neumann {

nlohmann::json partition_report(const Analysis& a);

/// Right angles and interlacing at saddles, monotonicity along separatrices.
struct StructureSummary {
  double max_right_angle_defect = 0.0;  // radians, interior saddles
  int interlacing_applicable = 0;
  int interlacing_passed = 0;
  double max_monotonicity_violation = 0.0;  // relative to the field scale
  int paths = 0;
};

StructureSummary structure_summary(const Analysis& a);
nlohmann::json to_json(const StructureSummary& s);

nlohmann::json spectrum_report(const Analysis& a, const std::vector<DomainSpectrum>& spectra);

}  // namespace neumann
