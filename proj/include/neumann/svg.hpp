#pragma once

#include "neumann/pipeline.hpp"

#include <string>

namespace neumann {

struct RenderOptions {
  int width = 800;  // pixels along the longer side
  bool show_nodal_domains = true;
};

/// Nodal domains as red (positive) and blue (negative) fills, nodal lines in grey, Neumann lines
/// in black, maxima/minima as red/blue circles and saddles as purple diamonds. One
/// <path class="neumann-domain"> per Neumann domain. Output depends only on the analysis.
std::string render_svg(const Analysis& a, const RenderOptions& opts = {});

}  // namespace neumann
