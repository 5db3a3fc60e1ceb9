#include "neumann/pipeline.hpp"

namespace neumann {

namespace {

void finish(Analysis& a) {
  LabelOptions lo;
  lo.resolution = a.options.resolution;
  lo.flow = a.options.flow;
  a.partition = label_by_flow(a.field, a.cs, a.nls, lo);
  a.geometry = measure_all(a.partition);
  a.census = outer_radius_census(a.partition, a.geometry);
}

}  // namespace

Analysis analyze(FieldPtr f, const AnalysisOptions& opts) {
  Analysis a;
  a.field = std::move(f);
  a.options = opts;
  auto cs = std::make_shared<CriticalSet>(find_critical_points(*a.field, opts.morse));
  a.cs = cs;
  const FlowTracer tracer(a.field, *cs, opts.flow);
  a.nls = std::make_shared<const NeumannLineSet>(build_neumann_line_set(tracer));
  finish(a);
  return a;
}

Analysis relabel(const Analysis& base, int resolution) {
  Analysis a;
  a.field = base.field;
  a.options = base.options;
  a.options.resolution = resolution;
  a.cs = base.cs;
  a.nls = base.nls;
  finish(a);
  return a;
}

}  // namespace neumann
