#include "hsd/pipeline.hpp"

namespace hsd {

Pipeline compile_pipeline(Prdg g, HsdSchedule sch, const ResidualOptions& opts) {
  Pipeline p{std::move(g), std::move(sch), {}, {}};
  p.residual = residualize(p.graph, p.schedule, opts);
  p.program = build_tile_program(reindex_to_spacetime(p.graph, p.schedule), reindex_to_spacetime(p.residual, p.schedule));
  return p;
}

Pipeline load_benchmark(std::string_view benchmark, std::string_view mapping, const ResidualOptions& opts) {
  const auto& info = find_benchmark(benchmark);
  const auto& m = find_mapping(info, mapping);
  Prdg g = load_prdg(data_path(info.prdg_file));
  HsdSchedule sch = load_schedule(data_path(m.schedule_file), g);
  return compile_pipeline(std::move(g), std::move(sch), opts);
}

TileProgram overapproximated_program(const Pipeline& p) {
  ResidualOptions all;
  all.keep_static = true;
  const Prdg full = residualize(p.graph, p.schedule, all);
  return build_tile_program(reindex_to_spacetime(p.graph, p.schedule), reindex_to_spacetime(full, p.schedule));
}

}  // namespace hsd
