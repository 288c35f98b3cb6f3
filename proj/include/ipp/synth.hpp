#ifndef IPP_SYNTH_HPP
#define IPP_SYNTH_HPP

#include <cstdint>

#include "ipp/io.hpp"

namespace ipp {

// Synthetic dataset generation: positions drawn uniformly in the extent (or
// an inscribed ellipse for lake-like footprints), values sampled from the
// specified GP. Deterministic for a fixed seed.
struct SynthSpec {
  std::uint64_t seed = 0;
  int locations = 0;
  double width = 0.0;   // meters
  double height = 0.0;  // meters
  SEKernelParams kernel{};
  int scans = 1;
  bool elliptical_region = false;
  // Vertical flattening of the elliptical footprint (1 = inscribed ellipse).
  double ellipse_y_scale = 1.0;
  double experiment_cost = 1.0;
};

Dataset gen_synth(const SynthSpec& spec);

// Desk-scale stand-ins for the field datasets the planner was exercised on:
// geometry and experiment costs match, values are synthetic.
SynthSpec lake_preset(std::uint64_t seed);      // 250x50 m, 218 pts, cost 10.5
SynthSpec berkeley_preset(std::uint64_t seed);  // 45x40 m, 52 pts, cost 9
SynthSpec precip_preset(std::uint64_t seed);    // 7x9 m, 167 pts, cost 1.4

}  // namespace ipp

#endif
