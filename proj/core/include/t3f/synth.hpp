#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "t3f/dataset.hpp"

namespace t3f {

/// Planted two-or-more-class temporal graphs with class-dependent cycle counts.
///
/// Every graph has a scaffold: a uniformly random spanning tree plus
/// cycle_density[c] chords for class c. Chords are chosen so that no triangle is
/// created, so each chord adds one independent 1-cycle that the clique complex
/// does not fill. At every integer timestep each scaffold edge fires with
/// probability `fire_prob`. With `redraw_every > 0` a fresh scaffold is drawn
/// every that many timesteps.
struct SynthSpec {
  std::string name = "synthetic";
  std::size_t num_graphs = 200;
  std::size_t nodes = 30;
  std::size_t timesteps = 24;
  std::size_t classes = 2;
  std::vector<std::size_t> cycle_density{0, 3};
  double fire_prob = 0.5;
  std::size_t redraw_every = 0;

  /// Throws InvalidSpec.
  void validate() const;
};

/// `key = value` lines; cycle_density is a comma-separated list.
SynthSpec parse_synth_spec(std::istream& in, const std::string& source_name);
SynthSpec read_synth_spec(const std::string& path);

/// Graph i gets label i % classes. Deterministic for a given seed.
Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed);

}  // namespace t3f
