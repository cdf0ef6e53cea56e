#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "t3f/model.hpp"
#include "t3f/temporal_graph.hpp"

namespace t3f {

enum class FeatureMode { TemporalDegree, Binary, Provided };

std::string_view to_string(FeatureMode mode) noexcept;
FeatureMode parse_feature_mode(std::string_view s);

// How descriptor tokens are scaled before entering the encoders.
enum class TokenScaling { Raw, Log1p };

std::string_view to_string(TokenScaling s) noexcept;
TokenScaling parse_token_scaling(std::string_view s);

/// Everything a training / evaluation run needs. Read from a `key = value` file.
struct RunConfig {
  double delta = 6.0;
  double sigma = 4.0;
  std::size_t dos_bins = 4;
  bool count_multiplicity = false;

  std::size_t sage_layers = 2;
  std::size_t hidden_dim = 32;
  std::size_t d_model = 32;
  std::size_t heads = 2;
  std::size_t encoder_layers = 2;
  std::size_t ffn_dim = 64;
  std::size_t view_dim = 10;
  nn::FusionMode mode = nn::FusionMode::Full;

  double lr = 0.005;
  double dropout = 0.0;
  double weight_decay = 1e-4;
  std::size_t epochs = 100;
  std::uint64_t seed = 7;
  std::size_t folds = 5;
  FeatureMode feature_mode = FeatureMode::TemporalDegree;
  TokenScaling token_scaling = TokenScaling::Log1p;

  // Restrict hidden_dim / lr / dropout to the published search grid.
  bool strict_grid = true;
  // Run the grid search as an outer loop around cross-validation.
  bool grid_search = false;
  // Held-out fraction for the plain train/eval split.
  double test_fraction = 0.2;

  WindowSpec window_spec() const { return WindowSpec::make(delta, sigma); }

  /// Throws InvalidConfig.
  void validate() const;
};

RunConfig parse_run_config(std::istream& in, const std::string& source_name);
RunConfig read_run_config(const std::string& path);

/// Applies one `key = value` assignment. Unknown keys throw InvalidConfig.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Canonical `key = value` rendering of every field.
std::string to_config_text(const RunConfig& config);

// The published hyperparameter grid.
inline constexpr std::size_t kHiddenGrid[] = {16, 32, 64, 128};
inline constexpr double kLrGrid[] = {0.01, 0.005, 0.001};
inline constexpr double kDropoutGrid[] = {0.0, 0.3, 0.5};

}  // namespace t3f
