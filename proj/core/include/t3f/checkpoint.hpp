#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "t3f/model.hpp"

namespace t3f::nn {

struct NamedArray {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
};

/// Versioned container of named parameter arrays plus the model configuration
/// and free-form string metadata (window parameters, feature grid, ...).
struct Checkpoint {
  static constexpr int kVersion = 1;

  ModelConfig config;
  std::map<std::string, std::string> metadata;
  std::vector<NamedArray> params;
};

Checkpoint make_checkpoint(const Model& model, std::map<std::string, std::string> metadata = {});

/// Rebuilds the model and copies every array in; names and shapes must match.
Model restore_model(const Checkpoint& checkpoint);

// JSON encoding. Doubles are written in shortest round-trip form, so a
// write/read cycle reproduces every parameter bit for bit.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(std::string_view json);

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace t3f::nn
