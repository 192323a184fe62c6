#pragma once

#include "meshwave/synth.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace meshwave {

struct RadiiSpec {
  double start = 0.0;
  double stop = 0.25;
  double step = 0.0025;

  std::vector<double> values() const;
  std::string to_string() const;
};

// "start:stop:step"
RadiiSpec parse_radii(const std::string& text);

enum class MatchMode { Descriptor, Softmax };

struct ExperimentConfig {
  std::string mesh;        // single-mesh commands
  std::string dataset;     // manifest.json for train / eval / spectrum
  std::string checkpoint;  // eval input; defaults to <out>/checkpoint.ckpt
  std::string cache_dir;   // spectrum caches; defaults to the mesh directory
  std::string out = "out";

  int k = 200;
  double alpha = 50.0;
  double frame_radius = 0.12;  // curvature averaging radius / sqrt(area); 0 = face 1-ring
  int directions = 4;
  int scales = 4;
  bool tighten = false;

  int hidden_dim = 64;
  int feature_dim = 128;
  int layers = 4;
  bool perturb = false;
  std::optional<int> epochs;  // 200 vanilla, 50 perturbed
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;

  MatchMode match_mode = MatchMode::Descriptor;
  RadiiSpec radii;

  // wavelet-dump
  int vertex = 0;
  int direction = 0;
  int scale = 0;

  DatasetConfig generate = default_dataset_config();

  int effective_epochs() const { return epochs.value_or(perturb ? 50 : 200); }

  static DatasetConfig default_dataset_config();
};

// Unknown keys and out-of-range values raise ConfigInvalid.
ExperimentConfig parse_config(const nlohmann::json& json);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

DatasetConfig parse_dataset_config(const nlohmann::json& json);
nlohmann::json to_json(const DatasetConfig& config);

}  // namespace meshwave
