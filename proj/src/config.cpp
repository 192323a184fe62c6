#include "meshwave/config.hpp"

#include "meshwave/container.hpp"
#include "meshwave/corresp.hpp"
#include "meshwave/error.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace meshwave {

namespace {

using Json = nlohmann::json;

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::ConfigInvalid, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const Json& j, const char* key, T& value) {
  if (!j.contains(key)) return;
  try {
    value = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::ConfigInvalid, std::string("key '") + key + "' has the wrong type");
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::ConfigInvalid, message);
}

}  // namespace

std::vector<double> RadiiSpec::values() const { return radii_range(start, stop, step); }

std::string RadiiSpec::to_string() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g:%.17g:%.17g", start, stop, step);
  return buf;
}

RadiiSpec parse_radii(const std::string& text) {
  RadiiSpec r;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.start, &r.stop, &r.step, &tail) != 3) {
    throw Error(ErrorCode::ConfigInvalid, "radii '" + text + "' is not start:stop:step");
  }
  r.values();
  return r;
}

DatasetConfig ExperimentConfig::default_dataset_config() {
  DatasetConfig d;
  d.base = {BaseKind::Bar, 6, false};
  d.deformations = {{DeformMode::Bend, 0.6}, {DeformMode::Bend, -0.6}, {DeformMode::Twist, 0.3},
                    {DeformMode::Twist, -0.3}, {DeformMode::Bend, 0.3}};
  d.test_count = 1;
  d.split_seed = 3;
  d.include_remeshed = true;
  return d;
}

DatasetConfig parse_dataset_config(const Json& j) {
  reject_unknown(j, {"base", "deformations", "test_count", "split_seed", "include_remeshed"}, "generate");
  DatasetConfig d = ExperimentConfig::default_dataset_config();
  if (j.contains("base")) {
    const Json& b = j.at("base");
    reject_unknown(b, {"kind", "resolution", "caps"}, "generate.base");
    std::string kind = to_string(d.base.kind);
    read(b, "kind", kind);
    d.base.kind = parse_base_kind(kind);
    read(b, "resolution", d.base.resolution);
    read(b, "caps", d.base.caps);
  }
  if (j.contains("deformations")) {
    require(j.at("deformations").is_array(), "generate.deformations must be an array");
    d.deformations.clear();
    for (const Json& e : j.at("deformations")) {
      reject_unknown(e, {"mode", "magnitude"}, "generate.deformations[]");
      std::string mode = "bend";
      Deformation def;
      read(e, "mode", mode);
      def.mode = parse_deform_mode(mode);
      read(e, "magnitude", def.magnitude);
      d.deformations.push_back(def);
    }
  }
  read(j, "test_count", d.test_count);
  read(j, "split_seed", d.split_seed);
  read(j, "include_remeshed", d.include_remeshed);
  return d;
}

Json to_json(const DatasetConfig& d) {
  Json defs = Json::array();
  for (const Deformation& def : d.deformations) defs.push_back({{"mode", to_string(def.mode)}, {"magnitude", def.magnitude}});
  return {{"base", {{"kind", to_string(d.base.kind)}, {"resolution", d.base.resolution}, {"caps", d.base.caps}}},
          {"deformations", defs},
          {"test_count", d.test_count},
          {"split_seed", d.split_seed},
          {"include_remeshed", d.include_remeshed}};
}

ExperimentConfig parse_config(const Json& j) {
  reject_unknown(j,
                 {"mesh", "dataset", "checkpoint", "cache_dir", "out", "k", "alpha", "frame_radius", "directions", "scales", "tighten",
                  "hidden_dim", "feature_dim", "layers", "perturb", "epochs", "lr", "weight_decay", "seed",
                  "match_mode", "radii", "vertex", "direction", "scale", "generate"},
                 "config");
  ExperimentConfig c;
  read(j, "mesh", c.mesh);
  read(j, "dataset", c.dataset);
  read(j, "checkpoint", c.checkpoint);
  read(j, "cache_dir", c.cache_dir);
  read(j, "out", c.out);
  read(j, "k", c.k);
  read(j, "alpha", c.alpha);
  read(j, "frame_radius", c.frame_radius);
  read(j, "directions", c.directions);
  read(j, "scales", c.scales);
  read(j, "tighten", c.tighten);
  read(j, "hidden_dim", c.hidden_dim);
  read(j, "feature_dim", c.feature_dim);
  read(j, "layers", c.layers);
  read(j, "perturb", c.perturb);
  if (j.contains("epochs") && !j.at("epochs").is_null()) {
    int e = 0;
    read(j, "epochs", e);
    c.epochs = e;
  }
  read(j, "lr", c.lr);
  read(j, "weight_decay", c.weight_decay);
  read(j, "seed", c.seed);
  std::string mode = "descriptor";
  read(j, "match_mode", mode);
  require(mode == "descriptor" || mode == "softmax", "match_mode must be 'descriptor' or 'softmax'");
  c.match_mode = mode == "softmax" ? MatchMode::Softmax : MatchMode::Descriptor;
  if (j.contains("radii")) {
    std::string radii;
    read(j, "radii", radii);
    c.radii = parse_radii(radii);
  }
  read(j, "vertex", c.vertex);
  read(j, "direction", c.direction);
  read(j, "scale", c.scale);
  if (j.contains("generate")) c.generate = parse_dataset_config(j.at("generate"));

  require(c.k >= 1, "k must be >= 1");
  require(std::isfinite(c.alpha) && c.alpha >= 0.0, "alpha must be finite and >= 0");
  require(std::isfinite(c.frame_radius) && c.frame_radius >= 0.0, "frame_radius must be >= 0");
  require(c.directions >= 1 && c.directions <= 64, "directions must be in [1, 64]");
  require(c.scales >= 1 && c.scales <= 64, "scales must be in [1, 64]");
  require(c.hidden_dim >= 1 && c.feature_dim >= 1, "layer widths must be >= 1");
  require(c.layers >= 1 && c.layers <= 64, "layers must be in [1, 64]");
  require(!c.epochs || *c.epochs >= 1, "epochs must be >= 1");
  require(std::isfinite(c.lr) && c.lr > 0.0, "lr must be > 0");
  require(std::isfinite(c.weight_decay) && c.weight_decay >= 0.0, "weight_decay must be >= 0");
  require(c.vertex >= 0 && c.direction >= 0 && c.scale >= 0, "vertex, direction and scale must be >= 0");
  require(!c.out.empty(), "out must be non-empty");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, path + ": " + e.what());
  }
  return parse_config(j);
}

Json to_json(const ExperimentConfig& c) {
  Json j{{"mesh", c.mesh},
         {"dataset", c.dataset},
         {"checkpoint", c.checkpoint},
         {"cache_dir", c.cache_dir},
         {"out", c.out},
         {"k", c.k},
         {"alpha", c.alpha},
         {"frame_radius", c.frame_radius},
         {"directions", c.directions},
         {"scales", c.scales},
         {"tighten", c.tighten},
         {"hidden_dim", c.hidden_dim},
         {"feature_dim", c.feature_dim},
         {"layers", c.layers},
         {"perturb", c.perturb},
         {"epochs", c.effective_epochs()},
         {"lr", c.lr},
         {"weight_decay", c.weight_decay},
         {"seed", c.seed},
         {"match_mode", c.match_mode == MatchMode::Softmax ? "softmax" : "descriptor"},
         {"radii", c.radii.to_string()},
         {"vertex", c.vertex},
         {"direction", c.direction},
         {"scale", c.scale},
         {"generate", to_json(c.generate)}};
  return j;
}

}  // namespace meshwave
