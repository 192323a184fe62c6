#include "meshwave/config.hpp"
#include "meshwave/container.hpp"
#include "meshwave/error.hpp"
#include "meshwave/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
  std::string config;
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> k;
  std::optional<double> alpha;
  std::optional<int> directions;
  std::optional<int> scales;
  bool perturb = false;
  std::optional<int> epochs;
  std::optional<std::string> radii;
  std::optional<std::string> checkpoint;
  std::optional<std::string> match_mode;
  std::optional<int> vertex;
  std::optional<int> direction;
  std::optional<int> scale;
};

// Config file first, then flags on top, then validation of the merged document.
meshwave::ExperimentConfig effective_config(const Flags& f, const std::string& path_key) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    try {
      j = nlohmann::json::parse(meshwave::read_file(f.config));
    } catch (const nlohmann::json::exception& e) {
      throw meshwave::Error(meshwave::ErrorCode::ConfigInvalid, f.config + ": " + e.what());
    }
    if (!j.is_object()) throw meshwave::Error(meshwave::ErrorCode::ConfigInvalid, f.config + ": not a JSON object");
  }
  if (!f.path.empty()) j[path_key] = f.path;
  if (f.seed) j["seed"] = *f.seed;
  if (f.out) j["out"] = *f.out;
  if (f.k) j["k"] = *f.k;
  if (f.alpha) j["alpha"] = *f.alpha;
  if (f.directions) j["directions"] = *f.directions;
  if (f.scales) j["scales"] = *f.scales;
  if (f.perturb) j["perturb"] = true;
  if (f.epochs) j["epochs"] = *f.epochs;
  if (f.radii) j["radii"] = *f.radii;
  if (f.checkpoint) j["checkpoint"] = *f.checkpoint;
  if (f.match_mode) j["match_mode"] = *f.match_mode;
  if (f.vertex) j["vertex"] = *f.vertex;
  if (f.direction) j["direction"] = *f.direction;
  if (f.scale) j["scale"] = *f.scale;
  return meshwave::parse_config(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic spectral wavelet toolkit for triangle meshes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "meshwave 0.1.0");
  Flags f;

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Global seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--k", f.k, "Eigenpairs per direction");
    sub->add_option("--alpha", f.alpha, "Anisotropy level");
    sub->add_option("--directions", f.directions, "Number of directions M");
    sub->add_option("--scales", f.scales, "Number of wavelet scales J");
    sub->add_flag("--perturb", f.perturb, "Enable the perturbation layer");
    sub->add_option("--epochs", f.epochs, "Training epochs");
    sub->add_option("--radii", f.radii, "CGE radii start:stop:step");
  };

  auto* mesh_info = app.add_subcommand("mesh-info", "Print mesh statistics");
  auto* frames = app.add_subcommand("frames", "Write principal curvature frames as CSV");
  auto* spectrum = app.add_subcommand("spectrum", "Compute or reuse the directional spectrum caches");
  auto* gen_data = app.add_subcommand("gen-data", "Generate a synthetic correspondence dataset");
  auto* train = app.add_subcommand("train", "Train on a dataset manifest");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the manifest pairs");
  auto* dump = app.add_subcommand("wavelet-dump", "Write one localized wavelet as CSV");

  for (auto* sub : {mesh_info, frames, spectrum, gen_data, train, eval, dump}) common(sub);
  for (auto* sub : {mesh_info, frames, dump}) sub->add_option("mesh", f.path, "Mesh file (.off/.obj)");
  spectrum->add_option("mesh", f.path, "Mesh file, or a dataset manifest.json");
  for (auto* sub : {train, eval}) sub->add_option("manifest", f.path, "Dataset manifest.json");
  eval->add_option("--checkpoint", f.checkpoint, "Checkpoint file (default <out>/checkpoint.ckpt)");
  eval->add_option("--match-mode", f.match_mode, "descriptor or softmax");
  dump->add_option("--vertex", f.vertex, "Centre vertex");
  dump->add_option("--direction", f.direction, "Direction index m");
  dump->add_option("--scale", f.scale, "Scale index j");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (mesh_info->parsed()) {
      meshwave::cmd_mesh_info(effective_config(f, "mesh"), std::cout);
    } else if (frames->parsed()) {
      meshwave::cmd_frames(effective_config(f, "mesh"), std::cout);
    } else if (spectrum->parsed()) {
      const bool manifest = f.path.size() >= 5 && f.path.substr(f.path.size() - 5) == ".json";
      meshwave::cmd_spectrum(effective_config(f, manifest ? "dataset" : "mesh"), std::cout);
    } else if (gen_data->parsed()) {
      meshwave::cmd_gen_data(effective_config(f, "dataset"), std::cout);
    } else if (train->parsed()) {
      meshwave::cmd_train(effective_config(f, "dataset"), std::cout);
    } else if (eval->parsed()) {
      meshwave::cmd_eval(effective_config(f, "dataset"), std::cout);
    } else if (dump->parsed()) {
      meshwave::cmd_wavelet_dump(effective_config(f, "mesh"), std::cout);
    }
  } catch (const meshwave::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return meshwave::exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
