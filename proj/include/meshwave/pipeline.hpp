#pragma once

#include "meshwave/config.hpp"
#include "meshwave/corresp.hpp"
#include "meshwave/network.hpp"
#include "meshwave/synth.hpp"
#include "meshwave/wavelets.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace meshwave {

// ---------------------------------------------------------------------------
// Caches

// <cache dir>/<mesh stem>.<alpha>.<m>.spec
std::filesystem::path spectrum_cache_path(const std::filesystem::path& mesh_path, const ExperimentConfig& config,
                                          int direction);
// <cache dir>/<mesh stem>.<alpha>.<M>x<J>[t].fbk
std::filesystem::path filterbank_cache_path(const std::filesystem::path& mesh_path, const ExperimentConfig& config);

// Frames used by the pipeline: averaging radius config.frame_radius * sqrt(area).
PrincipalFrames pipeline_frames(const TriMesh& mesh, const ExperimentConfig& config);

void save_spectrum(const Spectrum& spectrum, const std::filesystem::path& path, double frame_radius = 0.0);
Spectrum load_spectrum(const std::filesystem::path& path, double* frame_radius = nullptr);

enum class CacheStatus { Cached, Computed, Regenerated };
std::string to_string(CacheStatus status);

// K actually used on a mesh: min(config.k, N).
int effective_k(const ExperimentConfig& config, Index vertex_count);

// Loads every direction's spectrum from its cache, computing (and writing)
// missing, stale or corrupt entries when `compute` is set; otherwise a missing
// or unusable cache raises MissingCache.
std::vector<Spectrum> ensure_spectra(const std::filesystem::path& mesh_path, const TriMesh& mesh,
                                     const ExperimentConfig& config, bool compute, std::ostream& log,
                                     std::vector<CacheStatus>* status = nullptr);

// Spectra must be cached; the filter bank cache is created on demand.
FilterBank load_filterbank(const std::filesystem::path& mesh_path, const TriMesh& mesh,
                           const ExperimentConfig& config, std::ostream& log);

void save_checkpoint(const Model& model, const ExperimentConfig& config, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path, std::string* config_json = nullptr);

// ---------------------------------------------------------------------------
// Dataset workspace

struct LoadedMesh {
  std::string name;
  std::filesystem::path file;
  TriMesh mesh;
  std::vector<int> labels;
  FilterBank bank;
  Matrix coords;
};

// Lazily loads manifest meshes with their filter banks, plus geodesic caches
// for evaluation targets.
class Workspace {
 public:
  Workspace(Manifest manifest, ExperimentConfig config, std::ostream& log);

  const Manifest& manifest() const noexcept { return manifest_; }
  const ExperimentConfig& config() const noexcept { return config_; }
  const LoadedMesh& get(const std::string& name);
  GeodesicCache& geodesics(const std::string& name);
  std::vector<const LoadedMesh*> training();

 private:
  Manifest manifest_;
  ExperimentConfig config_;
  std::ostream& log_;
  std::map<std::string, std::unique_ptr<LoadedMesh>> meshes_;
  std::map<std::string, std::unique_ptr<GeodesicCache>> geodesics_;
};

ModelShape model_shape(const ExperimentConfig& config, int classes);

struct TrainResult {
  Model model;
  std::vector<EpochRecord> history;
};

// Trains on the workspace's training meshes; `on_epoch` may stop early.
TrainResult train_workspace(Workspace& ws, const std::function<bool(const EpochRecord&, const Model&)>& on_epoch = {});

struct PairResult {
  ManifestPair pair;
  CorrespondenceResult result;
};

struct EvalResult {
  std::vector<PairResult> pairs;
  std::vector<CgePoint> pooled;  // match-count-weighted mean of the per-pair curves
  double mean_age = 0.0;         // mean over pairs of AGE x 100
};

std::vector<int> match_pair(const Model& model, const LoadedMesh& source, const LoadedMesh& target, MatchMode mode);
EvalResult evaluate_workspace(const Model& model, Workspace& ws, const std::vector<ManifestPair>& pairs);
EvalResult evaluate_workspace(const Model& model, Workspace& ws);

// ---------------------------------------------------------------------------
// Commands. Each writes its outputs (and the effective config) under
// config.out and reports progress on `log`.

void cmd_mesh_info(const ExperimentConfig& config, std::ostream& log);
void cmd_frames(const ExperimentConfig& config, std::ostream& log);
void cmd_spectrum(const ExperimentConfig& config, std::ostream& log);
Manifest cmd_gen_data(const ExperimentConfig& config, std::ostream& log);
TrainResult cmd_train(const ExperimentConfig& config, std::ostream& log);
EvalResult cmd_eval(const ExperimentConfig& config, std::ostream& log);
void cmd_wavelet_dump(const ExperimentConfig& config, std::ostream& log);

// CSV writers (shared with tests).
std::string history_csv(const std::vector<EpochRecord>& history);
std::string cge_csv(const std::vector<CgePoint>& curve);
std::string pairs_csv(const std::vector<PairResult>& pairs);

}  // namespace meshwave
