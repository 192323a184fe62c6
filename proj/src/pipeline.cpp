#include "meshwave/pipeline.hpp"

#include "meshwave/container.hpp"
#include "meshwave/curvature.hpp"
#include "meshwave/error.hpp"
#include "meshwave/operators.hpp"
#include "meshwave/spectrum.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

namespace meshwave {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string num(double value) { return fmt("%.17g", value); }

std::int64_t hash_bits(std::uint64_t h) {
  std::int64_t out = 0;
  std::memcpy(&out, &h, sizeof out);
  return out;
}

std::uint64_t unhash_bits(std::int64_t v) {
  std::uint64_t out = 0;
  std::memcpy(&out, &v, sizeof out);
  return out;
}

fs::path cache_dir_for(const fs::path& mesh_path, const ExperimentConfig& config) {
  return config.cache_dir.empty() ? mesh_path.parent_path() : fs::path(config.cache_dir);
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
}

void echo_config(const ExperimentConfig& config) {
  ensure_dir(config.out);
  write_file_atomic(fs::path(config.out) / "config.json", to_json(config).dump(2) + "\n");
}

void require_mesh(const ExperimentConfig& config) {
  if (config.mesh.empty()) throw Error(ErrorCode::ConfigInvalid, "no mesh given (--config mesh or positional path)");
}

bool spectrum_matches(const Spectrum& s, const TriMesh& mesh, const ExperimentConfig& config, int m, int k) {
  return s.mesh_hash == mesh.hash() && s.config.alpha == config.alpha && s.config.direction_index == m &&
         s.config.direction_count == config.directions && s.k() == k && s.vertex_count() == mesh.vertex_count();
}

}  // namespace

// ---------------------------------------------------------------------------

fs::path spectrum_cache_path(const fs::path& mesh_path, const ExperimentConfig& config, int direction) {
  return cache_dir_for(mesh_path, config) /
         (mesh_path.stem().string() + "." + fmt("%g", config.alpha) + "." + std::to_string(direction) + ".spec");
}

fs::path filterbank_cache_path(const fs::path& mesh_path, const ExperimentConfig& config) {
  return cache_dir_for(mesh_path, config) /
         (mesh_path.stem().string() + "." + fmt("%g", config.alpha) + "." + std::to_string(config.directions) + "x" +
          std::to_string(config.scales) + (config.tighten ? "t" : "") + ".fbk");
}

PrincipalFrames pipeline_frames(const TriMesh& mesh, const ExperimentConfig& config) {
  return estimate_frames(mesh, {config.frame_radius * std::sqrt(mesh.total_area())});
}

void save_spectrum(const Spectrum& s, const fs::path& path, double frame_radius) {
  Container c(kSpectrumMagic);
  c.put_scalar("frame_radius", frame_radius);
  c.put("eigenvalues", s.eigenvalues);
  c.put("eigenvectors", s.eigenvectors);
  c.put("mass", s.mass);
  c.put_scalar("alpha", s.config.alpha);
  c.put_scalar("theta", s.config.theta);
  c.put_integer("direction_index", s.config.direction_index);
  c.put_integer("direction_count", s.config.direction_count);
  c.put_integer("mesh_hash", hash_bits(s.mesh_hash));
  write_container(c, path);
}

Spectrum load_spectrum(const fs::path& path, double* frame_radius) {
  const Container c = read_container(path, kSpectrumMagic);
  if (frame_radius) *frame_radius = c.scalar("frame_radius");
  Spectrum s;
  s.eigenvalues = c.vector("eigenvalues");
  s.eigenvectors = c.matrix("eigenvectors");
  s.mass = c.vector("mass");
  s.config.alpha = c.scalar("alpha");
  s.config.theta = c.scalar("theta");
  s.config.direction_index = static_cast<int>(c.integer("direction_index"));
  s.config.direction_count = static_cast<int>(c.integer("direction_count"));
  s.mesh_hash = unhash_bits(c.integer("mesh_hash"));
  if (s.eigenvectors.cols() != s.eigenvalues.size() || s.eigenvectors.rows() != s.mass.size()) {
    throw Error(ErrorCode::FormatError, path.string() + ": inconsistent spectrum shapes");
  }
  return s;
}

std::string to_string(CacheStatus status) {
  switch (status) {
    case CacheStatus::Cached: return "cached";
    case CacheStatus::Computed: return "computed";
    case CacheStatus::Regenerated: return "regenerated";
  }
  return "?";
}

int effective_k(const ExperimentConfig& config, Index vertex_count) {
  return static_cast<int>(std::min<Index>(config.k, vertex_count));
}

std::vector<Spectrum> ensure_spectra(const fs::path& mesh_path, const TriMesh& mesh, const ExperimentConfig& config,
                                     bool compute, std::ostream& log, std::vector<CacheStatus>* status) {
  const int k = effective_k(config, mesh.vertex_count());
  if (compute && k < config.k) {
    log << "warning: " << mesh_path.string() << ": k = " << config.k << " exceeds the vertex count; using " << k
        << "\n";
  }
  std::optional<PrincipalFrames> frames;
  std::vector<Spectrum> spectra;
  if (status) status->clear();
  for (int m = 0; m < config.directions; ++m) {
    const fs::path path = spectrum_cache_path(mesh_path, config, m);
    CacheStatus st = CacheStatus::Computed;
    if (fs::exists(path)) {
      try {
        double radius = 0.0;
        Spectrum s = load_spectrum(path, &radius);
        if (spectrum_matches(s, mesh, config, m, k) && radius == config.frame_radius) {
          spectra.push_back(std::move(s));
          if (status) status->push_back(CacheStatus::Cached);
          continue;
        }
        if (!compute) throw Error(ErrorCode::MissingCache, path.string() + " does not match the mesh or config");
        log << "warning: " << path.string() << ": stale cache; regenerating\n";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::FormatError) throw;
        if (!compute) throw Error(ErrorCode::MissingCache, path.string() + ": " + e.what());
        log << "warning: " << path.string() << ": " << e.what() << "; regenerating\n";
      }
      st = CacheStatus::Regenerated;
    } else if (!compute) {
      throw Error(ErrorCode::MissingCache, path.string() + " not found (run the spectrum command first)");
    }
    if (!frames) frames = pipeline_frames(mesh, config);
    const OperatorPair ops = assemble_albo(mesh, *frames, AnisoConfig::direction(config.alpha, m, config.directions));
    EigsOptions opts;
    opts.seed += static_cast<std::uint64_t>(m);
    Spectrum s = solve_eigs(ops, k, opts);
    ensure_dir(path.parent_path());
    save_spectrum(s, path, config.frame_radius);
    spectra.push_back(std::move(s));
    if (status) status->push_back(st);
  }
  return spectra;
}

FilterBank load_filterbank(const fs::path& mesh_path, const TriMesh& mesh, const ExperimentConfig& config,
                           std::ostream& log) {
  std::vector<Spectrum> spectra = ensure_spectra(mesh_path, mesh, config, false, log);
  KernelSpec kernel = KernelSpec::for_spectra(spectra, config.scales, config.tighten);
  const fs::path path = filterbank_cache_path(mesh_path, config);
  if (fs::exists(path)) {
    try {
      const Container c = read_container(path, kFilterBankMagic);
      const Eigen::VectorXd scales = c.vector("scales");
      bool ok = c.has("l1_mass_weighted") && unhash_bits(c.integer("mesh_hash")) == mesh.hash() &&
                c.integer("k") == spectra.front().k() &&
                c.scalar("cutoff") == kernel.cutoff && scales.size() == kernel.scale_count();
      for (Index j = 0; ok && j < scales.size(); ++j) ok = scales[j] == kernel.scales[static_cast<std::size_t>(j)];
      for (int m = 0; ok && m < config.directions; ++m) {
        ok = c.vector("m" + std::to_string(m) + ".eigenvalues") == spectra[static_cast<std::size_t>(m)].eigenvalues;
      }
      if (ok) {
        std::vector<DirectionFilters> filters(static_cast<std::size_t>(config.directions));
        for (int m = 0; m < config.directions; ++m) {
          const std::string p = "m" + std::to_string(m) + ".";
          DirectionFilters& f = filters[static_cast<std::size_t>(m)];
          f.scaling_response = c.vector(p + "scaling");
          f.frame_low = c.scalar(p + "frame_low");
          f.frame_high = c.scalar(p + "frame_high");
          for (int j = 0; j < config.scales; ++j) {
            f.responses.push_back(c.vector(p + "response." + std::to_string(j)));
            f.l1_norms.push_back(c.vector(p + "l1." + std::to_string(j)));
          }
        }
        return FilterBank(std::move(spectra), std::move(kernel), std::move(filters));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FormatError) throw;
      log << "warning: " << path.string() << ": " << e.what() << "; regenerating\n";
    }
  }
  FilterBank bank = build_filterbank(std::move(spectra), kernel);
  Container c(kFilterBankMagic);
  c.put_integer("mesh_hash", hash_bits(mesh.hash()));
  c.put_integer("k", bank.k());
  c.put("scales", kernel.scales);
  c.put_scalar("cutoff", kernel.cutoff);
  c.put_integer("tighten", kernel.tighten ? 1 : 0);
  c.put_integer("l1_mass_weighted", 1);
  for (int m = 0; m < config.directions; ++m) {
    const std::string p = "m" + std::to_string(m) + ".";
    const DirectionFilters& f = bank.filters(m);
    c.put(p + "eigenvalues", bank.spectrum(m).eigenvalues);
    c.put(p + "scaling", f.scaling_response);
    c.put_scalar(p + "frame_low", f.frame_low);
    c.put_scalar(p + "frame_high", f.frame_high);
    for (int j = 0; j < config.scales; ++j) {
      c.put(p + "response." + std::to_string(j), f.responses[static_cast<std::size_t>(j)]);
      c.put(p + "l1." + std::to_string(j), f.l1_norms[static_cast<std::size_t>(j)]);
    }
  }
  write_container(c, path);
  return bank;
}

void save_checkpoint(const Model& model, const ExperimentConfig& config, const fs::path& path) {
  Container c(kCheckpointMagic);
  const ModelShape& s = model.shape;
  c.put("shape", std::vector<int>{s.input_dim, s.hidden_dim, s.feature_dim, s.layer_count, s.directions, s.scales,
                                  s.classes, s.perturb ? 1 : 0, s.perturb_rows});
  model.for_each_parameter([&c](const std::string& name, const Matrix& m) { c.put("param." + name, m); });
  if (model.perturbation) c.put("perturb.permutation", model.perturbation->permutation);
  c.put_text("config", to_json(config).dump());
  ensure_dir(path.parent_path());
  write_container(c, path);
}

Model load_checkpoint(const fs::path& path, std::string* config_json) {
  const Container c = read_container(path, kCheckpointMagic);
  const std::vector<int> v = c.ints("shape");
  if (v.size() != 9) throw Error(ErrorCode::FormatError, path.string() + ": bad model shape entry");
  ModelShape s{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7] != 0, v[8]};
  Model model = init_model(s, 0);
  if (model.perturbation) model.perturbation->permutation = c.ints("perturb.permutation");
  model.for_each_parameter([&](const std::string& name, Matrix& m) {
    Matrix stored = c.matrix("param." + name);
    if (stored.rows() != m.rows() || stored.cols() != m.cols()) {
      throw Error(ErrorCode::FormatError, path.string() + ": parameter " + name + " has the wrong shape");
    }
    m = std::move(stored);
  });
  if (config_json) *config_json = c.text("config");
  return model;
}

// ---------------------------------------------------------------------------

Workspace::Workspace(Manifest manifest, ExperimentConfig config, std::ostream& log)
    : manifest_(std::move(manifest)), config_(std::move(config)), log_(log) {}

const LoadedMesh& Workspace::get(const std::string& name) {
  auto it = meshes_.find(name);
  if (it != meshes_.end()) return *it->second;
  const ManifestMesh& entry = manifest_.mesh(name);
  auto lm = std::make_unique<LoadedMesh>();
  lm->name = name;
  lm->file = manifest_.resolve(entry.mesh);
  lm->mesh = load_mesh(lm->file);
  if (!entry.labels.empty()) {
    lm->labels = read_index_file(manifest_.resolve(entry.labels));
    if (static_cast<Index>(lm->labels.size()) != lm->mesh.vertex_count()) {
      throw Error(ErrorCode::ManifestInvalid, entry.labels + ": " + std::to_string(lm->labels.size()) +
                                                  " labels for " + std::to_string(lm->mesh.vertex_count()) +
                                                  " vertices");
    }
  }
  lm->bank = load_filterbank(lm->file, lm->mesh, config_, log_);
  lm->coords = lm->mesh.vertices();
  return *meshes_.emplace(name, std::move(lm)).first->second;
}

GeodesicCache& Workspace::geodesics(const std::string& name) {
  auto it = geodesics_.find(name);
  if (it == geodesics_.end()) it = geodesics_.emplace(name, std::make_unique<GeodesicCache>(get(name).mesh)).first;
  return *it->second;
}

std::vector<const LoadedMesh*> Workspace::training() {
  std::vector<const LoadedMesh*> out;
  for (const std::string& name : manifest_.training) out.push_back(&get(name));
  return out;
}

ModelShape model_shape(const ExperimentConfig& config, int classes) {
  ModelShape s;
  s.hidden_dim = config.hidden_dim;
  s.feature_dim = config.feature_dim;
  s.layer_count = config.layers;
  s.directions = config.directions;
  s.scales = config.scales;
  s.classes = classes;
  s.perturb = config.perturb;
  s.perturb_rows = classes;
  return s;
}

TrainResult train_workspace(Workspace& ws, const std::function<bool(const EpochRecord&, const Model&)>& on_epoch) {
  const ExperimentConfig& config = ws.config();
  const auto classes = static_cast<int>(ws.get(ws.manifest().templ).mesh.vertex_count());
  std::vector<TrainSample> samples;
  for (const LoadedMesh* lm : ws.training()) samples.push_back({lm->coords, &lm->bank, lm->labels});
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "manifest lists no training meshes");
  TrainResult result;
  result.model = init_model(model_shape(config, classes), config.seed);
  TrainOptions opts;
  opts.epochs = config.effective_epochs();
  opts.adam.lr = config.lr;
  opts.adam.weight_decay = config.weight_decay;
  opts.seed = config.seed;
  opts.on_epoch = on_epoch;
  result.history = train(result.model, samples, opts);
  return result;
}

std::vector<int> match_pair(const Model& model, const LoadedMesh& source, const LoadedMesh& target, MatchMode mode) {
  if (mode == MatchMode::Descriptor) {
    return match_nn(model_descriptors(model, source.coords, source.bank),
                    model_descriptors(model, target.coords, target.bank));
  }
  if (source.labels.empty()) throw Error(ErrorCode::ManifestInvalid, "softmax matching needs source labels");
  Matrix logits = model_forward(model, target.coords, target.bank);
  logits.colwise() -= logits.rowwise().maxCoeff();
  Matrix prob = logits.array().exp();
  prob.array().colwise() /= prob.rowwise().sum().array();
  std::vector<int> map;
  for (int label : source.labels) {
    if (label < 0 || label >= prob.cols()) throw Error(ErrorCode::LabelOutOfRange, std::to_string(label));
    Index arg = 0;
    prob.col(label).maxCoeff(&arg);
    map.push_back(static_cast<int>(arg));
  }
  return map;
}

EvalResult evaluate_workspace(const Model& model, Workspace& ws, const std::vector<ManifestPair>& pairs) {
  const std::vector<double> radii = ws.config().radii.values();
  EvalResult out;
  std::vector<double> pooled(radii.size(), 0.0);
  double matches = 0.0;
  for (const ManifestPair& pair : pairs) {
    const LoadedMesh& source = ws.get(pair.source);
    const LoadedMesh& target = ws.get(pair.target);
    const std::vector<int> gt = read_index_file(ws.manifest().resolve(pair.ground_truth));
    if (static_cast<Index>(gt.size()) != source.mesh.vertex_count()) {
      throw Error(ErrorCode::ManifestInvalid, pair.ground_truth + ": ground truth length does not match the source");
    }
    const std::vector<int> map = match_pair(model, source, target, ws.config().match_mode);
    PairResult pr{pair, evaluate(map, gt, ws.geodesics(pair.target), target.mesh, radii)};
    const double n = static_cast<double>(gt.size());
    for (std::size_t r = 0; r < radii.size(); ++r) pooled[r] += n * pr.result.cge[r].fraction;
    matches += n;
    out.mean_age += pr.result.average_error;
    out.pairs.push_back(std::move(pr));
  }
  for (std::size_t r = 0; r < radii.size(); ++r) {
    out.pooled.push_back({radii[r], matches > 0 ? pooled[r] / matches : 0.0});
  }
  if (!pairs.empty()) out.mean_age /= static_cast<double>(pairs.size());
  return out;
}

EvalResult evaluate_workspace(const Model& model, Workspace& ws) {
  return evaluate_workspace(model, ws, ws.manifest().pairs);
}

// ---------------------------------------------------------------------------

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,loss,accuracy\n";
  for (const EpochRecord& r : history) out += std::to_string(r.epoch) + "," + num(r.loss) + "," + num(r.accuracy) + "\n";
  return out;
}

std::string cge_csv(const std::vector<CgePoint>& curve) {
  std::string out = "r,fraction\n";
  for (const CgePoint& p : curve) out += num(p.radius) + "," + num(p.fraction) + "\n";
  return out;
}

std::string pairs_csv(const std::vector<PairResult>& pairs) {
  std::string out = "source_mesh,target_mesh,age_x100\n";
  for (const PairResult& p : pairs) out += p.pair.source + "," + p.pair.target + "," + num(p.result.average_error) + "\n";
  return out;
}

void cmd_mesh_info(const ExperimentConfig& config, std::ostream& log) {
  require_mesh(config);
  const TriMesh mesh = load_mesh(config.mesh);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(mesh.hash()));
  log << "vertices: " << mesh.vertex_count() << "\n"
      << "faces: " << mesh.face_count() << "\n"
      << "edges: " << mesh.edge_count() << "\n"
      << "boundary_edges: " << mesh.boundary_edge_count() << "\n"
      << "closed: " << (mesh.is_closed() ? "yes" : "no") << "\n"
      << "area: " << num(mesh.total_area()) << "\n"
      << "bbox_diagonal: " << num(mesh.bbox_diagonal()) << "\n"
      << "hash: " << hash << "\n";
}

void cmd_frames(const ExperimentConfig& config, std::ostream& log) {
  require_mesh(config);
  const TriMesh mesh = load_mesh(config.mesh);
  const PrincipalFrames frames = pipeline_frames(mesh, config);
  std::string csv = "vertex,k_min,k_max,dir_x,dir_y,dir_z,umbilic\n";
  for (Index v = 0; v < frames.size(); ++v) {
    csv += std::to_string(v) + "," + num(frames.k_min[v]) + "," + num(frames.k_max[v]) + "," +
           num(frames.dir_max(v, 0)) + "," + num(frames.dir_max(v, 1)) + "," + num(frames.dir_max(v, 2)) + "," +
           (frames.umbilic[static_cast<std::size_t>(v)] ? "1" : "0") + "\n";
  }
  echo_config(config);
  const fs::path path = fs::path(config.out) / "frames.csv";
  write_file_atomic(path, csv);
  log << path.string() << "\n";
}

void cmd_spectrum(const ExperimentConfig& config, std::ostream& log) {
  std::vector<fs::path> files;
  if (!config.dataset.empty()) {
    const Manifest m = read_manifest(config.dataset);
    for (const ManifestMesh& e : m.meshes) files.push_back(m.resolve(e.mesh));
  } else {
    require_mesh(config);
    files.emplace_back(config.mesh);
  }
  echo_config(config);
  for (const fs::path& file : files) {
    const TriMesh mesh = load_mesh(file);
    std::vector<CacheStatus> status;
    ensure_spectra(file, mesh, config, true, log, &status);
    for (int m = 0; m < config.directions; ++m) {
      log << spectrum_cache_path(file, config, m).string() << ": " << to_string(status[static_cast<std::size_t>(m)])
          << "\n";
    }
  }
}

Manifest cmd_gen_data(const ExperimentConfig& config, std::ostream& log) {
  const Dataset ds = make_dataset(config.generate);
  Manifest m = write_dataset(ds, config.out);
  echo_config(config);
  log << "template: " << ds.templ.mesh.vertex_count() << " vertices\n"
      << "training meshes: " << ds.training.size() << "\n";
  for (const ShapePair& p : ds.pairs) {
    log << "pair " << p.source << " -> " << p.target;
    if (p.isometry_distortion >= 0.0) log << " (isometry distortion " << fmt("%.4f", p.isometry_distortion) << ")";
    log << "\n";
  }
  log << (fs::path(config.out) / "manifest.json").string() << "\n";
  return m;
}

TrainResult cmd_train(const ExperimentConfig& config, std::ostream& log) {
  if (config.dataset.empty()) throw Error(ErrorCode::ConfigInvalid, "no dataset manifest given");
  Workspace ws(read_manifest(config.dataset), config, log);
  TrainResult result = train_workspace(ws, [&log](const EpochRecord& r, const Model&) {
    log << "epoch " << r.epoch << " loss " << fmt("%.6f", r.loss) << " accuracy " << fmt("%.4f", r.accuracy) << "\n";
    return true;
  });
  echo_config(config);
  const fs::path out(config.out);
  write_file_atomic(out / "history.csv", history_csv(result.history));
  save_checkpoint(result.model, config, out / "checkpoint.ckpt");
  log << (out / "checkpoint.ckpt").string() << "\n";
  return result;
}

EvalResult cmd_eval(const ExperimentConfig& config, std::ostream& log) {
  if (config.dataset.empty()) throw Error(ErrorCode::ConfigInvalid, "no dataset manifest given");
  const fs::path ckpt = config.checkpoint.empty() ? fs::path(config.out) / "checkpoint.ckpt" : fs::path(config.checkpoint);
  std::string trained_json;
  const Model model = load_checkpoint(ckpt, &trained_json);
  // The filters are part of the model: take the spectral settings it was trained with.
  ExperimentConfig effective = config;
  const ExperimentConfig trained = parse_config(nlohmann::json::parse(trained_json));
  effective.k = trained.k;
  effective.alpha = trained.alpha;
  effective.directions = trained.directions;
  effective.scales = trained.scales;
  effective.tighten = trained.tighten;

  Workspace ws(read_manifest(config.dataset), effective, log);
  EvalResult result = evaluate_workspace(model, ws);
  echo_config(effective);
  const fs::path out(config.out);
  for (std::size_t i = 0; i < result.pairs.size(); ++i) {
    const PairResult& p = result.pairs[i];
    write_file_atomic(out / ("cge_pair_" + std::to_string(i) + ".csv"), cge_csv(p.result.cge));
    log << p.pair.source << " -> " << p.pair.target << ": AGEx100 " << fmt("%.4f", p.result.average_error) << "\n";
  }
  write_file_atomic(out / "pairs.csv", pairs_csv(result.pairs));
  write_file_atomic(out / "cge.csv", cge_csv(result.pooled));
  log << "mean AGEx100 " << fmt("%.4f", result.mean_age) << "\n";
  return result;
}

void cmd_wavelet_dump(const ExperimentConfig& config, std::ostream& log) {
  require_mesh(config);
  const TriMesh mesh = load_mesh(config.mesh);
  const FilterBank bank = load_filterbank(config.mesh, mesh, config, log);
  const Eigen::VectorXd psi = wavelet_at(bank, config.direction, config.scale, config.vertex);
  std::string csv = "vertex,value\n";
  for (Index v = 0; v < psi.size(); ++v) csv += std::to_string(v) + "," + num(psi[v]) + "\n";
  echo_config(config);
  const fs::path path = fs::path(config.out) / ("wavelet_m" + std::to_string(config.direction) + "_j" +
                                                std::to_string(config.scale) + "_v" + std::to_string(config.vertex) +
                                                ".csv");
  write_file_atomic(path, csv);
  log << path.string() << "\n"
      << "mass-weighted sum " << fmt("%.3e", bank.mass().dot(psi)) << "\n";
}

}  // namespace meshwave
