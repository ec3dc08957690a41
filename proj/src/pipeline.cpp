#include "jump/pipeline.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "jump/biomarkers.hpp"
#include "jump/infer.hpp"
#include "jump/nifti.hpp"
#include "jump/pairwise.hpp"
#include "jump/resample.hpp"

namespace jump {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void run_indexed(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(jobs, count);
  pool.reserve(std::size_t(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    q += c;
    if (c == '"') q += '"';
  }
  q += '"';
  return q;
}

json matrix_to_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Eigen::Matrix4d matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw FormatError("expected a 4x4 matrix");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    if (!j[std::size_t(r)].is_array() || j[std::size_t(r)].size() != 4)
      throw FormatError("expected a 4x4 matrix");
    for (int c = 0; c < 4; ++c) m(r, c) = j[std::size_t(r)][std::size_t(c)].get<double>();
  }
  return m;
}

json log_to_json(const TangentVector& v) {
  json a = json::array();
  for (int j = 0; j < 6; ++j) a.push_back(v[j]);
  return a;
}

TangentVector log_from_json(const json& j) {
  if (!j.is_array() || j.size() != 6) throw FormatError("expected a 6-vector");
  TangentVector v;
  for (int i = 0; i < 6; ++i) v[i] = j[std::size_t(i)].get<double>();
  return v;
}

FramesMode frames_mode_from(const std::string& s) {
  if (s == "none") return FramesMode::none;
  if (s == "midpoint") return FramesMode::midpoint;
  if (s == "average") return FramesMode::average;
  throw ManifestError("unknown frames mode '" + s + "' (none|midpoint|average)");
}

const char* frames_mode_name(FramesMode m) {
  switch (m) {
    case FramesMode::midpoint: return "midpoint";
    case FramesMode::average: return "average";
    default: return "none";
  }
}

Volume apply_frames_mode(Volume v, FramesMode mode) {
  switch (mode) {
    case FramesMode::midpoint: return midpoint_frame(v);
    case FramesMode::average: return average_frames(v);
    default: return v;
  }
}

}  // namespace

SessionManifest load_manifest(const std::string& path) {
  const json j = load_json(path);
  const fs::path dir = fs::path(path).parent_path();

  SessionManifest m;
  if (!j.contains("session_id") || !j["session_id"].is_string())
    throw ManifestError(path + ": missing session_id");
  m.session_id = j["session_id"].get<std::string>();
  if (!j.contains("modalities") || !j["modalities"].is_array())
    throw ManifestError(path + ": missing modalities array");

  int n_anchor = 0;
  std::map<std::string, int> ids;
  for (const auto& e : j["modalities"]) {
    ManifestEntry entry;
    if (!e.contains("id") || !e.contains("image") || !e.contains("labels"))
      throw ManifestError(path + ": modality entries need id, image and labels");
    entry.id = e["id"].get<std::string>();
    entry.image_path = (dir / e["image"].get<std::string>()).string();
    entry.labels_path = (dir / e["labels"].get<std::string>()).string();
    const std::string role = e.value("role", std::string("other"));
    if (role != "anchor" && role != "other")
      throw ManifestError(path + ": role must be anchor or other");
    entry.anchor = role == "anchor";
    n_anchor += entry.anchor ? 1 : 0;
    entry.frames = frames_mode_from(e.value("frames", std::string("none")));
    if (++ids[entry.id] > 1) throw ManifestError(path + ": duplicate modality id " + entry.id);
    m.entries.push_back(std::move(entry));
  }
  if (m.entries.size() < 2) throw ManifestError(path + ": need at least 2 modalities");
  if (n_anchor != 1)
    throw MissingAnchor(path + ": exactly one modality must have role=anchor, found " +
                        std::to_string(n_anchor));
  return m;
}

int resolve_jobs(int flag_jobs) {
  if (const char* env = std::getenv("JUMP_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return int(v);
  }
  return std::max(1, flag_jobs);
}

namespace {

std::vector<std::pair<int, int>> parse_pairs(const std::string& spec,
                                             const std::vector<std::string>& ids) {
  if (spec == "all") return all_pairs(int(ids.size()));
  auto index_of = [&](const std::string& id) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return int(i);
    throw InvalidArgument("--pairs references unknown modality '" + id + "'");
  };
  std::vector<std::pair<int, int>> pairs;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw InvalidArgument("--pairs items must look like ref:tgt, got '" + item + "'");
    pairs.emplace_back(index_of(item.substr(0, colon)), index_of(item.substr(colon + 1)));
    pos = comma + 1;
  }
  if (pairs.empty()) throw InvalidArgument("--pairs list is empty");
  return pairs;
}

void register_one_session(const std::string& manifest_path, const RegisterOptions& opts) {
  const SessionManifest manifest = load_manifest(manifest_path);
  const int n = int(manifest.entries.size());

  std::vector<std::string> ids;
  for (const auto& e : manifest.entries) ids.push_back(e.id);

  std::vector<LabelVolume> parcellations(static_cast<std::size_t>(n));
  std::vector<CentroidSet> centroids(static_cast<std::size_t>(n));
  run_indexed(n, opts.jobs, [&](int i) {
    parcellations[std::size_t(i)] = read_labels(manifest.entries[std::size_t(i)].labels_path);
    centroids[std::size_t(i)] = label_centroids(parcellations[std::size_t(i)]);
  });

  const auto pairs = parse_pairs(opts.pairs, ids);
  ObservationSet obs = build_observation_set(n, pairs);
  obs.modality_names = ids;
  check_connectivity(obs);

  run_indexed(int(pairs.size()), opts.jobs, [&](int k) {
    const auto [r, t] = pairs[std::size_t(k)];
    const std::string ctx = "pair " + ids[std::size_t(r)] + ":" + ids[std::size_t(t)] + ": ";
    try {
      obs.observations[std::size_t(k)].logR =
          log_map(weighted_procrustes(centroids[std::size_t(r)], centroids[std::size_t(t)]));
    } catch (const NumericalError& e) {
      throw NumericalError(e.category(), ctx + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(e.category(), ctx + e.what());
    }
  });

  InferenceConfig cfg;
  cfg.b_ratio = opts.b_ratio;
  cfg.hard_center = opts.hard_center;
  const LatentSolution sol = infer_latents(obs, cfg);

  int anchor = -1;
  for (int i = 0; i < n; ++i)
    if (manifest.entries[std::size_t(i)].anchor) anchor = i;
  const Volume anchor_image = read_volume(manifest.entries[std::size_t(anchor)].image_path);
  const TemplateSpace tpl =
      define_template(anchor_image, sol.latents[std::size_t(anchor)], ids[std::size_t(anchor)]);

  const fs::path out = fs::path(opts.out_dir);
  fs::create_directories(out);

  for (int i = 0; i < n; ++i) {
    json t;
    t["modality"] = ids[std::size_t(i)];
    t["convention"] = "template_to_image";
    t["log"] = log_to_json(sol.latents[std::size_t(i)]);
    t["matrix"] = matrix_to_json(exp_map(sol.latents[std::size_t(i)]).matrix());
    write_text((out / ("transform_" + ids[std::size_t(i)] + ".json")).string(), t.dump(2) + "\n");
  }

  json rep;
  rep["session_id"] = manifest.session_id;
  rep["center"] = opts.hard_center ? "hard" : "soft";
  rep["b_ratio"] = opts.b_ratio;
  rep["objective"] = sol.objective;
  rep["iterations"] = sol.iterations;
  rep["converged"] = sol.converged;
  rep["modalities"] = ids;
  rep["anchor"] = ids[std::size_t(anchor)];
  rep["template"] = {{"source_modality", tpl.source_modality},
                     {"grid_dims", tpl.grid_dims},
                     {"world_affine", matrix_to_json(tpl.world_affine)}};
  json edges = json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    edges.push_back({{"ref", ids[std::size_t(pairs[k].first)]},
                     {"tgt", ids[std::size_t(pairs[k].second)]},
                     {"observed_log", log_to_json(obs.observations[k].logR)},
                     {"residual", log_to_json(sol.residuals[k])}});
  }
  rep["edges"] = edges;
  write_text((out / "solution.json").string(), rep.dump(2) + "\n");
}

}  // namespace

int run_register(const RegisterOptions& opts) {
  if (opts.manifests.empty()) throw InvalidArgument("register needs at least one --manifest");
  if (opts.out_dir.empty()) throw InvalidArgument("register needs --out");
  const bool batch = opts.manifests.size() > 1;
  const int jobs = resolve_jobs(opts.jobs);

  int worst = 0;
  std::mutex log_mutex;
  auto one = [&](int i) {
    const std::string& path = opts.manifests[std::size_t(i)];
    RegisterOptions local = opts;
    // sessions already run concurrently in batch mode; keep inner steps serial
    local.jobs = batch ? 1 : jobs;
    std::string session_dir = opts.out_dir;
    if (batch) {
      std::string stem = fs::path(path).stem().string();
      session_dir = (fs::path(opts.out_dir) / stem).string();
    }
    local.out_dir = session_dir;
    try {
      register_one_session(path, local);
    } catch (const std::exception& e) {
      const int code = exit_code_for(e);
      std::lock_guard<std::mutex> lock(log_mutex);
      worst = std::max(worst, code);
      const auto* err = dynamic_cast<const Error*>(&e);
      std::cerr << "jump: error: " << (err ? err->category() : "internal") << ": " << path << ": "
                << e.what() << "\n";
    }
  };

  if (batch) {
    run_indexed(int(opts.manifests.size()), jobs, one);
  } else {
    one(0);
  }
  return worst;
}

void run_resample(const ResampleOptions& opts) {
  if (opts.method != "trilinear" && opts.method != "nearest")
    throw InvalidArgument("--method must be trilinear or nearest");
  const SessionManifest manifest = load_manifest(opts.manifest);
  const fs::path soldir(opts.solution_dir);
  if (!fs::exists(soldir / "solution.json"))
    throw IoError("missing solution file " + (soldir / "solution.json").string());
  const json rep = load_json((soldir / "solution.json").string());

  TemplateSpace tpl;
  tpl.source_modality = rep.at("template").at("source_modality").get<std::string>();
  tpl.world_affine = matrix_from_json(rep.at("template").at("world_affine"));
  const auto dims = rep.at("template").at("grid_dims");
  for (int a = 0; a < 3; ++a) tpl.grid_dims[std::size_t(a)] = dims.at(std::size_t(a)).get<int>();

  const fs::path out(opts.out_dir);
  fs::create_directories(out);
  const Interp method = opts.method == "nearest" ? Interp::nearest : Interp::trilinear;
  const int jobs = resolve_jobs(opts.jobs);

  run_indexed(int(manifest.entries.size()), jobs, [&](int i) {
    const ManifestEntry& entry = manifest.entries[std::size_t(i)];
    const fs::path tpath = soldir / ("transform_" + entry.id + ".json");
    if (!fs::exists(tpath)) throw IoError("missing transform file " + tpath.string());
    const TangentVector latent = log_from_json(load_json(tpath.string()).at("log"));

    Volume image = apply_frames_mode(read_volume(entry.image_path), entry.frames);
    write_nifti(resample_to_template(image, latent, tpl, method, 0.0f),
                (out / (entry.id + "_template.nii.gz")).string());

    const LabelVolume labels = read_labels(entry.labels_path);
    write_nifti(resample_to_template(labels, latent, tpl),
                (out / (entry.id + "_dseg_template.nii.gz")).string());
  });
}

std::vector<RegionSpec> load_regions(const std::string& path) {
  const json j = load_json(path);
  if (!j.contains("regions") || !j["regions"].is_array())
    throw FormatError(path + ": expected a top-level regions array");
  std::vector<RegionSpec> regions;
  for (const auto& r : j["regions"]) {
    RegionSpec spec;
    spec.name = r.value("name", std::string());
    if (r.contains("labels"))
      for (const auto& l : r["labels"]) spec.labels.insert(l.get<std::int32_t>());
    spec.reference = r.value("reference", false);
    regions.push_back(std::move(spec));
  }
  validate(regions);
  return regions;
}

void run_suvr(const SuvrOptions& opts) {
  const Volume pet_raw = read_volume(opts.pet_path);
  const Volume pet = pet_raw.frames > 1 ? average_frames(pet_raw) : pet_raw;
  const LabelVolume seg = read_labels(opts.seg_path);
  const std::vector<RegionSpec> regions = load_regions(opts.regions_path);

  std::string session = opts.session;
  if (session.empty()) {
    fs::path p(opts.pet_path);
    session = p.stem().string();
    if (session.size() > 4 && session.compare(session.size() - 4, 4, ".nii") == 0)
      session = session.substr(0, session.size() - 4);
  }

  const auto rows = suvr(pet, seg, regions, session);
  std::string csv = "session,region,suvr\r\n";
  for (const auto& row : rows) {
    csv += csv_field(row.session) + "," + csv_field(row.region) + ",";
    if (row.value) csv += fmt_double(*row.value);
    csv += "\r\n";
  }
  write_text(opts.out_csv, csv);
}

PhantomSpec load_phantom_spec(const std::string& path) {
  PhantomSpec spec;
  if (path.empty()) return spec;
  const json j = load_json(path);
  spec.n_modalities = j.value("n_modalities", spec.n_modalities);
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_array() || g.size() != 3) throw InvalidSpec(path + ": grid must be a 3-array");
    for (int a = 0; a < 3; ++a) spec.grid[std::size_t(a)] = g[std::size_t(a)].get<int>();
  }
  spec.voxel_mm = j.value("voxel_mm", spec.voxel_mm);
  spec.n_labels = j.value("n_labels", spec.n_labels);
  spec.rot_scale = j.value("rot_scale", spec.rot_scale);
  spec.trans_scale = j.value("trans_scale", spec.trans_scale);
  spec.noise_scale = j.value("noise_scale", spec.noise_scale);
  spec.seed = j.value("seed", spec.seed);
  spec.frames = j.value("frames", spec.frames);
  const std::string render = j.value("render", std::string("resample"));
  if (render == "resample") {
    spec.render = PhantomSpec::Render::resample;
  } else if (render == "header") {
    spec.render = PhantomSpec::Render::header;
  } else {
    throw InvalidSpec(path + ": render must be resample or header");
  }
  if (j.contains("outlier_edges")) {
    for (const auto& o : j["outlier_edges"]) {
      OutlierEdge e;
      e.ref = o.at("ref").get<int>();
      e.tgt = o.at("tgt").get<int>();
      if (o.contains("delta") && o["delta"].is_array()) {
        for (int p = 0; p < 6; ++p) e.delta[p] = o["delta"].at(std::size_t(p)).get<double>();
      } else {
        e.delta[o.at("param").get<int>()] = o.at("delta").get<double>();
      }
      spec.outlier_edges.push_back(e);
    }
  }
  return spec;
}

void write_session(const PhantomSession& s, const PhantomSpec& spec, const std::string& out_dir) {
  const fs::path out(out_dir);
  fs::create_directories(out);

  json manifest;
  manifest["session_id"] = "phantom-" + std::to_string(spec.seed);
  json mods = json::array();
  json truth_latents;
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    const std::string& id = s.ids[i];
    write_nifti(s.images[i], (out / (id + ".nii.gz")).string());
    write_nifti(s.label_maps[i], (out / (id + "_dseg.nii.gz")).string());
    mods.push_back({{"id", id},
                    {"image", id + ".nii.gz"},
                    {"labels", id + "_dseg.nii.gz"},
                    {"role", i == 0 ? "anchor" : "other"},
                    {"frames", s.images[i].frames > 1 ? "average" : "none"}});
    truth_latents[id] = log_to_json(s.latents[i]);
  }
  manifest["modalities"] = mods;
  write_text((out / "manifest.json").string(), manifest.dump(2) + "\n");

  json truth;
  truth["seed"] = spec.seed;
  truth["ids"] = s.ids;
  truth["latents"] = truth_latents;
  truth["render"] = spec.render == PhantomSpec::Render::header ? "header" : "resample";
  write_text((out / "truth.json").string(), truth.dump(2) + "\n");
}

void run_synth(const SynthOptions& opts) {
  if (opts.out_dir.empty()) throw InvalidArgument("synth needs --out");
  const PhantomSpec spec = load_phantom_spec(opts.spec_path);
  PhantomSession session = make_session(spec);
  if (spec.noise_scale > 0.0 || !spec.outlier_edges.empty()) {
    // observation-level corruption applies to bench runs, not rendered images
    throw InvalidSpec("synth renders images; noise_scale/outlier_edges belong to bench");
  }
  write_session(session, spec, opts.out_dir);
}

std::vector<OutlierEdge> parse_outlier_list(const std::string& text) {
  std::vector<OutlierEdge> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    OutlierEdge e;
    int param = -1;
    double delta = 0.0;
    if (std::sscanf(item.c_str(), "%d-%d:%d:%lf", &e.ref, &e.tgt, &param, &delta) != 4 ||
        param < 0 || param > 5)
      throw InvalidArgument("bad outlier spec '" + item + "', expected ref-tgt:param:delta");
    e.delta[param] = delta;
    out.push_back(e);
    pos = comma + 1;
  }
  return out;
}

void run_bench_cli(const BenchCliOptions& opts) {
  if (opts.out_csv.empty()) throw InvalidArgument("bench needs --out");
  BenchConfig cfg;
  cfg.n_modalities = opts.n_modalities;
  cfg.noise_scale = opts.noise;
  cfg.outliers = parse_outlier_list(opts.outliers);
  cfg.reps = opts.reps;
  cfg.seed = opts.seed;

  const auto rows = run_bench(cfg);
  std::string csv = "seed,estimator,err_rx,err_ry,err_rz,err_tx,err_ty,err_tz\r\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.seed) + "," + r.estimator;
    for (double e : r.err) csv += "," + fmt_double(e);
    csv += "\r\n";
  }
  write_text(opts.out_csv, csv);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e)) return 2;
  return 1;
}

}  // namespace jump
