#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jump/bench.hpp"
#include "jump/biomarkers.hpp"
#include "jump/phantom.hpp"

namespace jump {

enum class FramesMode { none, midpoint, average };

struct ManifestEntry {
  std::string id;
  std::string image_path;   // resolved against the manifest directory
  std::string labels_path;
  bool anchor = false;
  FramesMode frames = FramesMode::none;
};

struct SessionManifest {
  std::string session_id;
  std::vector<ManifestEntry> entries;
};

// Parses and validates a session manifest (>= 2 modalities, unique IDs,
// exactly one anchor). Paths are resolved relative to the manifest file.
SessionManifest load_manifest(const std::string& path);

// --jobs with the JUMP_JOBS environment override applied.
int resolve_jobs(int flag_jobs);

struct RegisterOptions {
  std::vector<std::string> manifests;
  std::string out_dir;
  std::string pairs = "all";  // or "id:id,id:id,..."
  bool hard_center = false;
  double b_ratio = 1.0;
  int jobs = 1;
};

// Per-session: pairwise registration, graph inference, template definition;
// writes transform_<id>.json per modality plus solution.json. Failed sessions
// are reported on stderr and the batch continues; returns the worst exit code
// (0 ok, 1 validation, 2 numerical).
int run_register(const RegisterOptions& opts);

struct ResampleOptions {
  std::string manifest;
  std::string solution_dir;  // output directory of a register run
  std::string out_dir;
  std::string method = "trilinear";  // images; labels always nearest
  int jobs = 1;
};

void run_resample(const ResampleOptions& opts);

struct SuvrOptions {
  std::string pet_path;
  std::string seg_path;
  std::string regions_path;
  std::string out_csv;
  std::string session;  // defaults to the PET filename stem
};

void run_suvr(const SuvrOptions& opts);

struct SynthOptions {
  std::string spec_path;  // empty: defaults
  std::string out_dir;
};

void run_synth(const SynthOptions& opts);

struct BenchCliOptions {
  int n_modalities = 4;
  double noise = 0.0;
  std::string outliers;  // "ref-tgt:param:delta[,...]"
  int reps = 100;
  std::uint64_t seed = 1234;
  std::string out_csv;
};

void run_bench_cli(const BenchCliOptions& opts);

// Shared bits used by commands and tests.
PhantomSpec load_phantom_spec(const std::string& path);
std::vector<OutlierEdge> parse_outlier_list(const std::string& text);
void write_session(const PhantomSession& s, const PhantomSpec& spec, const std::string& out_dir);
std::vector<RegionSpec> load_regions(const std::string& path);

// 0 ok / 1 validation / 2 numerical, per the CLI contract.
int exit_code_for(const std::exception& e);

}  // namespace jump
