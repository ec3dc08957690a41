#include <CLI11.hpp>

#include <iostream>

#include "jump/pipeline.hpp"

namespace {

int guarded(const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const jump::Error& e) {
    std::cerr << "jump: error: " << e.category() << ": " << e.what() << "\n";
    return jump::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "jump: error: internal: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jump - groupwise multimodal rigid registration and biomarker toolkit"};
  app.require_subcommand(1);

  jump::RegisterOptions reg;
  auto* creg = app.add_subcommand("register", "Infer session template transforms from parcellations");
  creg->add_option("--manifest", reg.manifests, "Session manifest JSON (repeat for a batch)")
      ->required();
  creg->add_option("--out", reg.out_dir, "Output directory")->required();
  creg->add_option("--pairs", reg.pairs, "all or list ref:tgt,ref:tgt,...");
  std::string center = "soft";
  creg->add_option("--center", center, "soft or hard zero-sum centering")
      ->check(CLI::IsMember({"soft", "hard"}));
  creg->add_option("--b-ratio", reg.b_ratio, "Centering penalty weight b_M/b_Z (soft mode)");
  creg->add_option("--jobs", reg.jobs, "Concurrency limit (JUMP_JOBS overrides)");

  jump::ResampleOptions res;
  auto* cres = app.add_subcommand("resample", "Pull modalities onto the session template grid");
  cres->add_option("--manifest", res.manifest, "Session manifest JSON")->required();
  cres->add_option("--solution", res.solution_dir, "Directory written by register")->required();
  cres->add_option("--out", res.out_dir, "Output directory")->required();
  cres->add_option("--method", res.method, "trilinear or nearest (labels always nearest)")
      ->check(CLI::IsMember({"trilinear", "nearest"}));
  cres->add_option("--jobs", res.jobs, "Concurrency limit (JUMP_JOBS overrides)");

  jump::SuvrOptions suv;
  auto* csuv = app.add_subcommand("suvr", "Region SUVr table from a PET volume and segmentation");
  csuv->add_option("--pet", suv.pet_path, "PET NIfTI (template space)")->required();
  csuv->add_option("--seg", suv.seg_path, "Segmentation NIfTI (template space)")->required();
  csuv->add_option("--regions", suv.regions_path, "Region spec JSON")->required();
  csuv->add_option("--out", suv.out_csv, "Output CSV")->required();
  csuv->add_option("--session", suv.session, "Session ID column (default: PET stem)");

  jump::SynthOptions syn;
  auto* csyn = app.add_subcommand("synth", "Generate a synthetic session with known transforms");
  csyn->add_option("--spec", syn.spec_path, "Phantom spec JSON (defaults when omitted)");
  csyn->add_option("--out", syn.out_dir, "Output session directory")->required();

  jump::BenchCliOptions ben;
  auto* cben = app.add_subcommand("bench", "Monte-Carlo estimator comparison");
  cben->add_option("--n", ben.n_modalities, "Number of modalities");
  cben->add_option("--noise", ben.noise, "Laplace noise scale b");
  cben->add_option("--outliers", ben.outliers, "ref-tgt:param:delta[,...]");
  cben->add_option("--reps", ben.reps, "Repetitions");
  cben->add_option("--seed", ben.seed, "Base seed");
  cben->add_option("--out", ben.out_csv, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  if (creg->parsed()) {
    reg.hard_center = center == "hard";
    // sessions report their own failures; run_register returns the worst code
    int code = 0;
    const int setup = guarded([&] { code = jump::run_register(reg); });
    return setup != 0 ? setup : code;
  }
  if (cres->parsed()) return guarded([&] { jump::run_resample(res); });
  if (csuv->parsed()) return guarded([&] { jump::run_suvr(suv); });
  if (csyn->parsed()) return guarded([&] { jump::run_synth(syn); });
  if (cben->parsed()) return guarded([&] { jump::run_bench_cli(ben); });
  return 0;
}
