#include "phasetv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "phasetv/deconv.hpp"
#include "phasetv/experiment.hpp"
#include "phasetv/imageio.hpp"
#include "phasetv/simulate.hpp"
#include "phasetv/spectral.hpp"
#include "phasetv/tv.hpp"

namespace phasetv {

namespace {

struct BlurArgs {
  std::string input;
  std::string output;
  std::string kernel = "gaussian";
  int d = 5;
  double sigma = 3.0;
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
  int depth = 8;
};

struct DeblurArgs {
  std::string input;
  std::string output;
  std::string kernel_output;
  std::string reference;
  std::string method = "modified";
  DeconvConfig config;
  int kernel_support = 11;
  int depth = 8;
};

struct PhaseDemoArgs {
  std::string input;
  std::string prefix = "phase_demo";
  std::string extension = ".png";
  double c = 1.0;
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
};

struct ExperimentArgs {
  std::string spec;
  std::string output;
  int threads = 0;
  bool benchmark = false;
};

struct PhantomArgs {
  std::string kind = "cells";
  int width = 64;
  int height = 64;
  std::uint64_t seed = 0;
  std::string output;
  int depth = 8;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

Kernel kernel_from_args(const BlurArgs& a) {
  if (a.kernel == "gaussian") return gaussian_kernel(a.d, a.sigma);
  if (a.kernel == "uniform") return uniform_kernel(a.d);
  return Kernel::delta();
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::filesystem::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".png");
  return (p.parent_path() / (p.stem().string() + suffix + ext)).string();
}

int cmd_blur(const BlurArgs& a, std::ostream& out) {
  const Image x = load_image(a.input);
  const Kernel h = kernel_from_args(a);
  Image y = blur(x, h);
  if (a.noise > 0.0) y = add_noise(y, a.noise / 255.0, a.noise_seed);
  write_image(y, a.output, a.depth);
  out << "tv_input=" << fmt(tv(x)) << " tv_output=" << fmt(tv(y)) << " psnr_db=" << fmt(psnr(y, x)) << '\n';
  return kExitOk;
}

int cmd_deblur(DeblurArgs a, std::ostream& out, std::ostream& err) {
  const Image y = load_image(a.input);
  std::optional<Image> reference;
  if (!a.reference.empty()) {
    reference = load_image(a.reference);
    require_same_dims(*reference, y, "deblur --reference");
  }

  DeconvConfig cfg = a.config;
  cfg.kernel_rows = cfg.kernel_cols = a.kernel_support;
  const Method method = parse_method(a.method);
  cfg.use_phase = method == Method::Modified || method == Method::ModifiedPhaseOnly;
  cfg.use_estv = method == Method::Modified || method == Method::ModifiedEstvOnly;
  const DeconvResult result = method == Method::Ayers ? ayers_dainty(y, cfg) : modified_blind_deconv(y, cfg);

  const std::string kernel_path = a.kernel_output.empty() ? with_suffix(a.output, "_kernel") : a.kernel_output;
  if (result.image_estimate.all_finite()) {
    write_image(result.image_estimate, a.output, a.depth);
  } else {
    // Write something viewable even when the loop blew up.
    Image safe = result.image_estimate;
    for (auto& v : safe.data)
      if (!std::isfinite(v)) v = 0.0;
    write_image(safe, a.output, a.depth);
  }
  Image kernel_img(result.kernel_estimate.width(), result.kernel_estimate.height());
  kernel_img.data = result.kernel_estimate.taps;
  for (auto& v : kernel_img.data)
    if (!std::isfinite(v)) v = 0.0;
  write_image(rescale_to_unit(kernel_img), kernel_path, a.depth);

  const double final_change = [&] {
    if (result.per_iteration_change.empty()) return 0.0;
    const double scale = norm(result.image_estimate);
    const double last = result.per_iteration_change.back();
    return scale > 0.0 && std::isfinite(last) ? last / scale : last;
  }();
  out << "iterations=" << result.iterations_used << " rel_change=" << std::scientific << std::setprecision(3)
      << final_change << std::defaultfloat;
  if (reference) out << " psnr_db=" << fmt(psnr(result.image_estimate, *reference));
  out << '\n';
  if (result.diverged) {
    err << "deblur: iterate became non-finite after " << result.iterations_used << " iterations\n";
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_phase_demo(const PhaseDemoArgs& a, std::ostream& out) {
  const Image x = load_image(a.input);
  const Image noisy = a.noise > 0.0 ? add_noise(x, a.noise / 255.0, a.noise_seed) : x;
  const Image phase_clean = phase_only_image(x, a.c);
  const Image phase_noisy = phase_only_image(noisy, a.c);

  const std::string clean_path = a.prefix + "_phase" + a.extension;
  const std::string noisy_path = a.prefix + "_noisy" + a.extension;
  const std::string noisy_phase_path = a.prefix + "_noisy_phase" + a.extension;
  write_image(rescale_to_unit(phase_clean), clean_path, 16);
  write_image(noisy, noisy_path, 16);
  write_image(rescale_to_unit(phase_noisy), noisy_phase_path, 16);
  out << clean_path << '\n' << noisy_path << '\n' << noisy_phase_path << '\n';
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec = a.benchmark ? default_benchmark_spec() : load_experiment_spec(a.spec);
  if (!a.output.empty()) spec.output_dir = a.output;
  if (a.threads > 0) spec.threads = a.threads;

  const ExperimentReport report = run_experiment(spec);

  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw IoFailure("cannot create " + spec.output_dir.string() + ": " + ec.message());
  const auto csv_path = spec.output_dir / "report.csv";
  const auto md_path = spec.output_dir / "report.md";
  for (const auto& [path, text] : {std::pair{csv_path, report_csv(report)}, std::pair{md_path, report_markdown(report)}}) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw IoFailure("failed writing " + path.string());
  }

  std::size_t diverged = 0;
  for (const auto& r : report.rows) diverged += r.diverged ? 1 : 0;
  if (diverged > 0) err << "experiment: " << diverged << " run(s) diverged; see " << md_path.string() << '\n';
  out << csv_path.string() << '\n' << md_path.string() << '\n';
  return kExitOk;
}

int cmd_phantom(const PhantomArgs& a, std::ostream& out) {
  const Image img = make_phantom(parse_phantom_kind(a.kind), a.width, a.height, a.seed);
  write_image(img, a.output, a.depth);
  out << "tv=" << fmt(tv(img)) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blind deconvolution with phase and total-variation projections", "phasetv"};
  app.require_subcommand(1);
  const auto depth_check = CLI::IsMember({8, 16});

  BlurArgs blur_args;
  auto* blur_cmd = app.add_subcommand("blur", "Blur an image with a synthetic kernel");
  blur_cmd->add_option("input", blur_args.input, "Input image (PNG or PGM)")->required();
  blur_cmd->add_option("-o,--output", blur_args.output, "Output image")->required();
  blur_cmd->add_option("--kernel", blur_args.kernel, "Kernel type")
      ->check(CLI::IsMember({"gaussian", "uniform", "delta"}))
      ->capture_default_str();
  blur_cmd->add_option("--d", blur_args.d, "Kernel radius in pixels")->check(CLI::PositiveNumber)->capture_default_str();
  blur_cmd->add_option("--sigma", blur_args.sigma, "Gaussian width")->check(CLI::PositiveNumber)->capture_default_str();
  blur_cmd->add_option("--noise", blur_args.noise, "Noise standard deviation on the 0-255 scale")
      ->check(CLI::NonNegativeNumber);
  blur_cmd->add_option("--noise-seed", blur_args.noise_seed, "Noise seed");
  blur_cmd->add_option("--depth", blur_args.depth, "Output bit depth")->check(depth_check)->capture_default_str();

  DeblurArgs deblur_args;
  auto& cfg = deblur_args.config;
  auto* deblur_cmd = app.add_subcommand("deblur", "Blind deconvolution of a single image");
  deblur_cmd->add_option("input", deblur_args.input, "Blurred image")->required();
  deblur_cmd->add_option("-o,--output", deblur_args.output, "Restored image")->required();
  deblur_cmd->add_option("--kernel-output", deblur_args.kernel_output, "Estimated kernel image (rescaled to [0,1])");
  deblur_cmd->add_option("--reference", deblur_args.reference, "Sharp image for PSNR reporting");
  deblur_cmd->add_option("--method", deblur_args.method, "Algorithm")
      ->check(CLI::IsMember({"ayers", "modified", "modified-phase-only", "modified-estv-only"}))
      ->capture_default_str();
  deblur_cmd->add_option("--alpha", cfg.alpha, "Wiener regularizer")->check(CLI::PositiveNumber)->capture_default_str();
  deblur_cmd->add_option("--lambda", cfg.lambda, "TV weight of the epigraph projection")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  deblur_cmd->add_option("--iters", cfg.max_iters, "Maximum iterations")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  deblur_cmd->add_option("--estv-iters", cfg.estv_max_iters, "Cutting-plane iterations per epigraph projection")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  deblur_cmd->add_option("--phase-floor", cfg.phase_floor, "Relative magnitude below which phase is not imposed")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  deblur_cmd->add_option("--seed", cfg.seed, "Seed of the random initial image")->capture_default_str();
  deblur_cmd->add_option("--kernel-support", deblur_args.kernel_support, "Odd side of the kernel box")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  deblur_cmd->add_option("--depth", deblur_args.depth, "Output bit depth")->check(depth_check)->capture_default_str();

  PhaseDemoArgs demo_args;
  auto* demo_cmd = app.add_subcommand("phase-demo", "Phase-only images of an image and of a noisy copy");
  demo_cmd->add_option("input", demo_args.input, "Input image")->required();
  demo_cmd->add_option("--prefix", demo_args.prefix, "Output path prefix")->capture_default_str();
  demo_cmd->add_option("--ext", demo_args.extension, "Output extension")
      ->check(CLI::IsMember({".png", ".pgm"}))
      ->capture_default_str();
  demo_cmd->add_option("--c", demo_args.c, "Constant magnitude")->check(CLI::PositiveNumber)->capture_default_str();
  demo_cmd->add_option("--noise", demo_args.noise, "Noise standard deviation on the 0-255 scale")
      ->check(CLI::NonNegativeNumber);
  demo_cmd->add_option("--noise-seed", demo_args.noise_seed, "Noise seed");

  ExperimentArgs exp_args;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a deconvolution benchmark grid");
  auto* spec_opt = exp_cmd->add_option("spec", exp_args.spec, "Experiment spec file");
  exp_cmd->add_flag("--benchmark", exp_args.benchmark, "Run the built-in 64x64 benchmark grid")->excludes(spec_opt);
  exp_cmd->add_option("--output", exp_args.output, "Override the output directory");
  exp_cmd->add_option("--threads", exp_args.threads, "Worker threads")->check(CLI::PositiveNumber);

  PhantomArgs phantom_args;
  auto* phantom_cmd = app.add_subcommand("phantom", "Write a synthetic test image");
  phantom_cmd->add_option("--kind", phantom_args.kind, "Phantom kind")
      ->check(CLI::IsMember({"cells", "step", "impulses"}))
      ->capture_default_str();
  phantom_cmd->add_option("--width", phantom_args.width, "Width")->check(CLI::Range(16, 1 << 14))->capture_default_str();
  phantom_cmd->add_option("--height", phantom_args.height, "Height")->check(CLI::Range(16, 1 << 14))->capture_default_str();
  phantom_cmd->add_option("--seed", phantom_args.seed, "Seed")->capture_default_str();
  phantom_cmd->add_option("-o,--output", phantom_args.output, "Output image")->required();
  phantom_cmd->add_option("--depth", phantom_args.depth, "Output bit depth")->check(depth_check)->capture_default_str();

  try {
    app.parse(argc, argv);
    if (exp_cmd->parsed() && exp_args.spec.empty() && !exp_args.benchmark)
      throw CLI::RequiredError("experiment needs a spec file or --benchmark");
    if (deblur_cmd->parsed() && deblur_args.kernel_support % 2 == 0)
      throw CLI::ValidationError("--kernel-support", "must be odd");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    for (const auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  }

  try {
    if (blur_cmd->parsed()) return cmd_blur(blur_args, out);
    if (deblur_cmd->parsed()) return cmd_deblur(deblur_args, out, err);
    if (demo_cmd->parsed()) return cmd_phase_demo(demo_args, out);
    if (exp_cmd->parsed()) return cmd_experiment(exp_args, out, err);
    if (phantom_cmd->parsed()) return cmd_phantom(phantom_args, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ImageIoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace phasetv
