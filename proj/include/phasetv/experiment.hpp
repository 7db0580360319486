#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phasetv/deconv.hpp"
#include "phasetv/simulate.hpp"

namespace phasetv {

enum class Method { Ayers, Modified, ModifiedPhaseOnly, ModifiedEstvOnly };

Method parse_method(std::string_view name);
std::string to_string(Method method);

enum class KernelType { Gaussian, Uniform };

KernelType parse_kernel_type(std::string_view name);
std::string to_string(KernelType type);

/// One test image: either a generated phantom or a file on disk.
struct ImageSource {
  std::string id;
  std::optional<PhantomKind> phantom;
  int width = 0;
  int height = 0;
  std::uint64_t seed = 0;
  std::filesystem::path path;

  Image load() const;
};

struct ExperimentSpec {
  std::vector<ImageSource> images;
  std::vector<KernelType> kernels{KernelType::Gaussian};
  std::vector<int> d{5};
  std::vector<double> sigma{3.0};
  std::vector<Method> methods{Method::Ayers, Method::Modified};
  /// Shared by every run; kernel support is overridden per cell when kernel_support_match.
  DeconvConfig config;
  bool kernel_support_match = true;
  /// Observation noise standard deviation on the 0-255 scale.
  double noise_255 = 0.0;
  std::uint64_t noise_seed = 0;
  std::filesystem::path output_dir = "experiment_out";
  int threads = 1;
  /// Wall times make the CSV non-reproducible, so they are only recorded on request.
  bool record_timing = false;

  void validate() const;
};

/// Parses the key = value spec format (see docs/experiment_spec.md).
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// The standard benchmark grid: ten 64x64 cell phantoms, Gaussian kernels with
/// d in {5, 10, 15} and sigma in {1, 2, 3}, Ayers-Dainty against the modified method.
ExperimentSpec default_benchmark_spec();

struct ReportRow {
  std::string image_id;
  KernelType kernel = KernelType::Gaussian;
  int d = 0;
  double sigma = 0.0;
  Method method = Method::Ayers;
  double psnr_db = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  bool diverged = false;
  /// PSNR of the blurred observation against the original, shared by all rows of a cell.
  double blurred_psnr_db = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
};

/// Runs every (image, kernel, d, sigma) cell with every method. Rows are sorted by
/// (image_id, kernel, d, sigma, method), so the result does not depend on thread scheduling.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// CSV with header image_id,kernel,d,sigma,method,psnr_db,iterations,wall_time_s.
std::string report_csv(const ExperimentReport& report);

/// Markdown tables with the best PSNR of every cell in bold.
std::string report_markdown(const ExperimentReport& report);

/// Winning method per cell (ties go to the method listed first in `methods`).
struct CellOutcome {
  std::string image_id;
  KernelType kernel;
  int d;
  double sigma;
  double blurred_psnr_db;
  Method winner;
  double winner_psnr_db;
};
std::vector<CellOutcome> cell_outcomes(const ExperimentReport& report);

}  // namespace phasetv
