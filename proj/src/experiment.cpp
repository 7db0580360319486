#include "phasetv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "phasetv/imageio.hpp"

namespace phasetv {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("experiment spec: '" + key + "' expects a number, got '" + s + "'");
  }
}

long long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("experiment spec: '" + key + "' expects an integer, got '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw InvalidArgument("experiment spec: '" + key + "' expects true/false, got '" + s + "'");
}

std::string phantom_id(PhantomKind kind, int w, int h, std::uint64_t seed) {
  return to_string(kind) + "-" + std::to_string(w) + "x" + std::to_string(h) + "-s" + std::to_string(seed);
}

// kind:WxH:seed or kind:WxH:first-last
std::vector<ImageSource> parse_phantoms(const std::string& entry) {
  const auto parts = split_list(entry, ':');
  if (parts.size() != 3)
    throw InvalidArgument("experiment spec: phantom entry must look like kind:WxH:seed, got '" + entry + "'");
  const PhantomKind kind = parse_phantom_kind(parts[0]);
  const auto dims = split_list(parts[1], 'x');
  if (dims.size() != 2) throw InvalidArgument("experiment spec: bad phantom size '" + parts[1] + "'");
  const int w = static_cast<int>(parse_int(dims[0], "phantoms"));
  const int h = static_cast<int>(parse_int(dims[1], "phantoms"));

  long long first = 0, last = 0;
  if (const auto dash = parts[2].find('-'); dash != std::string::npos && dash > 0) {
    first = parse_int(parts[2].substr(0, dash), "phantoms");
    last = parse_int(parts[2].substr(dash + 1), "phantoms");
  } else {
    first = last = parse_int(parts[2], "phantoms");
  }
  if (first < 0 || last < first) throw InvalidArgument("experiment spec: bad phantom seed range '" + parts[2] + "'");

  std::vector<ImageSource> out;
  for (long long s = first; s <= last; ++s) {
    ImageSource src;
    src.phantom = kind;
    src.width = w;
    src.height = h;
    src.seed = static_cast<std::uint64_t>(s);
    src.id = phantom_id(kind, w, h, src.seed);
    out.push_back(std::move(src));
  }
  return out;
}

Kernel make_kernel(KernelType type, int d, double sigma) {
  return type == KernelType::Gaussian ? gaussian_kernel(d, sigma) : uniform_kernel(d);
}

struct Cell {
  std::size_t image_index;
  KernelType kernel;
  int d;
  double sigma;
};

std::string format_double(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

auto row_key(const ReportRow& r) {
  return std::make_tuple(r.image_id, to_string(r.kernel), r.d, r.sigma, static_cast<int>(r.method));
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "ayers") return Method::Ayers;
  if (name == "modified") return Method::Modified;
  if (name == "modified-phase-only") return Method::ModifiedPhaseOnly;
  if (name == "modified-estv-only") return Method::ModifiedEstvOnly;
  throw InvalidArgument("unknown method: " + std::string(name));
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Ayers: return "ayers";
    case Method::Modified: return "modified";
    case Method::ModifiedPhaseOnly: return "modified-phase-only";
    case Method::ModifiedEstvOnly: return "modified-estv-only";
  }
  return "unknown";
}

KernelType parse_kernel_type(std::string_view name) {
  if (name == "gaussian") return KernelType::Gaussian;
  if (name == "uniform") return KernelType::Uniform;
  throw InvalidArgument("unknown kernel type: " + std::string(name));
}

std::string to_string(KernelType type) { return type == KernelType::Gaussian ? "gaussian" : "uniform"; }

Image ImageSource::load() const {
  if (phantom) return make_phantom(*phantom, width, height, seed);
  return load_image(path);
}

void ExperimentSpec::validate() const {
  if (images.empty()) throw InvalidArgument("experiment spec: no images or phantoms");
  if (kernels.empty() || d.empty() || methods.empty())
    throw InvalidArgument("experiment spec: kernel grid and methods must be non-empty");
  const bool has_gaussian = std::find(kernels.begin(), kernels.end(), KernelType::Gaussian) != kernels.end();
  if (has_gaussian && sigma.empty()) throw InvalidArgument("experiment spec: gaussian kernels need sigma values");
  for (int v : d)
    if (v < 1) throw InvalidArgument("experiment spec: d must be >= 1");
  for (double s : sigma)
    if (!(s > 0.0)) throw InvalidArgument("experiment spec: sigma must be > 0");
  if (!(noise_255 >= 0.0)) throw InvalidArgument("experiment spec: noise must be >= 0");
  if (threads < 1) throw InvalidArgument("experiment spec: threads must be >= 1");
}

ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  spec.config = default_benchmark_spec().config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("experiment spec line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto values = split_list(value);
    if (values.empty())
      throw InvalidArgument("experiment spec line " + std::to_string(lineno) + ": empty value for " + key);
    auto single = [&]() -> const std::string& {
      if (values.size() != 1) throw InvalidArgument("experiment spec: '" + key + "' takes a single value");
      return values.front();
    };

    auto& cfg = spec.config;
    if (key == "phantoms") {
      for (const auto& v : values) {
        auto generated = parse_phantoms(v);
        spec.images.insert(spec.images.end(), generated.begin(), generated.end());
      }
    } else if (key == "images") {
      for (const auto& v : values) {
        ImageSource src;
        src.path = v;
        src.id = std::filesystem::path(v).stem().string();
        spec.images.push_back(std::move(src));
      }
    } else if (key == "kernels") {
      spec.kernels.clear();
      for (const auto& v : values) spec.kernels.push_back(parse_kernel_type(v));
    } else if (key == "d") {
      spec.d.clear();
      for (const auto& v : values) spec.d.push_back(static_cast<int>(parse_int(v, key)));
    } else if (key == "sigma") {
      spec.sigma.clear();
      for (const auto& v : values) spec.sigma.push_back(parse_double(v, key));
    } else if (key == "methods") {
      spec.methods.clear();
      for (const auto& v : values) spec.methods.push_back(parse_method(v));
    } else if (key == "iters") {
      cfg.max_iters = static_cast<int>(parse_int(single(), key));
    } else if (key == "alpha") {
      cfg.alpha = parse_double(single(), key);
    } else if (key == "lambda") {
      cfg.lambda = parse_double(single(), key);
    } else if (key == "phase_floor") {
      cfg.phase_floor = parse_double(single(), key);
    } else if (key == "estv_iters") {
      cfg.estv_max_iters = static_cast<int>(parse_int(single(), key));
    } else if (key == "estv_tol") {
      cfg.estv_tol = parse_double(single(), key);
    } else if (key == "rel_tol") {
      cfg.rel_change_tol = parse_double(single(), key);
    } else if (key == "kernel_support") {
      if (single() == "match") {
        spec.kernel_support_match = true;
      } else {
        const int k = static_cast<int>(parse_int(single(), key));
        spec.kernel_support_match = false;
        cfg.kernel_rows = cfg.kernel_cols = k;
      }
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(single(), key));
    } else if (key == "noise") {
      spec.noise_255 = parse_double(single(), key);
    } else if (key == "noise_seed") {
      spec.noise_seed = static_cast<std::uint64_t>(parse_int(single(), key));
    } else if (key == "output") {
      spec.output_dir = single();
    } else if (key == "threads") {
      spec.threads = static_cast<int>(parse_int(single(), key));
    } else if (key == "timing") {
      spec.record_timing = parse_bool(single(), key);
    } else {
      throw InvalidArgument("experiment spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ImageIoError("cannot open experiment spec " + path.string());
  return parse_experiment_spec(in);
}

ExperimentSpec default_benchmark_spec() {
  ExperimentSpec spec;
  spec.images = parse_phantoms("cells:64x64:1-10");
  spec.kernels = {KernelType::Gaussian};
  spec.d = {5, 10, 15};
  spec.sigma = {1.0, 2.0, 3.0};
  spec.methods = {Method::Ayers, Method::Modified};
  spec.config.seed = 1;
  spec.kernel_support_match = true;
  return spec;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  std::vector<Image> originals;
  originals.reserve(spec.images.size());
  for (const auto& src : spec.images) originals.push_back(src.load());

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < spec.images.size(); ++i)
    for (KernelType type : spec.kernels)
      for (int d : spec.d) {
        if (type == KernelType::Uniform) {
          cells.push_back({i, type, d, 0.0});
          continue;
        }
        for (double s : spec.sigma) cells.push_back({i, type, d, s});
      }

  std::vector<std::vector<ReportRow>> per_cell(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells.size()) return;
      try {
        const Cell& cell = cells[c];
        const Image& original = originals[cell.image_index];
        const Kernel kernel = make_kernel(cell.kernel, cell.d, cell.sigma);
        Image observed = blur(original, kernel);
        if (spec.noise_255 > 0.0)
          observed = add_noise(observed, spec.noise_255 / 255.0, spec.noise_seed + c);
        const double blurred_psnr = psnr(observed, original);

        DeconvConfig cfg = spec.config;
        if (spec.kernel_support_match) {
          cfg.kernel_rows = std::min(kernel.height(), original.height % 2 ? original.height : original.height - 1);
          cfg.kernel_cols = std::min(kernel.width(), original.width % 2 ? original.width : original.width - 1);
        }

        for (Method method : spec.methods) {
          DeconvConfig run_cfg = cfg;
          run_cfg.use_phase = method == Method::Modified || method == Method::ModifiedPhaseOnly;
          run_cfg.use_estv = method == Method::Modified || method == Method::ModifiedEstvOnly;
          const auto start = std::chrono::steady_clock::now();
          const DeconvResult result = method == Method::Ayers ? ayers_dainty(observed, run_cfg)
                                                              : modified_blind_deconv(observed, run_cfg);
          const auto stop = std::chrono::steady_clock::now();

          ReportRow row;
          row.image_id = spec.images[cell.image_index].id;
          row.kernel = cell.kernel;
          row.d = cell.d;
          row.sigma = cell.sigma;
          row.method = method;
          row.psnr_db = psnr(result.image_estimate, original);
          row.iterations = result.iterations_used;
          row.wall_time_s = spec.record_timing ? std::chrono::duration<double>(stop - start).count() : 0.0;
          row.diverged = result.diverged;
          row.blurred_psnr_db = blurred_psnr;
          per_cell[c].push_back(row);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(cells.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentReport report;
  for (auto& rows : per_cell)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  std::sort(report.rows.begin(), report.rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return row_key(a) < row_key(b); });
  return report;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "image_id,kernel,d,sigma,method,psnr_db,iterations,wall_time_s\n";
  for (const auto& r : report.rows) {
    out << r.image_id << ',' << to_string(r.kernel) << ',' << r.d << ',' << format_double(r.sigma, 3) << ','
        << to_string(r.method) << ',' << format_double(r.psnr_db, 4) << ',' << r.iterations << ','
        << format_double(r.wall_time_s, 3) << '\n';
  }
  return out.str();
}

std::vector<CellOutcome> cell_outcomes(const ExperimentReport& report) {
  std::vector<CellOutcome> out;
  for (const auto& r : report.rows) {
    const bool same_cell = !out.empty() && out.back().image_id == r.image_id && out.back().kernel == r.kernel &&
                           out.back().d == r.d && out.back().sigma == r.sigma;
    if (!same_cell) {
      out.push_back({r.image_id, r.kernel, r.d, r.sigma, r.blurred_psnr_db, r.method, r.psnr_db});
    } else if (r.psnr_db > out.back().winner_psnr_db) {
      out.back().winner = r.method;
      out.back().winner_psnr_db = r.psnr_db;
    }
  }
  return out;
}

std::string report_markdown(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# Blind deconvolution results\n\n";
  out << "PSNR in dB against the original image. Bold marks the best method of each cell; "
         "a dagger marks a run that stopped on non-finite values.\n";

  // Group by (kernel, sigma) the way the benchmark tables are laid out: one row per
  // (method, d) and one column per image.
  std::vector<std::string> image_ids;
  std::vector<Method> methods;
  std::map<std::pair<std::string, double>, std::vector<int>> blocks;
  std::map<std::tuple<std::string, double, int, int, std::string>, const ReportRow*> lookup;
  for (const auto& r : report.rows) {
    if (std::find(image_ids.begin(), image_ids.end(), r.image_id) == image_ids.end()) image_ids.push_back(r.image_id);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    auto& ds = blocks[{to_string(r.kernel), r.sigma}];
    if (std::find(ds.begin(), ds.end(), r.d) == ds.end()) ds.push_back(r.d);
    lookup[{to_string(r.kernel), r.sigma, r.d, static_cast<int>(r.method), r.image_id}] = &r;
  }
  std::sort(methods.begin(), methods.end(), [](Method a, Method b) { return static_cast<int>(a) < static_cast<int>(b); });

  for (auto& [block, ds] : blocks) {
    std::sort(ds.begin(), ds.end());
    out << "\n## " << block.first << " kernel";
    if (block.first == "gaussian") out << ", sigma = " << format_double(block.second, 2);
    out << "\n\n| Method | d |";
    for (const auto& id : image_ids) out << ' ' << id << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < image_ids.size(); ++i) out << "---|";
    out << '\n';
    for (int d : ds) {
      // Blurred input row first, for reference.
      out << "| blurred | " << d << " |";
      for (const auto& id : image_ids) {
        const ReportRow* any = nullptr;
        for (Method m : methods)
          if (auto it = lookup.find({block.first, block.second, d, static_cast<int>(m), id}); it != lookup.end())
            any = it->second;
        out << ' ' << (any ? format_double(any->blurred_psnr_db, 2) : "") << " |";
      }
      out << '\n';
      for (Method m : methods) {
        out << "| " << to_string(m) << " | " << d << " |";
        for (const auto& id : image_ids) {
          const auto it = lookup.find({block.first, block.second, d, static_cast<int>(m), id});
          if (it == lookup.end()) {
            out << "  |";
            continue;
          }
          double best = -std::numeric_limits<double>::infinity();
          for (Method other : methods)
            if (auto jt = lookup.find({block.first, block.second, d, static_cast<int>(other), id}); jt != lookup.end())
              best = std::max(best, jt->second->psnr_db);
          std::string cell = format_double(it->second->psnr_db, 2);
          if (it->second->diverged) cell += "†";
          if (it->second->psnr_db == best) cell = "**" + cell + "**";
          out << ' ' << cell << " |";
        }
        out << '\n';
      }
    }
  }

  const auto outcomes = cell_outcomes(report);
  out << "\n## Winners\n\n| image | kernel | d | sigma | blurred | winner | winner PSNR |\n"
         "|---|---|---|---|---|---|---|\n";
  std::map<Method, int> wins;
  for (const auto& o : outcomes) {
    ++wins[o.winner];
    out << "| " << o.image_id << " | " << to_string(o.kernel) << " | " << o.d << " | " << format_double(o.sigma, 2)
        << " | " << format_double(o.blurred_psnr_db, 2) << " | " << to_string(o.winner) << " | "
        << format_double(o.winner_psnr_db, 2) << " |\n";
  }
  out << "\nCells won:";
  for (const auto& [m, n] : wins) out << ' ' << to_string(m) << ' ' << n << '/' << outcomes.size() << ';';
  out << '\n';

  std::size_t diverged = 0;
  for (const auto& r : report.rows) diverged += r.diverged ? 1 : 0;
  out << "Diverged runs: " << diverged << '\n';
  return out.str();
}

}  // namespace phasetv
