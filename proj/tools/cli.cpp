#include "cli.hpp"

#include "run_config.hpp"

#include <qmc/errors.hpp>
#include <qmc/imaging.hpp>
#include <qmc/mask.hpp>
#include <qmc/qdct.hpp>
#include <qmc/qmat_io.hpp>
#include <qmc/solvers.hpp>
#include <qmc/synthetic.hpp>
#include <qmc/version.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace qmc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Missing mandatory input that CLI11 cannot express as `required()`.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

bool has_extension(const fs::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

// rec.png -> rec.manifest.json
fs::path default_manifest(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".manifest.json");
  return p;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string abs_path(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

void check_missing_ratio(double mr) {
  if (!(mr >= 0.0 && mr <= 1.0)) {
    throw ConfigError("missing ratio must lie in [0, 1], got " + std::to_string(mr));
  }
}

// "256", "256x128"
std::pair<Index, Index> parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const long n = std::stol(text, &used);
      if (used == text.size() && n > 0) return {n, n};
    } else {
      const std::string a = text.substr(0, x);
      const std::string b = text.substr(x + 1);
      std::size_t used_b = 0;
      const long r = std::stol(a, &used);
      const long c = std::stol(b, &used_b);
      if (used == a.size() && used_b == b.size() && r > 0 && c > 0) return {r, c};
    }
  } catch (const std::exception&) {
  }
  throw UsageError("--size expects N or ROWSxCOLS, got '" + text + "'");
}

void set_threads_from_env() {
  int threads = 1;
  if (const char* env = std::getenv("QMC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) threads = n;
  }
  Eigen::setNbThreads(threads);
}

json manifest_base(const std::string& command, const std::string& started) {
  return {{"schema", 1},
          {"command", command},
          {"version", std::string(kVersion)},
          {"threads", Eigen::nbThreads()},
          {"started_at", started}};
}

// ---------------------------------------------------------------- complete

struct CompleteArgs {
  ConfigOverrides flags;
  std::string method;
  std::optional<std::string> axis;
  std::optional<fs::path> input, output, metrics, manifest, mask_file, config_file, replay;
  std::optional<double> mr;
};

struct MaskSource {
  std::optional<fs::path> file;
  double missing_ratio = 0.0;
  std::uint64_t seed = 0;
};

Mask load_mask(const fs::path& path) {
  if (has_extension(path, ".qmsk")) return read_qmsk(path);
  if (has_extension(path, ".png")) return read_mask_png(path);
  throw UsageError("--mask must be a .png or .qmsk file: " + path.string());
}

json metrics_json(const SolverReport& report, const std::optional<QualityReport>& q,
                  std::optional<double> rel_error, double total_seconds) {
  json j{{"schema", 1},
         {"method", std::string(method_name(report.method))},
         {"iterations", report.iterations},
         {"converged", report.converged},
         {"total_seconds", total_seconds}};
  if (q) {
    j["psnr"] = std::isinf(q->psnr_db) ? json("inf") : json(q->psnr_db);
    j["ssim"] = q->ssim;
  } else {
    j["psnr"] = nullptr;
    j["ssim"] = nullptr;
  }
  if (rel_error) j["relative_error"] = *rel_error;
  json change = json::array(), residual = json::array(), mu = json::array(),
       seconds = json::array();
  for (const IterationRecord& r : report.history) {
    change.push_back(r.relative_change);
    residual.push_back(r.primal_residual);
    mu.push_back(r.mu);
    seconds.push_back(r.seconds);
  }
  j["relative_change"] = std::move(change);
  j["primal_residual"] = std::move(residual);
  j["mu"] = std::move(mu);
  j["seconds"] = std::move(seconds);
  return j;
}

int cmd_complete(const CompleteArgs& a, std::ostream& out, const std::string& usage,
                 std::ostream& err) {
  const std::string started = utc_now();

  ConfigOverrides file;
  std::optional<fs::path> input = a.input, output = a.output, metrics = a.metrics;
  MaskSource mask_src;
  bool have_mask = false;

  if (a.replay) {
    if (a.config_file) throw UsageError("--replay and --config are mutually exclusive");
    const json m = read_json(*a.replay);
    try {
      if (m.at("command").get<std::string>() != "complete") {
        throw ConfigError("manifest was not written by 'complete'");
      }
      file = overrides_from_json(m.at("config"));
      const json& paths = m.at("paths");
      if (!input) input = paths.at("in").get<std::string>();
      if (!output) output = paths.at("out").get<std::string>();
      if (!metrics && paths.contains("metrics") && !paths.at("metrics").is_null()) {
        metrics = paths.at("metrics").get<std::string>();
      }
      const json& mk = m.at("mask");
      if (mk.at("source").get<std::string>() == "file") {
        mask_src.file = mk.at("path").get<std::string>();
      } else {
        mask_src.missing_ratio = mk.at("missing_ratio").get<double>();
        mask_src.seed = mk.at("seed").get<std::uint64_t>();
      }
      have_mask = true;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
  } else if (a.config_file) {
    file = read_config_file(*a.config_file);
  }

  ConfigOverrides flags = a.flags;
  if (!a.method.empty()) flags.method = parse_method(a.method);
  if (a.axis) flags.qdct_axis = parse_axis(*a.axis);
  const SolverConfig cfg = resolve(file, flags);

  if (!input) throw UsageError("--in is required");
  if (!output) throw UsageError("--out is required");
  if (cfg.rank == 0) throw UsageError("--rank is required (flag, config file or manifest)");

  if (a.mask_file) {
    mask_src = MaskSource{a.mask_file, 0.0, 0};
    have_mask = true;
  } else if (a.mr) {
    mask_src = MaskSource{std::nullopt, *a.mr, cfg.seed};
    have_mask = true;
  } else if (have_mask && !mask_src.file && flags.seed) {
    mask_src.seed = *flags.seed;
  }
  if (!have_mask) throw UsageError("a mask is required: --mask FILE or --mr RATIO");
  if (!mask_src.file) check_missing_ratio(mask_src.missing_ratio);

  const bool matrix_input = has_extension(*input, ".qmat");
  std::optional<ColorImage> image;
  QuaternionMatrix truth;
  if (matrix_input) {
    truth = read_qmat(*input);
  } else {
    image = read_png(*input);
    truth = image_to_quaternion(*image);
  }

  Mask mask = mask_src.file ? load_mask(*mask_src.file)
                            : random_mask(truth.rows(), truth.cols(), mask_src.missing_ratio,
                                          mask_src.seed);
  if (mask.rows() != truth.rows() || mask.cols() != truth.cols()) {
    throw ConfigError("mask is " + std::to_string(mask.rows()) + "x" +
                      std::to_string(mask.cols()) + " but the input is " +
                      std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
  }
  validate(cfg, truth.rows(), truth.cols());

  const auto t0 = std::chrono::steady_clock::now();
  const SolverReport report = complete(mask.project(truth), mask, cfg);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::optional<QualityReport> q;
  std::optional<double> rel_error;
  if (matrix_input) {
    write_qmat(*output, report.x);
    rel_error = frobenius_norm(report.x - truth) / std::max(1e-300, frobenius_norm(truth));
  } else {
    const ColorImage restored = quaternion_to_image(report.x);
    write_png(*output, restored);
    q = quality(*image, restored);
  }
  if (metrics) write_json(*metrics, metrics_json(report, q, rel_error, total));

  json manifest = manifest_base("complete", started);
  manifest["config"] = to_json(cfg);
  manifest["paths"] = {{"in", abs_path(*input)},
                       {"out", abs_path(*output)},
                       {"metrics", metrics ? json(abs_path(*metrics)) : json(nullptr)}};
  if (mask_src.file) {
    manifest["mask"] = {{"source", "file"}, {"path", abs_path(*mask_src.file)}};
  } else {
    manifest["mask"] = {{"source", "generated"},
                        {"missing_ratio", mask_src.missing_ratio},
                        {"seed", mask_src.seed}};
  }
  manifest["finished_at"] = utc_now();
  write_json(a.manifest ? *a.manifest : default_manifest(*output), manifest);

  out << method_name(cfg.method) << ": " << report.iterations << " iterations"
      << (report.converged ? " (converged)" : "");
  if (q) out << ", psnr " << q->psnr_db << " dB, ssim " << q->ssim;
  if (rel_error) out << ", relative error " << *rel_error;
  out << '\n';
  (void)usage;
  (void)err;
  return kExitOk;
}

// ---------------------------------------------------------------- mask

struct MaskArgs {
  double mr = 0.0;
  std::uint64_t seed = 0;
  std::string size;
  fs::path prefix;
};

int cmd_mask(const MaskArgs& a, std::ostream& out) {
  const std::string started = utc_now();
  check_missing_ratio(a.mr);
  const auto [rows, cols] = parse_size(a.size);
  const Mask mask = random_mask(rows, cols, a.mr, a.seed);
  const fs::path png = fs::path(a.prefix.string() + ".png");
  const fs::path qmsk = fs::path(a.prefix.string() + ".qmsk");
  write_mask_png(png, mask);
  write_qmsk(qmsk, mask);

  json manifest = manifest_base("mask", started);
  manifest["mask"] = {{"source", "generated"},
                      {"missing_ratio", a.mr},
                      {"seed", a.seed},
                      {"rows", rows},
                      {"cols", cols}};
  manifest["paths"] = {{"png", abs_path(png)}, {"qmsk", abs_path(qmsk)}};
  manifest["finished_at"] = utc_now();
  write_json(fs::path(a.prefix.string() + ".manifest.json"), manifest);

  out << mask.observed_count() << " of " << rows * cols << " entries observed\n";
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::optional<Index> rows, cols;
  std::optional<std::string> size;
  Index rank = 0;
  std::uint64_t seed = 0;
  double scale = 1.0;
  fs::path output;
  std::optional<Index> sparse_band;
  double sparse_density = 0.1;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const std::string started = utc_now();
  Index rows = 0, cols = 0;
  if (a.size) {
    if (a.rows || a.cols) throw UsageError("--size conflicts with --rows/--cols");
    std::tie(rows, cols) = parse_size(*a.size);
  } else {
    if (!a.rows || !a.cols) throw UsageError("give --size or both --rows and --cols");
    rows = *a.rows;
    cols = *a.cols;
  }
  if (rows < 1 || cols < 1) throw UsageError("dimensions must be positive");
  if (a.rank < 1 || a.rank > std::min(rows, cols)) {
    throw ConfigError("rank must lie in [1, min(rows, cols)]");
  }

  QuaternionMatrix m = random_low_rank(rows, cols, a.rank, a.seed, a.scale);
  if (a.sparse_band) {
    if (*a.sparse_band < 1 || *a.sparse_band > rows) {
      throw ConfigError("--sparse-band must lie in [1, rows]");
    }
    if (!(a.sparse_density > 0.0 && a.sparse_density <= 1.0)) {
      throw ConfigError("--sparse-density must lie in (0, 1]");
    }
    const QdctContext ctx(rows, cols);
    m += qdct_sparse_low_rank(ctx, *a.sparse_band, a.sparse_density, a.seed + 1, a.scale).matrix;
  }
  write_qmat(a.output, m);

  json manifest = manifest_base("synth", started);
  manifest["synth"] = {{"rows", rows},
                       {"cols", cols},
                       {"rank", a.rank},
                       {"seed", a.seed},
                       {"scale", a.scale},
                       {"sparse_band", a.sparse_band ? json(*a.sparse_band) : json(nullptr)},
                       {"sparse_density", a.sparse_density}};
  manifest["paths"] = {{"out", abs_path(a.output)}};
  manifest["finished_at"] = utc_now();
  write_json(default_manifest(a.output), manifest);

  out << "wrote " << rows << "x" << cols << " matrix to " << a.output.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<Index> sizes{128, 256, 512};
  Index rank = 16;
  int iters = 10;
  std::uint64_t seed = 0;
  std::optional<fs::path> output;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.rank < 1) throw ConfigError("--rank must be positive");
  if (a.iters < 1) throw ConfigError("--iters must be positive");
  std::ostringstream csv;
  csv << "size,median_iter_ms\n";
  for (const Index n : a.sizes) {
    if (n < a.rank) throw ConfigError("size " + std::to_string(n) + " is below the rank");
    const BenchRow row = bench_size(n, a.rank, a.iters, a.seed);
    csv << row.size << ',' << std::setprecision(6) << row.median_iter_ms << '\n';
  }
  if (a.output) {
    std::ofstream f(*a.output);
    if (!f) throw IoError("cannot write " + a.output->string());
    f << csv.str();
  }
  out << csv.str();
  return kExitOk;
}

}  // namespace

BenchRow bench_size(Index size, Index rank, int iters, std::uint64_t seed) {
  const QuaternionMatrix truth = random_low_rank(size, size, rank, seed);
  const Mask mask = random_mask(size, size, 0.5, seed + 1);
  SolverConfig cfg = SolverConfig::defaults_for(Method::QlnmQqr);
  cfg.rank = rank;
  cfg.max_iter = iters;
  cfg.tol = 0.0;
  const SolverReport report = qlnm_qqr_complete(mask.project(truth), mask, cfg);
  std::vector<double> ms;
  for (const IterationRecord& r : report.history) ms.push_back(1e3 * r.seconds);
  const auto mid = ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2);
  std::nth_element(ms.begin(), mid, ms.end());
  double median = *mid;
  if (ms.size() % 2 == 0) median = 0.5 * (median + *std::max_element(ms.begin(), mid));
  return {size, median};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  set_threads_from_env();

  CLI::App app{"Low-rank quaternion matrix completion for color images", "qmc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CompleteArgs ca;
  CLI::App* complete_cmd = app.add_subcommand("complete", "Restore an image or matrix");
  complete_cmd->add_option("--method", ca.method, "qlnm-qqr | irqlnm-qqr | qlnm-qqr-sr")
      ->check(CLI::IsMember({"qlnm-qqr", "irqlnm-qqr", "qlnm-qqr-sr"}));
  complete_cmd->add_option("--in", ca.input, "Input PNG (ground truth) or .qmat");
  complete_cmd->add_option("--out", ca.output, "Restored PNG or .qmat");
  complete_cmd->add_option("--metrics", ca.metrics, "Metrics JSON");
  complete_cmd->add_option("--manifest", ca.manifest, "Run manifest (default OUT.manifest.json)");
  complete_cmd->add_option("--mask", ca.mask_file, "Mask file (.png or .qmsk)");
  complete_cmd->add_option("--mr", ca.mr, "Missing ratio of a generated mask");
  complete_cmd->add_option("--seed", ca.flags.seed, "Seed of the generated mask");
  complete_cmd->add_option("--rank", ca.flags.rank, "Target rank (required)");
  complete_cmd->add_option("--config", ca.config_file, "TOML file with SolverConfig keys");
  complete_cmd->add_option("--replay", ca.replay, "Rerun from a manifest");
  complete_cmd->add_option("--mu0", ca.flags.mu0);
  complete_cmd->add_option("--rho", ca.flags.rho);
  complete_cmd->add_option("--mu-max", ca.flags.mu_max);
  complete_cmd->add_option("--beta", ca.flags.beta);
  complete_cmd->add_option("--varsigma", ca.flags.varsigma);
  complete_cmd->add_option("--v", ca.flags.v);
  complete_cmd->add_option("--tol", ca.flags.tol);
  complete_cmd->add_option("--max-iter", ca.flags.max_iter);
  complete_cmd->add_option("--qdct-axis", ca.axis, "x,y,z or w,x,y,z");
  complete_cmd->get_option("--mask")->excludes("--mr");

  MaskArgs ma;
  CLI::App* mask_cmd = app.add_subcommand("mask", "Generate a random mask");
  mask_cmd->add_option("--mr", ma.mr, "Missing ratio")->required();
  mask_cmd->add_option("--seed", ma.seed);
  mask_cmd->add_option("--size", ma.size, "N or ROWSxCOLS")->required();
  mask_cmd->add_option("--out", ma.prefix, "Output prefix; writes PREFIX.png and PREFIX.qmsk")
      ->required();

  SynthArgs sa;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a random low-rank QMAT file");
  synth_cmd->add_option("--rows", sa.rows);
  synth_cmd->add_option("--cols", sa.cols);
  synth_cmd->add_option("--size", sa.size, "N or ROWSxCOLS");
  synth_cmd->add_option("--rank", sa.rank)->required();
  synth_cmd->add_option("--seed", sa.seed);
  synth_cmd->add_option("--scale", sa.scale);
  synth_cmd->add_option("--out", sa.output)->required();
  synth_cmd->add_option("--sparse-band", sa.sparse_band,
                        "Add a component whose QDCT is supported on the first rows");
  synth_cmd->add_option("--sparse-density", sa.sparse_density);

  BenchArgs ba;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Per-iteration timing sweep (CSV)");
  bench_cmd->add_option("--sizes", ba.sizes)->delimiter(',');
  bench_cmd->add_option("--rank", ba.rank);
  bench_cmd->add_option("--iters", ba.iters);
  bench_cmd->add_option("--seed", ba.seed);
  bench_cmd->add_option("--out", ba.output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == complete_cmd) return cmd_complete(ca, out, complete_cmd->help(), err);
    if (active == mask_cmd) return cmd_mask(ma, out);
    if (active == synth_cmd) return cmd_synth(sa, out);
    return cmd_bench(ba, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qmc::cli
