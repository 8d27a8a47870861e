// spikekit command-line tool: one subcommand per pipeline stage.
//
// Exit status: 0 success, 1 usage error, 2 I/O or format error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spikekit/spikekit.hpp"

namespace fs = std::filesystem;
using namespace spikekit;

namespace {

// Stream ids that keep the random draws of different stages independent when
// they share one --seed.
enum Stream : std::uint64_t {
  kStreamGamma = 1,
  kStreamKernels = 2,
  kStreamProbNoise = 3,
  kStreamSpikes = 4,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string in;
  std::string ref;
  std::string out;
  float vth = 1.0f;
  bool vth_set = false;
  std::uint32_t t = 0;
  std::uint32_t window = 64;
  float scale = 255.0f;
  std::optional<float> gamma;
  float sigma_s = 1.0f;
  float gamma_c = 1.0f;
  float noise = 0.01f;
  float coverage = 0.1f;
  std::optional<std::uint32_t> frames;
  std::uint32_t kernel_size = kDefaultKernelSize;
  std::uint32_t kernel_count = kDefaultKernelCount;
  std::optional<std::uint32_t> length;
  float angle = 0.0f;
  std::optional<std::uint64_t> seed;
  float max_i = 1.0f;
  std::uint32_t count = 1;
  bool lenient = false;
  bool reject = false;
};

std::uint64_t require_seed(const Options& o, const char* why) {
  if (!o.seed) throw UsageError(std::string("--seed is required ") + why);
  return *o.seed;
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

bool is_image_path(const fs::path& p) {
  const auto ext = p.extension();
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".spkf";
}

// Image files of a directory in lexicographic order.
std::vector<fs::path> list_frames(const fs::path& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_path(entry.path())) paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw Error(ErrorCode::kIo, "no .pgm/.ppm/.spkf frames in " + dir.string());
  return paths;
}

Image load_gray(const fs::path& path) {
  Image img = load_image_file(path);
  return img.channels() == 3 ? grayscale(img) : img;
}

// Reconstruction values are written as-is: .pgm stores them as byte values
// (rounded, clamped to [0, 255]), .spkf stores raw floats.
void write_values(const ReconstructedFrame& frame, const fs::path& path) {
  const bool raw = format_for_path(path) == ImageFormat::kSpkf;
  std::vector<float> v(frame.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<float>(raw ? frame.values[i] : frame.values[i] / 255.0);
  }
  save_image_file(Image(frame.width, frame.height, 1, std::move(v)), path);
}

float stream_vth(const Options& o, const LoadedStream& loaded) {
  if (o.vth_set) return o.vth;
  return loaded.v_th.value_or(1.0f);
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

int cmd_simulate(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  std::vector<IntensityFrame> frames;
  if (fs::is_directory(o.in)) {
    for (const auto& p : list_frames(o.in)) frames.push_back(IntensityFrame::from_image(load_gray(p)));
  } else {
    if (!o.frames) throw UsageError("--frames is required when --in is a single image");
    frames.assign(*o.frames, IntensityFrame::from_image(load_gray(o.in)));
  }
  const auto result = simulate(IntensitySequence(std::move(frames)), {o.vth});
  save_spks_file(result.stream, o.out, o.vth);
  return 0;
}

int cmd_simulate_image(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  const SimulatorConfig cfg{o.vth};
  const auto cal =
      calibrate_coverage(IntensityFrame::from_image(load_gray(o.in)), o.frames.value_or(8), o.coverage, cfg);
  if (cal.clamped) std::cerr << "warning: some scaled intensities exceeded v_th and were clamped\n";
  save_spks_file(simulate(cal.sequence, cfg).stream, o.out, o.vth);
  return 0;
}

int cmd_tfi(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  const auto loaded = load_spks_file(o.in);
  const SimulatorConfig cfg{stream_vth(o, loaded)};
  auto frame = tfi(loaded.stream, o.t, cfg);
  for (double& v : frame.values) v *= o.scale / cfg.v_th;
  write_values(frame, o.out);
  return 0;
}

int cmd_tfp(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  const auto loaded = load_spks_file(o.in);
  write_values(tfp(loaded.stream, o.t, o.window, o.scale), o.out);
  return 0;
}

int cmd_blur_avg(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  auto paths = list_frames(o.in);
  if (o.frames) {
    if (*o.frames == 0 || *o.frames > paths.size()) {
      throw UsageError("--frames must lie in [1, " + std::to_string(paths.size()) + "]");
    }
    paths.resize(*o.frames);
  }
  std::vector<Image> frames;
  for (const auto& p : paths) frames.push_back(load_image_file(p));
  save_image_file(average_blur(frames), o.out);
  return 0;
}

int cmd_blur_kernel(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  const Image img = load_image_file(o.in);
  if (o.length) {
    save_image_file(convolve(img, motion_blur_kernel(*o.length, o.angle, o.kernel_size)), o.out);
    return 0;
  }
  CounterRng rng = CounterRng(require_seed(o, "to draw random blur kernels")).split(kStreamKernels);
  const auto bank = motion_kernel_bank(rng, o.kernel_count, o.kernel_size);
  save_image_file(convolve(img, pick_kernel(bank, rng)), o.out);
  return 0;
}

int cmd_fade(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  MixRatio gamma;
  if (o.gamma) {
    gamma = MixRatio(*o.gamma);
  } else {
    CounterRng rng = CounterRng(require_seed(o, "when --gamma is not given")).split(kStreamGamma);
    gamma = sample_gamma(rng);
  }
  save_image_file(color_fade(load_image_file(o.in), gamma), o.out);
  return 0;
}

int cmd_gamma_sample(const Options& o) {
  CounterRng rng = CounterRng(require_seed(o, "for gamma-sample")).split(kStreamGamma);
  std::ostringstream os;
  os.precision(17);
  for (std::uint32_t i = 0; i < o.count; ++i) {
    os << sample_gamma(rng, o.reject ? Truncation::kReject : Truncation::kClamp).value() << '\n';
  }
  if (o.out.empty()) {
    std::cout << os.str();
  } else {
    const std::string s = os.str();
    write_file(o.out, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }
  return 0;
}

int cmd_probmap(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  const AlignConfig cfg{o.sigma_s, o.gamma_c, o.noise};
  const std::uint64_t seed = o.noise > 0.0f ? require_seed(o, "when --noise is nonzero") : o.seed.value_or(0);
  const auto p = probability_map(load_gray(o.in), cfg, CounterRng(seed).split(kStreamProbNoise));
  save_image_file(p.to_image(), o.out);
  return 0;
}

int cmd_sample_spikes(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  if (!o.frames) throw UsageError("--frames is required");
  const auto p = ProbabilityMap::from_image(load_image_file(o.in));
  const auto stream = sample_spikes(p, *o.frames, CounterRng(require_seed(o, "for sampling")).split(kStreamSpikes));
  save_spks_file(stream, o.out);
  return 0;
}

int cmd_align_loss(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.ref, "--ref");
  const auto p = ProbabilityMap::from_image(load_image_file(o.in));
  const auto gt = load_spks_file(o.ref).stream;
  std::cout << "bce=" << format_double(alignment_loss(p, gt)) << " rate_mse=" << format_double(rate_loss(p, gt))
            << '\n';
  return 0;
}

int cmd_metrics(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.ref, "--ref");
  const auto r = evaluate(load_image_file(o.in), load_image_file(o.ref), o.max_i);
  std::cout << "mse=" << format_double(r.mse)
            << " psnr=" << (r.psnr_db == kPsnrInfinity ? std::string("inf") : format_double(r.psnr_db))
            << " ssim=" << format_double(r.ssim) << '\n';
  return 0;
}

// Directory of PGM frames, any nonzero byte is a spike.
int cmd_pack(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  SpikeStream stream;
  for (const auto& p : list_frames(o.in)) {
    const Image img = load_image_file(p);
    if (img.channels() != 1) throw Error(ErrorCode::kMalformedHeader, p.string() + " is not a grayscale frame");
    std::vector<std::uint8_t> dense(img.pixels());
    for (std::size_t i = 0; i < dense.size(); ++i) dense[i] = img.plane(0)[i] > 0.0f;
    stream.append(SpikeStream::from_dense(img.width(), img.height(), 1, dense));
  }
  save_spks_file(stream, o.out, o.vth_set ? std::optional<float>(o.vth) : std::nullopt);
  return 0;
}

int cmd_unpack(const Options& o) {
  require_path(o.in, "--in");
  require_path(o.out, "--out");
  const auto loaded = load_spks_file(o.in, o.lenient ? PaddingPolicy::kLenient : PaddingPolicy::kStrict);
  const auto& s = loaded.stream;
  fs::create_directories(o.out);
  for (std::size_t t = 0; t < s.t_count(); ++t) {
    Image frame(s.width(), s.height(), 1);
    for (std::size_t i = 0; i < s.pixels(); ++i) frame.plane(0)[i] = s.get(t, i) ? 1.0f : 0.0f;
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", t);
    save_image_file(frame, fs::path(o.out) / name);
  }
  return 0;
}

int cmd_info(const Options& o) {
  require_path(o.in, "--in");
  const auto loaded = load_spks_file(o.in, o.lenient ? PaddingPolicy::kLenient : PaddingPolicy::kStrict);
  const auto& s = loaded.stream;
  std::cout << "width=" << s.width() << " height=" << s.height() << " t_count=" << s.t_count()
            << " coverage=" << format_double(coverage(s))
            << " v_th=" << (loaded.v_th ? format_double(*loaded.v_th) : std::string("none")) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spikekit: spike camera simulation and spike stream processing"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  Options o;
  int (*handler)(const Options&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };
  auto in = [&](CLI::App* s) { s->add_option("--in", o.in, "input path"); };
  auto out = [&](CLI::App* s) { s->add_option("--out", o.out, "output path"); };
  auto vth = [&](CLI::App* s) {
    s->add_option_function<float>(
         "--vth", [&](float v) { o.vth = v, o.vth_set = true; }, "activation threshold")
        ->check(CLI::PositiveNumber);
  };
  auto seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "random seed"); };
  auto frames = [&](CLI::App* s, const char* help) { s->add_option("--frames", o.frames, help); };

  auto* sim = add("simulate", "simulate a directory of intensity frames (or one repeated image)", cmd_simulate);
  in(sim), out(sim), vth(sim), frames(sim, "repeat count when --in is one image");

  auto* simi = add("simulate-image", "coverage-calibrated simulation of a static image", cmd_simulate_image);
  in(simi), out(simi), vth(simi), frames(simi, "number of spike frames (default 8)");
  simi->add_option("--coverage", o.coverage, "target coverage in (0, 1)");

  auto* tfi_cmd = add("tfi", "texture-from-interval reconstruction", cmd_tfi);
  in(tfi_cmd), out(tfi_cmd), vth(tfi_cmd);
  tfi_cmd->add_option("--t", o.t, "query step");
  tfi_cmd->add_option("--scale", o.scale, "output value for a one-step interval (default 255)");

  auto* tfp_cmd = add("tfp", "texture-from-playback reconstruction", cmd_tfp);
  in(tfp_cmd), out(tfp_cmd);
  tfp_cmd->add_option("--t", o.t, "query step");
  tfp_cmd->add_option("--window", o.window, "trailing window length");
  tfp_cmd->add_option("--scale", o.scale, "scale factor C (default 255)");

  auto* bavg = add("blur-avg", "average consecutive frames into a blurred frame", cmd_blur_avg);
  in(bavg), out(bavg), frames(bavg, "number of leading frames to average (default all)");

  auto* bker = add("blur-kernel", "apply a motion-blur kernel", cmd_blur_kernel);
  in(bker), out(bker), seed(bker);
  bker->add_option("--kernel-size", o.kernel_size, "kernel side length");
  bker->add_option("--kernel-count", o.kernel_count, "random kernels drawn per image");
  bker->add_option("--length", o.length, "fixed segment length (skips random kernels)");
  bker->add_option("--angle", o.angle, "segment angle in radians, with --length");

  auto* fade = add("fade", "color-fade an RGB image toward its grayscale version", cmd_fade);
  in(fade), out(fade), seed(fade);
  fade->add_option("--gamma", o.gamma, "mix ratio in [0, 1] (sampled from --seed if absent)");

  auto* gs = add("gamma-sample", "draw modality mix ratios", cmd_gamma_sample);
  out(gs), seed(gs);
  gs->add_option("--count", o.count, "number of samples");
  gs->add_flag("--reject", o.reject, "rejection truncation instead of clamping");

  auto* pm = add("probmap", "firing probability map from a predicted image", cmd_probmap);
  in(pm), out(pm), seed(pm);
  pm->add_option("--sigma-s", o.sigma_s, "Gaussian smoothing std");
  pm->add_option("--gamma-c", o.gamma_c, "gamma-correction exponent");
  pm->add_option("--noise", o.noise, "uniform noise half-width");

  auto* ss = add("sample-spikes", "Bernoulli spike stream from a probability map", cmd_sample_spikes);
  in(ss), out(ss), seed(ss), frames(ss, "number of spike frames");

  auto* al = add("align-loss", "score a probability map against a spike stream", cmd_align_loss);
  in(al);
  al->add_option("--ref", o.ref, "ground-truth .spks stream");

  auto* met = add("metrics", "MSE / PSNR / SSIM between two images", cmd_metrics);
  in(met);
  met->add_option("--ref", o.ref, "reference image");
  met->add_option("--max-i", o.max_i, "maximum pixel value of the loaded data (default 1)");

  auto* pack = add("pack", "pack a directory of binary PGM frames into .spks", cmd_pack);
  in(pack), out(pack), vth(pack);

  auto* unpack = add("unpack", "expand a .spks stream into PGM frames", cmd_unpack);
  in(unpack), out(unpack);
  unpack->add_flag("--lenient", o.lenient, "clear nonzero padding bits instead of failing");

  auto* info = add("info", "print stream dimensions and coverage", cmd_info);
  info->add_option("path", o.in, "stream file");
  in(info);
  info->add_flag("--lenient", o.lenient, "clear nonzero padding bits instead of failing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return handler(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kOutOfRange;
    return usage ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
