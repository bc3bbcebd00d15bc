/*
Copyright 2026 The tmpi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "tmpi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include "tmpi/ablation.hpp"
#include "tmpi/camera_io.hpp"
#include "tmpi/image_io.hpp"
#include "tmpi/metrics.hpp"
#include "tmpi/mpigen.hpp"
#include "tmpi/render.hpp"
#include "tmpi/tmpi_file.hpp"

namespace tmpi {

namespace {

struct GenerateArgs {
  std::string image;
  std::string depth;
  std::string out;
  std::string camera;
  int tile_size = 64;
  int planes = 4;
  int stride = 0;
  std::string confidence = "robust";
  int soften = 1;
  std::uint64_t seed = 0;
  int restarts = 4;
  double depth_scale = 1.0;
  int threads = 0;
};

struct RenderArgs {
  std::string tmpi;
  std::string camera;
  std::string out;
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int threads = 0;
};

struct RenderPathArgs {
  std::string tmpi;
  std::string path;
  std::string out_dir;
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  int threads = 0;
};

struct MetricsArgs {
  std::string a;
  std::string b;
  double crop = 0.15;
};

struct AblateArgs {
  int tiles = 100;
  int tile_size = 64;
  int planes = 4;
  int restarts = 4;
  std::uint64_t seed = 0;
  int threads = 0;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int do_generate(const GenerateArgs& a, std::ostream& out) {
  const Image image = load_image(a.image);
  const DepthLoadResult depth = load_depth(a.depth, a.depth_scale);
  if (depth.repaired > 0) {
    out << "repaired " << depth.repaired << " invalid depth pixels\n";
  }
  TmpiConfig config;
  config.tile_size = a.tile_size;
  config.stride = a.stride;
  config.planes = a.planes;
  config.restarts = a.restarts;
  config.soften_radius = a.soften;
  config.confidence = a.confidence == "uniform" ? ConfidenceMode::kUniform : ConfidenceMode::kRobust;
  config.seed = a.seed;
  config.threads = a.threads;
  std::optional<Camera> camera;
  if (!a.camera.empty()) camera = read_cameras(a.camera).front();
  const TiledMpi tmpi = build_tmpi(image, depth.depth, config, camera);
  write_tmpi(tmpi, a.out);
  out << "wrote " << a.out << ": " << tmpi.tiles.size() << " tiles, h=" << tmpi.grid.tile_size()
      << ", r=" << tmpi.grid.stride() << ", n=" << tmpi.max_planes << "\n";
  return 0;
}

int do_render(const RenderArgs& a, std::ostream& out) {
  const TiledMpi tmpi = read_tmpi(a.tmpi);
  const Camera camera = a.camera.empty() ? tmpi.source_camera : read_cameras(a.camera).front();
  RenderTask task{&tmpi, camera, a.width > 0 ? a.width : tmpi.grid.image_width(),
                  a.height > 0 ? a.height : tmpi.grid.image_height()};
  task.threads = a.threads;
  save_png(render_tmpi(task), a.out, a.bit_depth);
  out << "wrote " << a.out << "\n";
  return 0;
}

int do_render_path(const RenderPathArgs& a, std::ostream& out) {
  const TiledMpi tmpi = read_tmpi(a.tmpi);
  const std::vector<Camera> cameras = read_cameras(a.path);
  const int w = a.width > 0 ? a.width : tmpi.grid.image_width();
  const int h = a.height > 0 ? a.height : tmpi.grid.image_height();
  std::filesystem::create_directories(a.out_dir);
  const std::vector<Image> frames = render_path(tmpi, cameras, w, h, a.threads);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.png", i);
    save_png(frames[i], std::filesystem::path(a.out_dir) / name, a.bit_depth);
  }
  out << "wrote " << frames.size() << " frames to " << a.out_dir << "\n";
  return 0;
}

int do_metrics(const MetricsArgs& a, std::ostream& out) {
  Image ia = load_image(a.a);
  Image ib = load_image(a.b);
  // Compare color content when one side carries alpha or is gray.
  if (ia.channels() != ib.channels()) {
    ia = Image(to_rgb(ia));
    ib = Image(to_rgb(ib));
  }
  const Metrics m = compute_metrics(ia, ib, a.crop);
  out << "psnr " << (m.psnr_infinite ? std::string("inf") : format_number(m.psnr)) << "\n";
  out << "ssim " << format_number(m.ssim) << "\n";
  out << "l1 " << format_number(m.l1) << "\n";
  return 0;
}

int do_info(const std::string& path, std::ostream& out) {
  const TiledMpi tmpi = read_tmpi(path);
  const TileGrid& g = tmpi.grid;
  const Camera& c = tmpi.source_camera;
  std::size_t stored_planes = 0;
  for (const TileMpi& t : tmpi.tiles) stored_planes += t.planes.size();
  const std::size_t tiled = texture_scalars(tmpi);
  const std::size_t full = monolithic_scalars(g.image_width(), g.image_height(), 32);
  out << "version " << kTmpiVersion << "\n";
  out << "image " << g.image_width() << "x" << g.image_height() << "\n";
  out << "tile_size " << g.tile_size() << "\n";
  out << "stride " << g.stride() << "\n";
  out << "grid " << g.columns() << "x" << g.rows() << "\n";
  out << "tiles " << tmpi.tiles.size() << "\n";
  out << "max_planes " << tmpi.max_planes << "\n";
  out << "stored_planes " << stored_planes << "\n";
  out << "camera fx=" << format_number(c.fx()) << " fy=" << format_number(c.fy())
      << " cx=" << format_number(c.cx()) << " cy=" << format_number(c.cy()) << "\n";
  out << "rgba_scalars " << tiled << "\n";
  out << "monolithic_32_plane_scalars " << full << "\n";
  out << "memory_ratio " << format_number(static_cast<double>(tiled) / static_cast<double>(full))
      << "\n";
  return 0;
}

int do_ablate(const AblateArgs& a, std::ostream& out) {
  AblationConfig config;
  config.tiles = a.tiles;
  config.tile_size = a.tile_size;
  config.planes = a.planes;
  config.restarts = a.restarts;
  config.seed = a.seed;
  config.threads = a.threads;
  out << format_ablation_table(run_placement_ablation(config));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tiled multiplane image generation and rendering", "tmpi"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build a TMPI file from an image and a depth map");
  generate->add_option("--image", gen.image, "Color image (PNG, PGM, PPM)")->required();
  generate->add_option("--depth", gen.depth, "Depth map (PFM, or 16-bit PNG/PGM with --depth-scale)")
      ->required();
  generate->add_option("--out", gen.out, "Output .tmpi path")->required();
  generate->add_option("--camera", gen.camera, "Source camera file (first line is used)");
  generate->add_option("--tile-size", gen.tile_size, "Tile size h")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--planes", gen.planes, "Planes per tile")
      ->capture_default_str()
      ->check(CLI::Range(1, 65535));
  generate->add_option("--stride", gen.stride, "Tile stride r (default h - h/8)")
      ->check(CLI::PositiveNumber);
  generate->add_option("--confidence", gen.confidence, "Confidence weighting")
      ->capture_default_str()
      ->check(CLI::IsMember({"robust", "uniform"}));
  generate->add_option("--soften", gen.soften, "Alpha softening radius")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str()->envname("TMPI_SEED");
  generate->add_option("--restarts", gen.restarts, "k-means restarts per tile")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--depth-scale", gen.depth_scale, "Multiplier applied to raw depth values")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--threads", gen.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Render a TMPI from one camera");
  render->add_option("--tmpi", ren.tmpi, "Input .tmpi")->required();
  render->add_option("--camera", ren.camera, "Camera file (first line); default is the source camera");
  render->add_option("--out", ren.out, "Output PNG")->required();
  render->add_option("--width", ren.width, "Output width")->check(CLI::PositiveNumber);
  render->add_option("--height", ren.height, "Output height")->check(CLI::PositiveNumber);
  render->add_option("--bit-depth", ren.bit_depth, "PNG bit depth")
      ->capture_default_str()
      ->check(CLI::IsMember({8, 16}));
  render->add_option("--threads", ren.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  RenderPathArgs path;
  auto* render_path_cmd = app.add_subcommand("render-path", "Render one frame per camera in a path file");
  render_path_cmd->add_option("--tmpi", path.tmpi, "Input .tmpi")->required();
  render_path_cmd->add_option("--path", path.path, "Camera path file")->required();
  render_path_cmd->add_option("--out-dir", path.out_dir, "Directory for frame_NNNN.png")->required();
  render_path_cmd->add_option("--width", path.width, "Output width")->check(CLI::PositiveNumber);
  render_path_cmd->add_option("--height", path.height, "Output height")->check(CLI::PositiveNumber);
  render_path_cmd->add_option("--bit-depth", path.bit_depth, "PNG bit depth")
      ->capture_default_str()
      ->check(CLI::IsMember({8, 16}));
  render_path_cmd->add_option("--threads", path.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "PSNR, SSIM and L1 between two images");
  metrics->add_option("--a", met.a, "First image")->required();
  metrics->add_option("--b", met.b, "Second image")->required();
  metrics->add_option("--crop", met.crop, "Border fraction excluded on each side")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 0.4999999));

  std::string info_path;
  auto* info = app.add_subcommand("info", "Print TMPI header and memory use");
  info->add_option("tmpi", info_path, "Input .tmpi")->required();

  AblateArgs abl;
  auto* ablate = app.add_subcommand("ablate", "Compare plane placement strategies on synthetic tiles");
  ablate->add_option("--tiles", abl.tiles, "Number of synthetic tiles")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ablate->add_option("--tile-size", abl.tile_size, "Tile size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ablate->add_option("--planes", abl.planes, "Planes per tile")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ablate->add_option("--restarts", abl.restarts, "k-means restarts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ablate->add_option("--seed", abl.seed, "Random seed")->capture_default_str()->envname("TMPI_SEED");
  ablate->add_option("--threads", abl.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      if (gen.stride == 0) gen.stride = default_stride(gen.tile_size);
      return do_generate(gen, out);
    }
    if (render->parsed()) return do_render(ren, out);
    if (render_path_cmd->parsed()) return do_render_path(path, out);
    if (metrics->parsed()) return do_metrics(met, out);
    if (info->parsed()) return do_info(info_path, out);
    if (ablate->parsed()) return do_ablate(abl, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tmpi
