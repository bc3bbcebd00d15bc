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

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <string>

#include "tmpi/ablation.hpp"
#include "tmpi/image_io.hpp"
#include "tmpi/metrics.hpp"
#include "tmpi/mpigen.hpp"
#include "tmpi/placement.hpp"
#include "tmpi/render.hpp"
#include "tmpi/tiling.hpp"
#include "tmpi/tmpi_file.hpp"

namespace py = pybind11;
using namespace tmpi;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) float32 array to a raster.
Raster to_raster(const FloatArray& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw std::invalid_argument("expected a 2-D or 3-D array");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  std::vector<float> data(a.data(), a.data() + a.size());
  return Raster(w, h, c, std::move(data));
}

py::array_t<float> to_array(const Raster& r, bool squeeze = false) {
  std::vector<py::ssize_t> shape = {r.height(), r.width()};
  if (!(squeeze && r.channels() == 1)) shape.push_back(r.channels());
  py::array_t<float> out(shape);
  std::memcpy(out.mutable_data(), r.data().data(), r.size() * sizeof(float));
  return out;
}

py::dict cluster_dict(const Raster& depth, const ClusterResult& r) {
  py::array_t<int> labels({depth.height(), depth.width()});
  std::memcpy(labels.mutable_data(), r.labels.labels.data(), r.labels.labels.size() * sizeof(int));
  py::dict d;
  d["planes"] = r.planes.depths;
  d["labels"] = labels;
  d["inertia"] = r.inertia;
  d["iterations"] = r.iterations;
  d["inertia_history"] = r.inertia_history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tmpi, m) {
  m.doc() = "Tiled multiplane images: generation, rendering, file I/O and metrics";

  py::register_exception<TmpiFormatError>(m, "TmpiFormatError", PyExc_ValueError);
  py::register_exception<ImageIoError>(m, "ImageIoError", PyExc_OSError);

  py::class_<Camera>(m, "Camera")
      .def(py::init<double, double, double, double, const Eigen::Matrix3d&, const Eigen::Vector3d&>(),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"),
           py::arg("rotation") = Eigen::Matrix3d::Identity(),
           py::arg("translation") = Eigen::Vector3d::Zero())
      .def_property_readonly("fx", &Camera::fx)
      .def_property_readonly("fy", &Camera::fy)
      .def_property_readonly("cx", &Camera::cx)
      .def_property_readonly("cy", &Camera::cy)
      .def_property_readonly("rotation", &Camera::rotation)
      .def_property_readonly("translation", &Camera::translation)
      .def_property_readonly("center", &Camera::center)
      .def("moved_by", &Camera::moved_by, py::arg("offset"))
      .def("project", &Camera::project)
      .def("__eq__", [](const Camera& a, const Camera& b) { return a == b; })
      .def("__repr__", [](const Camera& c) {
        return "Camera(fx=" + std::to_string(c.fx()) + ", fy=" + std::to_string(c.fy()) +
               ", cx=" + std::to_string(c.cx()) + ", cy=" + std::to_string(c.cy()) + ")";
      });
  m.def("default_camera", &default_camera, py::arg("width"), py::arg("height"));

  py::class_<TileGrid>(m, "TileGrid")
      .def_property_readonly("tile_size", &TileGrid::tile_size)
      .def_property_readonly("stride", &TileGrid::stride)
      .def_property_readonly("image_width", &TileGrid::image_width)
      .def_property_readonly("image_height", &TileGrid::image_height)
      .def_property_readonly("column_origins", &TileGrid::column_origins)
      .def_property_readonly("row_origins", &TileGrid::row_origins)
      .def_property_readonly("tile_count", &TileGrid::tile_count)
      .def("origin", [](const TileGrid& g, std::size_t i) {
        const TileOrigin o = g.origin(i);
        return py::make_tuple(o.x, o.y);
      });
  m.def("make_grid", &make_grid, py::arg("width"), py::arg("height"), py::arg("tile_size"),
        py::arg("stride"));
  m.def("default_stride", &default_stride, py::arg("tile_size"));

  m.def(
      "linear_disparity_planes",
      [](double lo, double hi, int n) { return linear_disparity_planes(lo, hi, n).depths; },
      py::arg("d_min"), py::arg("d_max"), py::arg("n"));
  m.def(
      "weighted_kmeans",
      [](const FloatArray& depth, const FloatArray& weights, int n) {
        const Raster d = to_raster(depth);
        return cluster_dict(d, weighted_kmeans(d, to_raster(weights), n));
      },
      py::arg("depth"), py::arg("weights"), py::arg("n"));
  m.def(
      "place_planes",
      [](const FloatArray& depth, const FloatArray& confidence, int n, int restarts,
         std::uint64_t seed) {
        const Raster d = to_raster(depth);
        return cluster_dict(d, place_planes(d, to_raster(confidence), n, restarts, seed));
      },
      py::arg("depth"), py::arg("confidence"), py::arg("n"), py::arg("restarts") = 4,
      py::arg("seed") = 0);
  m.def(
      "estimate_confidence",
      [](const FloatArray& depth, int window, double scale) {
        return to_array(estimate_confidence(to_raster(depth), window, scale), true);
      },
      py::arg("depth"), py::arg("window") = 5, py::arg("scale"));

  py::class_<TiledMpi>(m, "TiledMpi")
      .def_readonly("grid", &TiledMpi::grid)
      .def_readonly("max_planes", &TiledMpi::max_planes)
      .def_readonly("source_camera", &TiledMpi::source_camera)
      .def_property_readonly("tile_count", [](const TiledMpi& t) { return t.tiles.size(); })
      .def("plane_counts",
           [](const TiledMpi& t) {
             std::vector<std::size_t> out;
             for (const auto& tile : t.tiles) out.push_back(tile.planes.size());
             return out;
           })
      .def("plane_depths",
           [](const TiledMpi& t, std::size_t i) {
             std::vector<float> out;
             for (const auto& p : t.tiles.at(i).planes) out.push_back(p.depth);
             return out;
           })
      .def("texture_scalars", &texture_scalars);

  m.def(
      "build_tmpi",
      [](const FloatArray& image, const FloatArray& depth, int tile_size, int stride, int planes,
         int restarts, int soften_radius, const std::string& confidence, std::uint64_t seed,
         int threads, std::optional<Camera> camera) {
        if (confidence != "robust" && confidence != "uniform") {
          throw std::invalid_argument("confidence must be 'robust' or 'uniform'");
        }
        TmpiConfig cfg;
        cfg.tile_size = tile_size;
        cfg.stride = stride;
        cfg.planes = planes;
        cfg.restarts = restarts;
        cfg.soften_radius = soften_radius;
        cfg.confidence = confidence == "uniform" ? ConfidenceMode::kUniform : ConfidenceMode::kRobust;
        cfg.seed = seed;
        cfg.threads = threads;
        const Image img(to_raster(image));
        const DepthMap d(to_raster(depth));
        py::gil_scoped_release release;
        return build_tmpi(img, d, cfg, camera);
      },
      py::arg("image"), py::arg("depth"), py::arg("tile_size") = 64, py::arg("stride") = 0,
      py::arg("planes") = 4, py::arg("restarts") = 4, py::arg("soften_radius") = 1,
      py::arg("confidence") = "robust", py::arg("seed") = 0, py::arg("threads") = 0,
      py::arg("camera") = py::none());

  m.def(
      "render",
      [](const TiledMpi& t, const Camera& camera, int width, int height, int threads) {
        RenderTask task{&t, camera, width > 0 ? width : t.grid.image_width(),
                        height > 0 ? height : t.grid.image_height()};
        task.threads = threads;
        Image out;
        {
          py::gil_scoped_release release;
          out = render_tmpi(task);
        }
        return to_array(out.raster());
      },
      py::arg("tmpi"), py::arg("camera"), py::arg("width") = 0, py::arg("height") = 0,
      py::arg("threads") = 0);

  m.def(
      "compute_metrics",
      [](const FloatArray& a, const FloatArray& b, double crop) {
        const Metrics r = compute_metrics(Image(to_raster(a)), Image(to_raster(b)), crop);
        py::dict d;
        d["psnr"] = r.psnr;
        d["psnr_infinite"] = r.psnr_infinite;
        d["ssim"] = r.ssim;
        d["l1"] = r.l1;
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("crop") = 0.15);

  m.def("write_tmpi", &write_tmpi, py::arg("tmpi"), py::arg("path"));
  m.def("read_tmpi", &read_tmpi, py::arg("path"));
  m.def("encode_tmpi", [](const TiledMpi& t) {
    const auto bytes = encode_tmpi(t);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  });
  m.def("decode_tmpi", [](const py::bytes& b) {
    const std::string s = b;
    return decode_tmpi(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  });

  m.def(
      "load_image", [](const std::filesystem::path& p) { return to_array(load_image(p).raster()); },
      py::arg("path"));
  m.def(
      "load_depth",
      [](const std::filesystem::path& p, double scale) {
        const DepthLoadResult r = load_depth(p, scale);
        return py::make_tuple(to_array(r.depth.raster(), true), r.repaired);
      },
      py::arg("path"), py::arg("scale") = 1.0);
  m.def(
      "save_png",
      [](const FloatArray& image, const std::filesystem::path& p, int bit_depth) {
        save_png(Image(to_raster(image)), p, bit_depth);
      },
      py::arg("image"), py::arg("path"), py::arg("bit_depth") = 8);
  m.def(
      "save_pfm",
      [](const FloatArray& depth, const std::filesystem::path& p) { save_pfm(to_raster(depth), p); },
      py::arg("depth"), py::arg("path"));

  m.def(
      "placement_ablation",
      [](int tiles, int tile_size, int planes, std::uint64_t seed, int threads) {
        AblationConfig cfg;
        cfg.tiles = tiles;
        cfg.tile_size = tile_size;
        cfg.planes = planes;
        cfg.seed = seed;
        cfg.threads = threads;
        const AblationResult r = run_placement_ablation(cfg);
        py::dict d;
        for (const AblationRow& row : r.rows) d[py::str(row.method)] = row.mean_l1;
        return d;
      },
      py::arg("tiles") = 100, py::arg("tile_size") = 64, py::arg("planes") = 4,
      py::arg("seed") = 0, py::arg("threads") = 0);
}
