# Copyright 2026 The tmpi Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS-IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Tiled multiplane images: build from an image and depth map, render novel views."""

from ._tmpi import (
    Camera,
    ImageIoError,
    TileGrid,
    TiledMpi,
    TmpiFormatError,
    build_tmpi,
    compute_metrics,
    decode_tmpi,
    default_camera,
    default_stride,
    encode_tmpi,
    estimate_confidence,
    linear_disparity_planes,
    load_depth,
    load_image,
    make_grid,
    place_planes,
    placement_ablation,
    read_tmpi,
    render,
    save_pfm,
    save_png,
    weighted_kmeans,
    write_tmpi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
