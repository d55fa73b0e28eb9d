/* Copyright 2026 The potts-sl Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef POTTS_SL_IMAGE_HPP_
#define POTTS_SL_IMAGE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace potts_sl {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit RGB raster, row-major.
class Image {
 public:
  Image(int height, int width, Rgb fill = {});
  Image(int height, int width, std::vector<Rgb> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return pixels_.size(); }

  const Rgb& at(std::size_t i) const { return pixels_[i]; }
  Rgb& at(std::size_t i) { return pixels_[i]; }
  const Rgb& at(int row, int col) const {
    return pixels_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(col)];
  }
  Rgb& at(int row, int col) {
    return pixels_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(col)];
  }
  const std::vector<Rgb>& pixels() const { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_;
  int width_;
  std::vector<Rgb> pixels_;
};

}  // namespace potts_sl

#endif  // POTTS_SL_IMAGE_HPP_
