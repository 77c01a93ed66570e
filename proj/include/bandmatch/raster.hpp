#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bandmatch/error.hpp"

namespace bandmatch {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Band { red, green, blue };

inline constexpr std::array<Band, 3> kAllBands{Band::red, Band::green, Band::blue};

std::string_view to_string(Band band) noexcept;

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangle in pixel coordinates; (x, y) is the top-left corner.
struct Roi {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    long area() const noexcept { return static_cast<long>(w) * h; }
    int right() const noexcept { return x + w; }   // exclusive
    int bottom() const noexcept { return y + h; }  // exclusive

    bool fits_in(int width, int height) const noexcept {
        return w >= 1 && h >= 1 && x >= 0 && y >= 0 && x + w <= width && y + h <= height;
    }
    bool contains(const Roi& other) const noexcept {
        return other.w >= 1 && other.h >= 1 && other.x >= x && other.y >= y &&
               other.right() <= right() && other.bottom() <= bottom();
    }

    friend bool operator==(const Roi&, const Roi&) = default;
};

/// Throws Errc::out_of_bounds unless roi is non-empty and inside width x height.
void require_inside(const Roi& roi, int width, int height);

/// Row-major image with (0,0) at the top-left. Instances are immutable once
/// constructed; every operation in the library returns a new raster.
template <typename Pixel>
class Raster {
public:
    using pixel_type = Pixel;

    Raster(int width, int height, Pixel fill = Pixel{})
        : width_(width), height_(height) {
        check_dims();
        pixels_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    Raster(int width, int height, std::vector<Pixel> pixels)
        : width_(width), height_(height), pixels_(std::move(pixels)) {
        check_dims();
        if (pixels_.size() != static_cast<std::size_t>(width) * height)
            throw Error(Errc::dimension_mismatch, "pixel count does not match width x height");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Roi bounds() const noexcept { return {0, 0, width_, height_}; }
    std::size_t size() const noexcept { return pixels_.size(); }

    const Pixel& at(int x, int y) const noexcept {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::span<const Pixel> pixels() const noexcept { return pixels_; }
    std::span<const Pixel> row(int y) const noexcept {
        return std::span<const Pixel>(pixels_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    bool same_size(const Raster& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    void check_dims() const {
        if (width_ < 1 || height_ < 1)
            throw Error(Errc::invalid_argument, "raster dimensions must be positive");
    }

    int width_;
    int height_;
    std::vector<Pixel> pixels_;
};

class RgbImage : public Raster<Rgb> {
public:
    using Raster::Raster;
};

class GrayImage : public Raster<std::uint8_t> {
public:
    using Raster::Raster;
};

/// Pixels are strictly 0 or 1; construction rejects anything else.
class BinaryImage : public Raster<std::uint8_t> {
public:
    BinaryImage(int width, int height, bool fill = false)
        : Raster(width, height, static_cast<std::uint8_t>(fill)) {}
    BinaryImage(int width, int height, std::vector<std::uint8_t> pixels);
};

struct Histogram {
    std::array<std::uint64_t, 256> bins{};

    std::uint64_t total() const noexcept;
};

GrayImage to_gray(const RgbImage& img);
GrayImage extract_band(const RgbImage& img, Band band);
GrayImage abs_diff(const GrayImage& a, const GrayImage& b);
double mean_intensity(const GrayImage& img, const Roi& roi);
Histogram histogram(const GrayImage& img, const Roi& roi);

/// Sub-raster copy; rect must lie inside img.
template <typename Image>
Image crop(const Image& img, const Roi& rect) {
    require_inside(rect, img.width(), img.height());
    std::vector<typename Image::pixel_type> out;
    out.reserve(static_cast<std::size_t>(rect.area()));
    for (int y = rect.y; y < rect.bottom(); ++y) {
        auto row = img.row(y).subspan(rect.x, rect.w);
        out.insert(out.end(), row.begin(), row.end());
    }
    return Image(rect.w, rect.h, std::move(out));
}

} // namespace bandmatch
