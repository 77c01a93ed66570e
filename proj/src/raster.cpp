#include "bandmatch/raster.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include <fmt/format.h>

namespace bandmatch {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::out_of_bounds: return "out_of_bounds";
    case Errc::empty_model: return "empty_model";
    case Errc::empty_histogram: return "empty_histogram";
    case Errc::degenerate_template: return "degenerate_template";
    case Errc::degenerate_ratio: return "degenerate_ratio";
    case Errc::degenerate_normalization: return "degenerate_normalization";
    case Errc::empty_input: return "empty_input";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::unknown_label: return "unknown_label";
    case Errc::orphan_entry: return "orphan_entry";
    case Errc::unsupported_format: return "unsupported_format";
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::not_found: return "not_found";
    }
    return "unknown";
}

std::string_view to_string(Band band) noexcept {
    switch (band) {
    case Band::red: return "red";
    case Band::green: return "green";
    case Band::blue: return "blue";
    }
    return "?";
}

void require_inside(const Roi& roi, int width, int height) {
    if (!roi.fits_in(width, height))
        throw Error(Errc::out_of_bounds,
                    fmt::format("region {},{},{}x{} is not inside a {}x{} image", roi.x, roi.y,
                                roi.w, roi.h, width, height));
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> pixels)
    : Raster(width, height, std::move(pixels)) {
    auto px = this->pixels();
    if (std::any_of(px.begin(), px.end(), [](std::uint8_t v) { return v > 1; }))
        throw Error(Errc::invalid_argument, "binary image pixels must be 0 or 1");
}

std::uint64_t Histogram::total() const noexcept {
    return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0});
}

GrayImage to_gray(const RgbImage& img) {
    std::vector<std::uint8_t> out(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), out.begin(), [](const Rgb& p) {
        return static_cast<std::uint8_t>((unsigned{p.r} + p.g + p.b) / 3);
    });
    return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage extract_band(const RgbImage& img, Band band) {
    std::vector<std::uint8_t> out(img.size());
    auto pick = [band](const Rgb& p) -> std::uint8_t {
        switch (band) {
        case Band::red: return p.r;
        case Band::green: return p.g;
        case Band::blue: return p.b;
        }
        return 0;
    };
    std::transform(img.pixels().begin(), img.pixels().end(), out.begin(), pick);
    return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage abs_diff(const GrayImage& a, const GrayImage& b) {
    if (!a.same_size(b))
        throw Error(Errc::dimension_mismatch,
                    fmt::format("cannot difference a {}x{} raster with a {}x{} raster", a.width(),
                                a.height(), b.width(), b.height()));
    std::vector<std::uint8_t> out(a.size());
    std::transform(a.pixels().begin(), a.pixels().end(), b.pixels().begin(), out.begin(),
                   [](std::uint8_t p, std::uint8_t q) {
                       return static_cast<std::uint8_t>(std::abs(int{p} - int{q}));
                   });
    return GrayImage(a.width(), a.height(), std::move(out));
}

double mean_intensity(const GrayImage& img, const Roi& roi) {
    require_inside(roi, img.width(), img.height());
    std::uint64_t sum = 0;
    for (int y = roi.y; y < roi.bottom(); ++y) {
        auto row = img.row(y).subspan(roi.x, roi.w);
        sum = std::accumulate(row.begin(), row.end(), sum);
    }
    return static_cast<double>(sum) / static_cast<double>(roi.area());
}

Histogram histogram(const GrayImage& img, const Roi& roi) {
    require_inside(roi, img.width(), img.height());
    Histogram h;
    for (int y = roi.y; y < roi.bottom(); ++y)
        for (std::uint8_t v : img.row(y).subspan(roi.x, roi.w))
            ++h.bins[v];
    return h;
}

} // namespace bandmatch
