#include "bandmatch/synthetic.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace bandmatch::synth {

namespace {

struct Box {
    int x, y, w, h;
};

BinaryImage silhouette(int body_w, int body_h, std::initializer_list<Box> parts) {
    const int w = body_w + 2 * kMaskMargin;
    const int h = body_h + 2 * kMaskMargin;
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h, 0);
    for (const Box& b : parts)
        for (int y = b.y; y < b.y + b.h; ++y)
            for (int x = b.x; x < b.x + b.w; ++x)
                px[static_cast<std::size_t>(y + kMaskMargin) * w + x + kMaskMargin] = 1;
    return BinaryImage(w, h, std::move(px));
}

} // namespace

BinaryImage vehicle_mask(std::string_view label) {
    if (label == "car")  // cabin over a wider body
        return silhouette(40, 18, {{9, 0, 22, 8}, {0, 8, 40, 10}});
    if (label == "van")
        return silhouette(48, 30, {{0, 0, 48, 30}});
    if (label == "lorry1")  // low cab, gap, box
        return silhouette(66, 26, {{0, 6, 14, 20}, {16, 0, 50, 26}});
    if (label == "lorry2")  // cab, gap, long trailer
        return silhouette(109, 36, {{0, 12, 16, 24}, {19, 0, 90, 36}});
    throw Error(Errc::unknown_label, fmt::format("no synthetic silhouette for '{}'", label));
}

std::vector<Template> class_templates() {
    std::vector<Template> out;
    for (auto label : kDefaultClasses)
        out.emplace_back(vehicle_mask(label), std::string(label), Provenance{},
                         fmt::format("synthetic_{}", label));
    return out;
}

BinaryImage salt_and_pepper(const BinaryImage& img, double rate, std::mt19937_64& rng) {
    std::bernoulli_distribution flip(rate);
    std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
    for (auto& v : px)
        if (flip(rng))
            v ^= 1;
    return BinaryImage(img.width(), img.height(), std::move(px));
}

RgbImage road_background(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> grain(-6, 6);
    std::vector<Rgb> px(static_cast<std::size_t>(width) * height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int base = 92 + (y * 20) / height + grain(rng);
            // Dashed lane markings every 160 columns.
            const bool marking = (x % 160) < 3 && (y / 24) % 2 == 0;
            const int v = marking ? 210 : base;
            px[static_cast<std::size_t>(y) * width + x] = {
                static_cast<std::uint8_t>(std::clamp(v - 2, 0, 255)),
                static_cast<std::uint8_t>(std::clamp(v, 0, 255)),
                static_cast<std::uint8_t>(std::clamp(v + 3, 0, 255))};
        }
    }
    return RgbImage(width, height, std::move(px));
}

RgbImage paint(const RgbImage& scene, const BinaryImage& mask, Point at, Rgb colour) {
    require_inside({at.x, at.y, mask.width(), mask.height()}, scene.width(), scene.height());
    std::vector<Rgb> px(scene.pixels().begin(), scene.pixels().end());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y))
                px[static_cast<std::size_t>(at.y + y) * scene.width() + at.x + x] = colour;
    return RgbImage(scene.width(), scene.height(), std::move(px));
}

RgbImage paint_band(const RgbImage& scene, const BinaryImage& mask, Point at, Band band,
                    int delta) {
    require_inside({at.x, at.y, mask.width(), mask.height()}, scene.width(), scene.height());
    std::vector<Rgb> px(scene.pixels().begin(), scene.pixels().end());
    auto bump = [delta](std::uint8_t v) {
        return static_cast<std::uint8_t>(std::clamp(int{v} + delta, 0, 255));
    };
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y))
                continue;
            Rgb& p = px[static_cast<std::size_t>(at.y + y) * scene.width() + at.x + x];
            switch (band) {
            case Band::red: p.r = bump(p.r); break;
            case Band::green: p.g = bump(p.g); break;
            case Band::blue: p.b = bump(p.b); break;
            }
        }
    }
    return RgbImage(scene.width(), scene.height(), std::move(px));
}

} // namespace bandmatch::synth
