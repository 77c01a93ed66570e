#include "bandmatch/bandselect.hpp"

#include <fmt/format.h>

namespace bandmatch {

namespace {

// Largest of three values; ties resolve to the earlier band (R > G > B).
Band argmax(double r, double g, double b) noexcept {
    Band best = Band::red;
    double v = r;
    if (g > v) {
        best = Band::green;
        v = g;
    }
    if (b > v)
        best = Band::blue;
    return best;
}

double channel(const Rgb& p, Band band) noexcept {
    switch (band) {
    case Band::red: return p.r;
    case Band::green: return p.g;
    case Band::blue: return p.b;
    }
    return 0.0;
}

} // namespace

const GrayImage& BandDeltas::band(Band which) const noexcept {
    switch (which) {
    case Band::red: return r;
    case Band::green: return g;
    case Band::blue: return b;
    }
    return r;
}

double BandAverages::value(Band which) const noexcept {
    switch (which) {
    case Band::red: return r;
    case Band::green: return g;
    case Band::blue: return b;
    }
    return r;
}

CttVariances CttVariances::from_sums(double vr, double vg, double vb) {
    CttVariances v{vr, vg, vb, std::nullopt};
    const double sum = vr + vg + vb;
    if (sum > 0.0)
        v.normalized = std::array<double, 3>{vr / sum, vg / sum, vb / sum};
    return v;
}

const std::array<double, 3>& CttVariances::require_normalized() const {
    if (!normalized)
        throw Error(Errc::degenerate_normalization,
                    "all band variances are zero; sample areas are identical");
    return *normalized;
}

BandDeltas band_deltas(const RgbImage& background, const RgbImage& frame) {
    if (!background.same_size(frame))
        throw Error(Errc::dimension_mismatch,
                    fmt::format("background is {}x{}, frame is {}x{}", background.width(),
                                background.height(), frame.width(), frame.height()));
    return {abs_diff(extract_band(background, Band::red), extract_band(frame, Band::red)),
            abs_diff(extract_band(background, Band::green), extract_band(frame, Band::green)),
            abs_diff(extract_band(background, Band::blue), extract_band(frame, Band::blue))};
}

BandAverages band_averages(const BandDeltas& deltas, const Roi& roi) {
    return {mean_intensity(deltas.r, roi), mean_intensity(deltas.g, roi),
            mean_intensity(deltas.b, roi)};
}

Band dominant_band(const BandAverages& avgs) noexcept {
    return argmax(avgs.r, avgs.g, avgs.b);
}

CttVariances ctt_variances(const RgbImage& frame, const RgbImage& background,
                           const Roi& fg_area, const Roi& bg_area) {
    if (fg_area.w != bg_area.w || fg_area.h != bg_area.h)
        throw Error(Errc::dimension_mismatch,
                    fmt::format("sample areas differ in size: {}x{} vs {}x{}", fg_area.w,
                                fg_area.h, bg_area.w, bg_area.h));
    require_inside(fg_area, frame.width(), frame.height());
    require_inside(bg_area, background.width(), background.height());

    std::array<double, 3> sums{};
    for (int dy = 0; dy < fg_area.h; ++dy) {
        for (int dx = 0; dx < fg_area.w; ++dx) {
            const Rgb& f = frame.at(fg_area.x + dx, fg_area.y + dy);
            const Rgb& m = background.at(bg_area.x + dx, bg_area.y + dy);
            for (std::size_t i = 0; i < 3; ++i) {
                const double d = channel(f, kAllBands[i]) - channel(m, kAllBands[i]);
                sums[i] += d * d;
            }
        }
    }
    return CttVariances::from_sums(sums[0], sums[1], sums[2]);
}

Band ctt_select(const CttVariances& v) {
    const auto& n = v.require_normalized();
    return argmax(n[0], n[1], n[2]);
}

Band select_band(const RgbImage& background, const RgbImage& frame, const Roi& roi) {
    return dominant_band(band_averages(band_deltas(background, frame), roi));
}

} // namespace bandmatch
