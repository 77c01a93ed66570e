#pragma once

#include <array>
#include <optional>

#include "bandmatch/raster.hpp"

namespace bandmatch {

/// Absolute per-band difference images between a background and a frame.
struct BandDeltas {
    GrayImage r;
    GrayImage g;
    GrayImage b;

    const GrayImage& band(Band which) const noexcept;
};

struct BandAverages {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    double value(Band which) const noexcept;
};

/// Per-band sums of squared differences between a foreground sample area and a
/// background sample area. `normalized` holds v_i / (v_r + v_g + v_b) and is
/// empty when all three sums are zero.
struct CttVariances {
    double vr = 0.0;
    double vg = 0.0;
    double vb = 0.0;
    std::optional<std::array<double, 3>> normalized;

    static CttVariances from_sums(double vr, double vg, double vb);
    /// Throws Errc::degenerate_normalization when all sums are zero.
    const std::array<double, 3>& require_normalized() const;
};

BandDeltas band_deltas(const RgbImage& background, const RgbImage& frame);
BandAverages band_averages(const BandDeltas& deltas, const Roi& roi);

/// Band with the largest average; ties prefer red, then green.
Band dominant_band(const BandAverages& avgs) noexcept;

/// Pairs fg_area pixels in frame with bg_area pixels in background by position.
/// Identical samples give zero sums and no normalized triple.
CttVariances ctt_variances(const RgbImage& frame, const RgbImage& background,
                           const Roi& fg_area, const Roi& bg_area);

/// Band with the largest normalized value; ties prefer red, then green.
Band ctt_select(const CttVariances& v);

/// Dominant band of frame against background over roi.
Band select_band(const RgbImage& background, const RgbImage& frame, const Roi& roi);

} // namespace bandmatch
