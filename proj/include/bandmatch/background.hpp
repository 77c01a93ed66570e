#pragma once

#include <array>
#include <span>
#include <vector>

#include "bandmatch/raster.hpp"

namespace bandmatch {

inline constexpr int kDefaultBackgroundFrames = 25;

/// Incremental per-band running mean of the frames absorbed so far.
///
/// Each update folds frame k+1 into the mean of the previous k frames:
///     M_new = k/(k+1) * M_curr + 1/(k+1) * F
/// starting from k = 0 and M = 0. The mean is kept in double precision and only
/// quantized by snapshot(). A model has a single writer; snapshot() and the
/// accessors are safe to call concurrently while no update is in progress.
class BackgroundModel {
public:
    BackgroundModel(int width, int height);

    void update(const RgbImage& frame);

    /// Rounds each channel half-up and clamps to [0,255]. Throws
    /// Errc::empty_model when no frame has been absorbed.
    RgbImage snapshot() const;

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    long frames() const noexcept { return k_; }

    std::array<double, 3> mean_at(int x, int y) const noexcept;
    /// Mean of each band over the whole image.
    std::array<double, 3> global_mean() const noexcept;

    /// Builds a model from the given frames (all must share dimensions).
    static BackgroundModel from_frames(std::span<const RgbImage> frames);

private:
    int width_;
    int height_;
    long k_ = 0;
    std::vector<double> mean_;  // interleaved r,g,b
};

} // namespace bandmatch
