#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "bandmatch/binarize.hpp"
#include "bandmatch/raster.hpp"

// Deterministic synthetic traffic scenes for tests, benchmarks and demos.
namespace bandmatch::synth {

/// Zero border around each silhouette, as an operator's crop would leave.
inline constexpr int kMaskMargin = 4;

/// Silhouette for one of the default classes (car, van, lorry1, lorry2).
BinaryImage vehicle_mask(std::string_view label);

/// One template per default class, in kDefaultClasses order.
std::vector<Template> class_templates();

/// Flips each pixel independently with the given probability.
BinaryImage salt_and_pepper(const BinaryImage& img, double rate, std::mt19937_64& rng);

/// Textured road-like background. Deterministic in (width, height, seed).
RgbImage road_background(int width, int height, std::uint64_t seed = 1);

/// Copy of scene with every 1-pixel of mask (placed at `at`) set to colour.
RgbImage paint(const RgbImage& scene, const BinaryImage& mask, Point at, Rgb colour);

/// Copy of scene with `delta` added to one band under the mask, clamped.
RgbImage paint_band(const RgbImage& scene, const BinaryImage& mask, Point at, Band band,
                    int delta);

} // namespace bandmatch::synth
