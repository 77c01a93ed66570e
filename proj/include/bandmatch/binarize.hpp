#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "bandmatch/raster.hpp"

namespace bandmatch {

/// Vehicle classes used when no class list is configured.
inline constexpr std::array<std::string_view, 4> kDefaultClasses{"car", "van", "lorry1", "lorry2"};

/// Fallback returned by suggest_threshold when the histogram is not bimodal.
inline constexpr int kFallbackThreshold = 127;
/// Minimum distance in bins between the two peaks of a bimodal histogram.
inline constexpr int kMinPeakSeparation = 16;

/// Where a template came from. frame_index and threshold are -1 when unknown;
/// an empty band means the gray (R+G+B)/3 difference was used.
struct Provenance {
    long frame_index = -1;
    Roi roi{};
    int threshold = -1;
    std::optional<Band> band;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// A labelled binary vehicle silhouette. The mask always holds at least one
/// 1-pixel.
class Template {
public:
    Template(BinaryImage mask, std::string label, Provenance source = {}, std::string id = {});

    const BinaryImage& mask() const noexcept { return mask_; }
    const std::string& label() const noexcept { return label_; }
    const Provenance& source() const noexcept { return source_; }
    /// Store identifier; empty for templates that were never persisted.
    const std::string& id() const noexcept { return id_; }

    int width() const noexcept { return mask_.width(); }
    int height() const noexcept { return mask_.height(); }
    long area() const noexcept { return static_cast<long>(mask_.width()) * mask_.height(); }

    Template with_id(std::string id) const;

    friend bool operator==(const Template&, const Template&) = default;

private:
    BinaryImage mask_;
    std::string label_;
    Provenance source_;
    std::string id_;
};

/// 1 where the pixel is strictly greater than t.
BinaryImage threshold(const GrayImage& img, int t);

/// Valley between the two dominant histogram peaks.
///
/// A peak is a non-empty bin no smaller than its neighbours. The first peak is
/// the global maximum; the second is the highest peak at least
/// kMinPeakSeparation bins away from it. The result is the smallest bin
/// strictly between them, provided it is lower than both peaks; otherwise
/// kFallbackThreshold. Ties resolve to the lowest intensity.
int suggest_threshold(const Histogram& hist);

Template crop_template(const BinaryImage& b, const Roi& rect, std::string label,
                       Provenance source = {});

/// Copy of dest with mask written at the given offset.
BinaryImage paste(const BinaryImage& dest, const BinaryImage& mask, Point at);

long blob_pixel_count(const BinaryImage& b, const Roi& roi);
long blob_pixel_count(const BinaryImage& b);

/// count(improved) / count(baseline).
double blob_quality_ratio(const BinaryImage& improved, const BinaryImage& baseline);

} // namespace bandmatch
