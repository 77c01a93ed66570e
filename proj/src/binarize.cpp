#include "bandmatch/binarize.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include <fmt/format.h>

namespace bandmatch {

Template::Template(BinaryImage mask, std::string label, Provenance source, std::string id)
    : mask_(std::move(mask)), label_(std::move(label)), source_(source), id_(std::move(id)) {
    if (label_.empty())
        throw Error(Errc::invalid_argument, "template label must not be empty");
    if (blob_pixel_count(mask_) == 0)
        throw Error(Errc::degenerate_template, "template mask contains no foreground pixels");
}

Template Template::with_id(std::string id) const {
    Template copy = *this;
    copy.id_ = std::move(id);
    return copy;
}

BinaryImage threshold(const GrayImage& img, int t) {
    if (t < 0 || t > 255)
        throw Error(Errc::invalid_argument, fmt::format("threshold {} outside [0,255]", t));
    std::vector<std::uint8_t> out(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), out.begin(),
                   [t](std::uint8_t v) { return static_cast<std::uint8_t>(v > t); });
    return BinaryImage(img.width(), img.height(), std::move(out));
}

int suggest_threshold(const Histogram& hist) {
    const auto& bins = hist.bins;
    if (hist.total() == 0)
        throw Error(Errc::empty_histogram, "histogram has no samples");

    auto is_peak = [&](int i) {
        if (bins[i] == 0)
            return false;
        if (i > 0 && bins[i] < bins[i - 1])
            return false;
        if (i < 255 && bins[i] < bins[i + 1])
            return false;
        return true;
    };

    // max_element returns the first maximum, i.e. the lowest intensity.
    const int first = static_cast<int>(std::max_element(bins.begin(), bins.end()) - bins.begin());
    int second = -1;
    for (int i = 0; i < 256; ++i) {
        if (std::abs(i - first) < kMinPeakSeparation || !is_peak(i))
            continue;
        if (second < 0 || bins[i] > bins[second])
            second = i;
    }
    if (second < 0)
        return kFallbackThreshold;

    const int lo = std::min(first, second);
    const int hi = std::max(first, second);
    int valley = lo + 1;
    for (int i = lo + 1; i < hi; ++i)
        if (bins[i] < bins[valley])
            valley = i;
    if (bins[valley] >= std::min(bins[first], bins[second]))
        return kFallbackThreshold;
    return valley;
}

Template crop_template(const BinaryImage& b, const Roi& rect, std::string label,
                       Provenance source) {
    auto mask = crop(b, rect);
    if (blob_pixel_count(mask) == 0)
        throw Error(Errc::degenerate_template,
                    fmt::format("region {},{},{}x{} contains no foreground pixels", rect.x, rect.y,
                                rect.w, rect.h));
    source.roi = rect;
    return Template(std::move(mask), std::move(label), source);
}

BinaryImage paste(const BinaryImage& dest, const BinaryImage& mask, Point at) {
    require_inside({at.x, at.y, mask.width(), mask.height()}, dest.width(), dest.height());
    std::vector<std::uint8_t> out(dest.pixels().begin(), dest.pixels().end());
    for (int y = 0; y < mask.height(); ++y) {
        auto src = mask.row(y);
        std::copy(src.begin(), src.end(),
                  out.begin() + static_cast<std::ptrdiff_t>(at.y + y) * dest.width() + at.x);
    }
    return BinaryImage(dest.width(), dest.height(), std::move(out));
}

long blob_pixel_count(const BinaryImage& b, const Roi& roi) {
    require_inside(roi, b.width(), b.height());
    long n = 0;
    for (int y = roi.y; y < roi.bottom(); ++y) {
        auto row = b.row(y).subspan(roi.x, roi.w);
        n = std::accumulate(row.begin(), row.end(), n);
    }
    return n;
}

long blob_pixel_count(const BinaryImage& b) {
    return std::accumulate(b.pixels().begin(), b.pixels().end(), 0L);
}

double blob_quality_ratio(const BinaryImage& improved, const BinaryImage& baseline) {
    const long base = blob_pixel_count(baseline);
    if (base == 0)
        throw Error(Errc::degenerate_ratio, "baseline blob has no foreground pixels");
    return static_cast<double>(blob_pixel_count(improved)) / static_cast<double>(base);
}

} // namespace bandmatch
