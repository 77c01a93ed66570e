#include "bandmatch/matching.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

namespace bandmatch {

std::string_view to_string(Metric metric) noexcept {
    switch (metric) {
    case Metric::sad: return "sad";
    case Metric::ncc: return "ncc";
    case Metric::ssd: return "ssd";
    }
    return "?";
}

Metric parse_metric(std::string_view text) {
    if (text == "sad") return Metric::sad;
    if (text == "ncc") return Metric::ncc;
    if (text == "ssd") return Metric::ssd;
    throw Error(Errc::invalid_argument, fmt::format("unknown metric '{}'", text));
}

namespace {

void require_window(const Template& tmpl, const BinaryImage& image, Point at) {
    require_inside({at.x, at.y, tmpl.width(), tmpl.height()}, image.width(), image.height());
}

// Kernels assume the window is in bounds. They are shared by the single-window
// scores and the exhaustive search so both produce identical values.

long sad_kernel(const BinaryImage& t, const BinaryImage& img, int x, int y) {
    const int w = t.width();
    long total = 0;
    for (int r = 0; r < t.height(); ++r) {
        const std::uint8_t* a = t.row(r).data();
        const std::uint8_t* b = img.row(y + r).data() + x;
        int acc = 0;
        for (int i = 0; i < w; ++i)
            acc += std::abs(int{a[i]} - int{b[i]});
        total += acc;
    }
    return total;
}

long ssd_kernel(const BinaryImage& t, const BinaryImage& img, int x, int y) {
    const int w = t.width();
    long total = 0;
    for (int r = 0; r < t.height(); ++r) {
        const std::uint8_t* a = t.row(r).data();
        const std::uint8_t* b = img.row(y + r).data() + x;
        int acc = 0;
        for (int i = 0; i < w; ++i) {
            const int d = int{a[i]} - int{b[i]};
            acc += d * d;
        }
        total += acc;
    }
    return total;
}

// P = sum F*B, Q = sqrt(sum F^2 * B^2), evaluated in real arithmetic.
double ncc_kernel(const BinaryImage& t, const BinaryImage& img, int x, int y) {
    const int w = t.width();
    double p = 0.0;
    double q2 = 0.0;
    for (int r = 0; r < t.height(); ++r) {
        const std::uint8_t* a = t.row(r).data();
        const std::uint8_t* b = img.row(y + r).data() + x;
        for (int i = 0; i < w; ++i) {
            const double f = a[i];
            const double g = b[i];
            p += f * g;
            q2 += (f * f) * (g * g);
        }
    }
    if (q2 == 0.0)
        return 0.0;
    return p / std::sqrt(q2);
}

template <typename Kernel, typename Better>
MatchScore search(const BinaryImage& image, const Template& tmpl, const Roi& roi, Metric metric,
                  Kernel kernel, Better better) {
    const BinaryImage& t = tmpl.mask();
    MatchScore best{metric, 0.0, 0.0, {roi.x, roi.y}};
    bool have = false;
    for (int y = roi.y; y + t.height() <= roi.bottom(); ++y) {
        for (int x = roi.x; x + t.width() <= roi.right(); ++x) {
            const double s = kernel(t, image, x, y);
            if (!have || better(s, best.raw)) {
                best.raw = s;
                best.position = {x, y};
                have = true;
            }
        }
    }
    best.normalized = lower_is_better(metric) ? best.raw / static_cast<double>(tmpl.area())
                                              : best.raw;
    return best;
}

} // namespace

double sad(const Template& tmpl, const BinaryImage& image, Point at) {
    require_window(tmpl, image, at);
    return static_cast<double>(sad_kernel(tmpl.mask(), image, at.x, at.y));
}

double ncc(const Template& tmpl, const BinaryImage& image, Point at) {
    require_window(tmpl, image, at);
    return ncc_kernel(tmpl.mask(), image, at.x, at.y);
}

double ssd(const Template& tmpl, const BinaryImage& image, Point at) {
    require_window(tmpl, image, at);
    return static_cast<double>(ssd_kernel(tmpl.mask(), image, at.x, at.y));
}

double score_at(Metric metric, const Template& tmpl, const BinaryImage& image, Point at) {
    switch (metric) {
    case Metric::sad: return sad(tmpl, image, at);
    case Metric::ncc: return ncc(tmpl, image, at);
    case Metric::ssd: return ssd(tmpl, image, at);
    }
    throw Error(Errc::invalid_argument, "unknown metric");
}

MatchScore best_match(const BinaryImage& image, const Template& tmpl, const Roi& roi,
                      Metric metric) {
    require_inside(roi, image.width(), image.height());
    if (tmpl.width() > roi.w || tmpl.height() > roi.h)
        throw Error(Errc::out_of_bounds,
                    fmt::format("template {}x{} does not fit in region {}x{}", tmpl.width(),
                                tmpl.height(), roi.w, roi.h));
    auto lower = [](double s, double best) { return s < best; };
    auto higher = [](double s, double best) { return s > best; };
    switch (metric) {
    case Metric::sad:
        return search(image, tmpl, roi, metric,
                      [](const BinaryImage& t, const BinaryImage& img, int x, int y) {
                          return static_cast<double>(sad_kernel(t, img, x, y));
                      },
                      lower);
    case Metric::ssd:
        return search(image, tmpl, roi, metric,
                      [](const BinaryImage& t, const BinaryImage& img, int x, int y) {
                          return static_cast<double>(ssd_kernel(t, img, x, y));
                      },
                      lower);
    case Metric::ncc:
        return search(image, tmpl, roi, metric, ncc_kernel, higher);
    }
    throw Error(Errc::invalid_argument, "unknown metric");
}

ClassDecision classify(const BinaryImage& image, std::span<const Template> templates,
                       const Roi& roi, Metric metric, double accept_threshold) {
    return classify(image, templates, roi, metric, accept_threshold, best_match);
}

ClassDecision classify(const BinaryImage& image, std::span<const Template> templates,
                       const Roi& roi, Metric metric, double accept_threshold,
                       const BestMatchFn& search_fn) {
    if (templates.empty())
        throw Error(Errc::empty_input, "no templates to classify against");

    const bool lower = lower_is_better(metric);
    std::optional<MatchScore> best;
    std::size_t winner = 0;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        MatchScore s = search_fn(image, templates[i], roi, metric);
        if (!best || (lower ? s.decision_value() < best->decision_value()
                            : s.decision_value() > best->decision_value())) {
            best = s;
            winner = i;
        }
    }

    const Template& t = templates[winner];
    ClassDecision d;
    d.score = best;
    d.template_id = t.id();
    d.template_index = static_cast<long>(winner);
    d.width = t.width();
    d.height = t.height();
    const double v = best->decision_value();
    const bool ok = lower ? v <= accept_threshold : v >= accept_threshold;
    if (ok)
        d.label = t.label();
    return d;
}

} // namespace bandmatch
