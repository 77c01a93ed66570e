#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "bandmatch/binarize.hpp"
#include "bandmatch/raster.hpp"

namespace bandmatch {

enum class Metric { sad, ncc, ssd };

std::string_view to_string(Metric metric) noexcept;
Metric parse_metric(std::string_view text);

/// SAD and SSD are difference measures (lower is better); NCC is a similarity.
constexpr bool lower_is_better(Metric m) noexcept { return m != Metric::ncc; }

inline constexpr double kDefaultSadAccept = 0.25;
/// Default NCC acceptance: at least one overlapping foreground pixel.
inline constexpr double kDefaultNccAccept = 1.0;

constexpr double default_accept_threshold(Metric m) noexcept {
    return m == Metric::ncc ? kDefaultNccAccept : kDefaultSadAccept;
}

struct MatchScore {
    Metric metric = Metric::sad;
    double raw = 0.0;
    /// raw / template area for SAD and SSD, raw for NCC.
    double normalized = 0.0;
    Point position{};

    /// The value classify() compares across templates and against the
    /// acceptance threshold.
    double decision_value() const noexcept { return metric == Metric::ncc ? raw : normalized; }

    friend bool operator==(const MatchScore&, const MatchScore&) = default;
};

inline constexpr std::string_view kNoneLabel = "none";

struct ClassDecision {
    std::string label{kNoneLabel};
    /// Best score of the winning template; empty when nothing was scored.
    std::optional<MatchScore> score;
    std::string template_id;
    /// Index of the winning template in the list given to classify().
    long template_index = -1;
    int width = 0;
    int height = 0;

    bool accepted() const noexcept { return label != kNoneLabel; }

    friend bool operator==(const ClassDecision&, const ClassDecision&) = default;
};

// Window scores with the template's top-left corner at `at` in image coords.
double sad(const Template& tmpl, const BinaryImage& image, Point at);
double ncc(const Template& tmpl, const BinaryImage& image, Point at);
double ssd(const Template& tmpl, const BinaryImage& image, Point at);
double score_at(Metric metric, const Template& tmpl, const BinaryImage& image, Point at);

/// Exhaustive search over every placement fully inside roi. Ties go to the
/// smallest y, then the smallest x.
MatchScore best_match(const BinaryImage& image, const Template& tmpl, const Roi& roi,
                      Metric metric);

using BestMatchFn =
    std::function<MatchScore(const BinaryImage&, const Template&, const Roi&, Metric)>;

/// Runs best_match for every template and keeps the best one. Ties go to the
/// earlier template. A winner is accepted when its normalized score is at most
/// accept_threshold (SAD, SSD) or its raw score is at least accept_threshold
/// (NCC); otherwise the label is "none".
ClassDecision classify(const BinaryImage& image, std::span<const Template> templates,
                       const Roi& roi, Metric metric, double accept_threshold);

/// Same as classify() with the per-template search supplied by the caller.
ClassDecision classify(const BinaryImage& image, std::span<const Template> templates,
                       const Roi& roi, Metric metric, double accept_threshold,
                       const BestMatchFn& search);

} // namespace bandmatch
