#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bandmatch/pipeline.hpp"

namespace bandmatch {

struct TruthEntry {
    long frame_index = 0;
    std::string label;
};

struct Prediction {
    long frame_index = 0;
    std::string label;
};

/// Actual-vs-predicted tally over an ordered class list. Predicted columns are
/// the classes followed by "none".
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> classes = {});

    const std::vector<std::string>& classes() const noexcept { return classes_; }
    std::vector<std::string> predicted_columns() const;
    std::size_t rows() const noexcept { return classes_.size(); }
    std::size_t columns() const noexcept { return classes_.size() + 1; }

    void add(std::string_view actual, std::string_view predicted, long n = 1);

    long count(std::size_t row, std::size_t col) const;
    long count(std::string_view actual, std::string_view predicted) const;
    long row_total(std::size_t row) const;
    long total() const;
    /// Percentage of the row's samples in col; 0 for an empty row.
    double row_percent(std::size_t row, std::size_t col) const;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t row_of(std::string_view actual) const;
    std::size_t col_of(std::string_view predicted) const;

    std::vector<std::string> classes_;
    std::vector<long> counts_;
};

/// One increment per truth entry keyed by (truth label, predicted label).
ConfusionMatrix accumulate(std::span<const Prediction> predictions,
                           std::span<const TruthEntry> truth, std::vector<std::string> classes);
ConfusionMatrix accumulate(std::span<const ClassificationEvent> events,
                           std::span<const TruthEntry> truth, std::vector<std::string> classes);

std::vector<Prediction> to_predictions(std::span<const ClassificationEvent> events);
std::vector<Prediction> to_predictions(std::span<const EventRecord> records);

/// Default classes that occur, in their usual order, followed by any other
/// labels in lexicographic order. "none" is never a class.
std::vector<std::string> infer_classes(std::span<const TruthEntry> truth,
                                       std::span<const Prediction> predictions);

/// `frame_index,class` per line; '#' starts a comment line.
std::vector<TruthEntry> read_truth(std::istream& in);

/// Human-readable table. Rows read "label (quantity)"; cells are row
/// percentages with one decimal, or "-" for a class with no samples.
std::string report_table(const ConfusionMatrix& m);

/// Machine-readable counts: header `actual,quantity,<columns...>`, one row per
/// class.
std::string report_csv(const ConfusionMatrix& m);

} // namespace bandmatch
