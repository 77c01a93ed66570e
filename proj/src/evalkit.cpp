#include "bandmatch/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <numeric>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace bandmatch {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)) {
    std::set<std::string_view> seen;
    for (const auto& c : classes_) {
        if (c.empty() || c == kNoneLabel)
            throw Error(Errc::invalid_argument, fmt::format("invalid class name '{}'", c));
        if (!seen.insert(c).second)
            throw Error(Errc::invalid_argument, fmt::format("duplicate class '{}'", c));
    }
    counts_.assign(rows() * columns(), 0);
}

std::vector<std::string> ConfusionMatrix::predicted_columns() const {
    auto cols = classes_;
    cols.emplace_back(kNoneLabel);
    return cols;
}

std::size_t ConfusionMatrix::row_of(std::string_view actual) const {
    auto it = std::find(classes_.begin(), classes_.end(), actual);
    if (it == classes_.end())
        throw Error(Errc::unknown_label, fmt::format("'{}' is not a known class", actual));
    return static_cast<std::size_t>(it - classes_.begin());
}

std::size_t ConfusionMatrix::col_of(std::string_view predicted) const {
    if (predicted == kNoneLabel)
        return classes_.size();
    return row_of(predicted);
}

void ConfusionMatrix::add(std::string_view actual, std::string_view predicted, long n) {
    counts_[row_of(actual) * columns() + col_of(predicted)] += n;
}

long ConfusionMatrix::count(std::size_t row, std::size_t col) const {
    return counts_.at(row * columns() + col);
}

long ConfusionMatrix::count(std::string_view actual, std::string_view predicted) const {
    return count(row_of(actual), col_of(predicted));
}

long ConfusionMatrix::row_total(std::size_t row) const {
    auto first = counts_.begin() + static_cast<std::ptrdiff_t>(row * columns());
    return std::accumulate(first, first + static_cast<std::ptrdiff_t>(columns()), 0L);
}

long ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0L);
}

double ConfusionMatrix::row_percent(std::size_t row, std::size_t col) const {
    const long n = row_total(row);
    if (n == 0)
        return 0.0;
    return 100.0 * static_cast<double>(count(row, col)) / static_cast<double>(n);
}

ConfusionMatrix accumulate(std::span<const Prediction> predictions,
                           std::span<const TruthEntry> truth, std::vector<std::string> classes) {
    std::unordered_map<long, std::string_view> predicted;
    for (const auto& p : predictions)
        if (!predicted.emplace(p.frame_index, p.label).second)
            throw Error(Errc::invalid_argument,
                        fmt::format("more than one prediction for frame {}", p.frame_index));

    ConfusionMatrix m(std::move(classes));
    std::set<long> seen;
    for (const auto& t : truth) {
        if (!seen.insert(t.frame_index).second)
            throw Error(Errc::invalid_argument,
                        fmt::format("ground truth lists frame {} twice", t.frame_index));
        auto it = predicted.find(t.frame_index);
        if (it == predicted.end())
            throw Error(Errc::not_found,
                        fmt::format("ground truth frame {} has no classification event",
                                    t.frame_index));
        m.add(t.label, it->second);
    }
    return m;
}

ConfusionMatrix accumulate(std::span<const ClassificationEvent> events,
                           std::span<const TruthEntry> truth, std::vector<std::string> classes) {
    return accumulate(to_predictions(events), truth, std::move(classes));
}

std::vector<Prediction> to_predictions(std::span<const ClassificationEvent> events) {
    std::vector<Prediction> out;
    out.reserve(events.size());
    for (const auto& e : events)
        out.push_back({e.frame_index, e.decision.label});
    return out;
}

std::vector<Prediction> to_predictions(std::span<const EventRecord> records) {
    std::vector<Prediction> out;
    out.reserve(records.size());
    for (const auto& r : records)
        out.push_back({r.frame_index, r.label});
    return out;
}

std::vector<std::string> infer_classes(std::span<const TruthEntry> truth,
                                       std::span<const Prediction> predictions) {
    std::set<std::string> labels;
    for (const auto& t : truth)
        labels.insert(t.label);
    for (const auto& p : predictions)
        labels.insert(p.label);
    labels.erase(std::string(kNoneLabel));

    std::vector<std::string> out;
    for (auto known : kDefaultClasses) {
        auto it = labels.find(std::string(known));
        if (it != labels.end()) {
            out.push_back(*it);
            labels.erase(it);
        }
    }
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<TruthEntry> read_truth(std::istream& in) {
    std::vector<TruthEntry> out;
    std::string raw;
    long lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw Error(Errc::parse, fmt::format("truth line {}: expected frame_index,class", lineno));
        const auto idx = trim(line.substr(0, comma));
        const auto label = trim(line.substr(comma + 1));
        TruthEntry t;
        const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), t.frame_index);
        if (ec != std::errc{} || ptr != idx.data() + idx.size() || t.frame_index < 0)
            throw Error(Errc::parse, fmt::format("truth line {}: bad frame index '{}'", lineno, idx));
        if (label.empty() || label.find(',') != std::string_view::npos)
            throw Error(Errc::parse, fmt::format("truth line {}: bad class '{}'", lineno, label));
        t.label = std::string(label);
        out.push_back(std::move(t));
    }
    return out;
}

std::string report_table(const ConfusionMatrix& m) {
    const auto cols = m.predicted_columns();
    std::vector<std::string> heads;
    for (std::size_t r = 0; r < m.rows(); ++r)
        heads.push_back(fmt::format("{} ({})", m.classes()[r], m.row_total(r)));

    std::size_t first = std::string_view("Vehicle type (quantity)").size();
    for (const auto& h : heads)
        first = std::max(first, h.size());
    std::size_t cell = std::string_view("100.0 %").size();
    for (const auto& c : cols)
        cell = std::max(cell, c.size());

    std::string out = fmt::format("{:<{}}", "Vehicle type (quantity)", first);
    for (const auto& c : cols)
        out += fmt::format("  {:>{}}", c, cell);
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += fmt::format("{:<{}}", heads[r], first);
        for (std::size_t c = 0; c < m.columns(); ++c) {
            const std::string v = m.row_total(r) == 0
                                      ? std::string("-")
                                      : fmt::format("{:.1f} %", m.row_percent(r, c));
            out += fmt::format("  {:>{}}", v, cell);
        }
        out += '\n';
    }
    return out;
}

std::string report_csv(const ConfusionMatrix& m) {
    std::string out = "actual,quantity";
    for (const auto& c : m.predicted_columns())
        out += "," + c;
    out += '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out += fmt::format("{},{}", m.classes()[r], m.row_total(r));
        for (std::size_t c = 0; c < m.columns(); ++c)
            out += fmt::format(",{}", m.count(r, c));
        out += '\n';
    }
    return out;
}

} // namespace bandmatch
