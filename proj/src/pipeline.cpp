#include "bandmatch/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <istream>

#include <fmt/format.h>

#include "bandmatch/bandselect.hpp"

namespace bandmatch {

void PipelineConfig::validate() const {
    if (roi.w < 1 || roi.h < 1 || roi.x < 0 || roi.y < 0)
        throw Error(Errc::invalid_argument,
                    fmt::format("invalid roi {},{},{}x{}", roi.x, roi.y, roi.w, roi.h));
    if (background_frames < 1)
        throw Error(Errc::invalid_argument, "background_frames must be at least 1");
    if (presence_min_area < 1)
        throw Error(Errc::invalid_argument, "presence_min_area must be at least 1");
    if (fixed_threshold < 0 || fixed_threshold > 255)
        throw Error(Errc::invalid_argument, "fixed threshold must be in [0,255]");
}

std::string_view band_name(const std::optional<Band>& band) noexcept {
    return band ? to_string(*band) : std::string_view("gray");
}

std::optional<Band> parse_band_name(std::string_view text) {
    if (text == "gray") return std::nullopt;
    if (text == "red") return Band::red;
    if (text == "green") return Band::green;
    if (text == "blue") return Band::blue;
    throw Error(Errc::invalid_argument, fmt::format("unknown band '{}'", text));
}

GrayImage difference_image(const RgbImage& background, const RgbImage& frame,
                           const std::optional<Band>& band) {
    if (!background.same_size(frame))
        throw Error(Errc::dimension_mismatch,
                    fmt::format("background is {}x{}, frame is {}x{}", background.width(),
                                background.height(), frame.width(), frame.height()));
    if (band)
        return abs_diff(extract_band(frame, *band), extract_band(background, *band));
    return abs_diff(to_gray(frame), to_gray(background));
}

Binarization binarize_frame(const RgbImage& background, const RgbImage& frame, const Roi& roi,
                            const std::optional<Band>& band,
                            const std::optional<int>& fixed_threshold) {
    GrayImage diff = difference_image(background, frame, band);
    require_inside(roi, diff.width(), diff.height());
    const int t = fixed_threshold ? *fixed_threshold : suggest_threshold(histogram(diff, roi));
    return {threshold(diff, t), t};
}

Pipeline::Pipeline(PipelineConfig config, std::vector<Template> templates)
    : config_(config), templates_(std::move(templates)) {
    config_.validate();
    if (templates_.empty())
        throw Error(Errc::empty_input, "pipeline needs at least one template");
    for (const auto& t : templates_)
        if (t.width() > config_.roi.w || t.height() > config_.roi.h)
            throw Error(Errc::out_of_bounds,
                        fmt::format("template '{}' ({}x{}) does not fit in the {}x{} roi",
                                    t.id().empty() ? t.label() : t.id(), t.width(), t.height(),
                                    config_.roi.w, config_.roi.h));
}

void Pipeline::set_background(RgbImage background) {
    require_inside(config_.roi, background.width(), background.height());
    if (width_ != 0 && (background.width() != width_ || background.height() != height_))
        throw Error(Errc::dimension_mismatch, "background does not match the frame size");
    width_ = background.width();
    height_ = background.height();
    background_ = std::move(background);
}

void Pipeline::check_frame(const RgbImage& frame) {
    if (width_ == 0) {
        require_inside(config_.roi, frame.width(), frame.height());
        width_ = frame.width();
        height_ = frame.height();
        return;
    }
    if (frame.width() != width_ || frame.height() != height_)
        throw Error(Errc::dimension_mismatch,
                    fmt::format("frame {} is {}x{}, expected {}x{}", frame_index_, frame.width(),
                                frame.height(), width_, height_));
}

std::optional<ClassificationEvent> Pipeline::push(const RgbImage& frame) {
    check_frame(frame);

    if (!background_) {
        if (!model_)
            model_.emplace(width_, height_);
        model_->update(frame);
        if (model_->frames() >= config_.background_frames) {
            background_ = model_->snapshot();
            model_.reset();
        }
        last_stage_ = FrameStage::background;
        ++frame_index_;
        return std::nullopt;
    }

    const auto start = std::chrono::steady_clock::now();
    std::optional<ClassificationEvent> event;
    if (config_.band_mode == BandMode::automatic && offset_ % 2 == 0) {
        band_ = select_band(*background_, frame, config_.roi);
        last_stage_ = FrameStage::band_selection;
    } else {
        event = classify_frame(frame);
        last_stage_ = FrameStage::classification;
    }
    pending_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (event) {
        event->elapsed = std::max(pending_, 1e-9);
        pending_ = 0.0;
    }
    ++offset_;
    ++frame_index_;
    return event;
}

ClassificationEvent Pipeline::classify_frame(const RgbImage& frame) {
    ClassificationEvent e;
    e.frame_index = frame_index_;
    e.band_used = config_.band_mode == BandMode::automatic ? band_ : std::nullopt;

    const std::optional<int> fixed = config_.threshold_mode == ThresholdMode::fixed
                                         ? std::optional<int>(config_.fixed_threshold)
                                         : std::nullopt;
    Binarization bin = binarize_frame(*background_, frame, config_.roi, e.band_used, fixed);
    e.threshold_used = bin.threshold;
    if (blob_pixel_count(bin.image, config_.roi) >= config_.presence_min_area)
        e.decision = classify(bin.image, templates_, config_.roi, config_.metric,
                              config_.accept_threshold);
    return e;
}

void run(const PipelineConfig& config, const FrameFeed& feed, std::span<const Template> templates,
         const EventSink& sink, std::optional<RgbImage> background) {
    Pipeline pipeline(config, std::vector<Template>(templates.begin(), templates.end()));
    if (background)
        pipeline.set_background(std::move(*background));
    bool processed = false;
    while (auto frame = feed()) {
        auto event = pipeline.push(*frame);
        if (pipeline.last_stage() != FrameStage::background)
            processed = true;
        if (event)
            sink(*event);
    }
    if (!processed)
        throw Error(Errc::empty_input,
                    fmt::format("sequence ended after {} frames, before the background phase "
                                "({} frames) completed",
                                pipeline.frames_seen(), config.background_frames));
}

std::vector<ClassificationEvent> run(const PipelineConfig& config,
                                     std::span<const RgbImage> frames,
                                     std::span<const Template> templates,
                                     std::optional<RgbImage> background) {
    std::vector<ClassificationEvent> events;
    std::size_t next = 0;
    run(
        config,
        [&]() -> std::optional<RgbImage> {
            if (next >= frames.size())
                return std::nullopt;
            return frames[next++];
        },
        templates, [&](const ClassificationEvent& e) { events.push_back(e); },
        std::move(background));
    return events;
}

Rgb label_colour(std::string_view label) noexcept {
    if (label == "car") return {255, 0, 0};
    if (label == "van") return {0, 255, 0};
    if (label == "lorry1") return {0, 0, 255};
    if (label == "lorry2") return {255, 255, 0};
    static constexpr Rgb extra[] = {{255, 0, 255}, {0, 255, 255}, {255, 128, 0}, {255, 255, 255}};
    std::uint32_t h = 2166136261u;  // FNV-1a
    for (unsigned char c : label)
        h = (h ^ c) * 16777619u;
    return extra[h % std::size(extra)];
}

RgbImage annotate(const RgbImage& frame, const ClassificationEvent& event) {
    const ClassDecision& d = event.decision;
    if (!d.accepted() || !d.score)
        return frame;
    const Roi rect{d.score->position.x, d.score->position.y, d.width, d.height};
    require_inside(rect, frame.width(), frame.height());

    const Rgb colour = label_colour(d.label);
    std::vector<Rgb> out(frame.pixels().begin(), frame.pixels().end());
    for (int dy = 0; dy < rect.h; ++dy) {
        for (int dx = 0; dx < rect.w; ++dx) {
            if (dx >= 2 && dx < rect.w - 2 && dy >= 2 && dy < rect.h - 2)
                continue;
            out[static_cast<std::size_t>(rect.y + dy) * frame.width() + rect.x + dx] = colour;
        }
    }
    return RgbImage(frame.width(), frame.height(), std::move(out));
}

ThroughputReport measure_throughput(std::span<const ClassificationEvent> events) {
    if (events.empty())
        throw Error(Errc::empty_input, "no events to measure");
    ThroughputReport r;
    r.events = events.size();
    r.min_fps = 1.0 / events.front().elapsed;
    r.max_fps = r.min_fps;
    double sum = 0.0;
    std::map<std::string, std::pair<double, std::size_t>> by_class;
    for (const auto& e : events) {
        const double fps = 1.0 / e.elapsed;
        sum += fps;
        r.min_fps = std::min(r.min_fps, fps);
        r.max_fps = std::max(r.max_fps, fps);
        auto& [s, n] = by_class[e.decision.label];
        s += fps;
        ++n;
    }
    r.mean_fps = sum / static_cast<double>(events.size());
    for (const auto& [label, acc] : by_class)
        r.per_class_mean_fps[label] = acc.first / static_cast<double>(acc.second);
    return r;
}

std::string format_throughput(const ThroughputReport& report) {
    std::string out = fmt::format("events: {}\nmean fps: {:.2f} (min {:.2f}, max {:.2f})\n",
                                  report.events, report.mean_fps, report.min_fps, report.max_fps);
    for (const auto& [label, fps] : report.per_class_mean_fps)
        out += fmt::format("  {:<10} {:.2f} fps\n", label, fps);
    return out;
}

std::string format_event(const ClassificationEvent& event) {
    const ClassDecision& d = event.decision;
    const int x = d.score ? d.score->position.x : -1;
    const int y = d.score ? d.score->position.y : -1;
    const std::string score = d.score ? fmt::format("{}", d.score->decision_value()) : "";
    return fmt::format("{},{},{},{},{},{},{}", event.frame_index, d.label, x, y, score,
                       band_name(event.band_used), event.elapsed);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(Errc::parse, fmt::format("bad {} '{}'", what, text));
    return value;
}

} // namespace

EventRecord parse_event(std::string_view line) {
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    const auto f = split(line, ',');
    if (f.size() != 7)
        throw Error(Errc::parse, fmt::format("event line has {} fields, expected 7: '{}'",
                                             f.size(), line));
    EventRecord r;
    r.frame_index = parse_number<long>(f[0], "frame index");
    r.label = std::string(f[1]);
    if (r.label.empty())
        throw Error(Errc::parse, "event label is empty");
    r.x = parse_number<int>(f[2], "x");
    r.y = parse_number<int>(f[3], "y");
    if (!f[4].empty())
        r.score = parse_number<double>(f[4], "score");
    try {
        r.band = parse_band_name(f[5]);
    } catch (const Error&) {
        throw Error(Errc::parse, fmt::format("bad band '{}'", f[5]));
    }
    r.elapsed = parse_number<double>(f[6], "elapsed");
    return r;
}

std::vector<EventRecord> read_events(std::istream& in) {
    std::vector<EventRecord> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#' || line == "\r")
            continue;
        try {
            out.push_back(parse_event(line));
        } catch (const Error& e) {
            throw Error(Errc::parse, fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    return out;
}

} // namespace bandmatch
