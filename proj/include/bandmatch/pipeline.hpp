#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bandmatch/background.hpp"
#include "bandmatch/binarize.hpp"
#include "bandmatch/matching.hpp"
#include "bandmatch/raster.hpp"

namespace bandmatch {

enum class BandMode { gray, automatic };
enum class ThresholdMode { fixed, automatic };

inline constexpr long kDefaultPresenceMinArea = 200;
inline constexpr int kDefaultFixedThreshold = 40;

struct PipelineConfig {
    Roi roi{};
    int background_frames = kDefaultBackgroundFrames;
    Metric metric = Metric::sad;
    double accept_threshold = kDefaultSadAccept;
    long presence_min_area = kDefaultPresenceMinArea;
    BandMode band_mode = BandMode::gray;
    ThresholdMode threshold_mode = ThresholdMode::automatic;
    int fixed_threshold = kDefaultFixedThreshold;

    /// Throws Errc::invalid_argument on the first bad field.
    void validate() const;
};

/// "gray" for an empty band, otherwise the band name.
std::string_view band_name(const std::optional<Band>& band) noexcept;
/// Accepts gray, red, green, blue.
std::optional<Band> parse_band_name(std::string_view text);

/// |frame - background| in one band, or in (R+G+B)/3 gray when band is empty.
GrayImage difference_image(const RgbImage& background, const RgbImage& frame,
                           const std::optional<Band>& band);

struct Binarization {
    BinaryImage image;  // full frame
    int threshold = 0;
};

/// Thresholds the difference image at fixed_threshold, or at the value
/// suggested by the histogram of the difference over roi when none is given.
Binarization binarize_frame(const RgbImage& background, const RgbImage& frame, const Roi& roi,
                            const std::optional<Band>& band,
                            const std::optional<int>& fixed_threshold);

struct ClassificationEvent {
    long frame_index = 0;
    ClassDecision decision;
    std::optional<Band> band_used;
    int threshold_used = 0;
    /// Processing time in seconds since the previous event (always > 0).
    double elapsed = 0.0;
};

enum class FrameStage { background, band_selection, classification };

/// Stateful frame-by-frame driver.
///
/// The first background_frames frames only feed the background model. After
/// that, with BandMode::gray every frame is classified. With
/// BandMode::automatic frames alternate, starting with a band-selection frame:
/// even offsets re-select the dominant band over the roi and odd offsets are
/// binarized in that band and classified. A classification frame whose roi
/// holds fewer than presence_min_area foreground pixels yields "none" without
/// matching. Exactly one event is produced per classification frame.
class Pipeline {
public:
    Pipeline(PipelineConfig config, std::vector<Template> templates);

    /// Uses a precomputed background and skips the build phase.
    void set_background(RgbImage background);

    std::optional<ClassificationEvent> push(const RgbImage& frame);

    const PipelineConfig& config() const noexcept { return config_; }
    std::span<const Template> templates() const noexcept { return templates_; }
    bool background_ready() const noexcept { return background_.has_value(); }
    const std::optional<RgbImage>& background() const noexcept { return background_; }
    std::optional<Band> selected_band() const noexcept { return band_; }
    long frames_seen() const noexcept { return frame_index_; }
    /// What the most recent push() did.
    FrameStage last_stage() const noexcept { return last_stage_; }

private:
    ClassificationEvent classify_frame(const RgbImage& frame);
    void check_frame(const RgbImage& frame);

    PipelineConfig config_;
    std::vector<Template> templates_;
    std::optional<BackgroundModel> model_;
    std::optional<RgbImage> background_;
    std::optional<Band> band_;
    int width_ = 0;
    int height_ = 0;
    long frame_index_ = 0;
    long offset_ = 0;  // frames processed since the background became ready
    double pending_ = 0.0;
    FrameStage last_stage_ = FrameStage::background;
};

using FrameFeed = std::function<std::optional<RgbImage>()>;
using EventSink = std::function<void(const ClassificationEvent&)>;

/// Drains feed through a Pipeline. Throws Errc::empty_input when the feed ends
/// before any frame past the background phase.
void run(const PipelineConfig& config, const FrameFeed& feed, std::span<const Template> templates,
         const EventSink& sink, std::optional<RgbImage> background = std::nullopt);

std::vector<ClassificationEvent> run(const PipelineConfig& config,
                                     std::span<const RgbImage> frames,
                                     std::span<const Template> templates,
                                     std::optional<RgbImage> background = std::nullopt);

/// Outline colour for a class label.
Rgb label_colour(std::string_view label) noexcept;

/// Copy of frame with a 2-pixel outline drawn just inside the matched window.
RgbImage annotate(const RgbImage& frame, const ClassificationEvent& event);

struct ThroughputReport {
    double mean_fps = 0.0;
    double min_fps = 0.0;
    double max_fps = 0.0;
    std::map<std::string, double> per_class_mean_fps;  // keyed by decision label
    std::size_t events = 0;
};

/// Per-event rate is 1/elapsed; mean values are arithmetic means of rates.
ThroughputReport measure_throughput(std::span<const ClassificationEvent> events);

std::string format_throughput(const ThroughputReport& report);

/// Parsed form of one event line.
struct EventRecord {
    long frame_index = 0;
    std::string label;
    int x = -1;
    int y = -1;
    std::optional<double> score;
    std::optional<Band> band;
    double elapsed = 0.0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

inline constexpr std::string_view kEventHeader = "# frame_index,label,x,y,score,band,elapsed";

/// frame_index,label,x,y,score,band,elapsed. x and y are -1 and score is empty
/// when nothing was scored.
std::string format_event(const ClassificationEvent& event);
EventRecord parse_event(std::string_view line);
/// Skips blank lines and lines starting with '#'.
std::vector<EventRecord> read_events(std::istream& in);

} // namespace bandmatch
