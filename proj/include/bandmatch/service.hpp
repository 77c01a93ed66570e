#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandmatch/binarize.hpp"
#include "bandmatch/io.hpp"
#include "bandmatch/matching.hpp"
#include "bandmatch/raster.hpp"

namespace bandmatch::service {

namespace fs = std::filesystem;

/// Band requested by a client: a fixed band, gray, or the dominant band of the
/// frame over the roi.
enum class BandChoice { gray, red, green, blue, automatic };

BandChoice parse_band_choice(std::string_view text);
std::optional<Band> resolve_band(BandChoice choice, const RgbImage& background,
                                 const RgbImage& frame, const Roi& roi);

struct RegionBinarization {
    BinaryImage region;  // roi-sized
    int threshold = 0;
    std::optional<Band> band;
};

/// Binarization of the roi exactly as the classification pipeline computes
/// it. An empty threshold asks for the histogram-suggested value.
RegionBinarization binarize_region(const RgbImage& background, const RgbImage& frame,
                                   const Roi& roi, BandChoice band,
                                   const std::optional<int>& threshold);

struct ServiceOptions {
    fs::path frames_dir;
    fs::path templates_dir;
    /// Precomputed background; when empty the first background_frames frames
    /// are averaged at startup.
    std::optional<fs::path> background_file;
    int background_frames = kDefaultBackgroundFrames;
    std::vector<std::string> classes = io::default_class_list();
};

struct Reply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

using Query = std::map<std::string, std::string>;

/// Request handling for the template-authoring workbench, independent of the
/// transport. Apart from the template store on disk no state changes between
/// requests, so every preview is a pure function of its parameters. Handlers
/// may run concurrently; template writes are serialized.
class Workbench {
public:
    explicit Workbench(ServiceOptions options);

    Reply list_frames() const;
    Reply get_frame(long index) const;
    Reply get_background() const;
    Reply get_histogram(const Query& query) const;
    Reply preview_binarize(std::string_view body) const;
    Reply create_template(std::string_view body);
    Reply list_templates() const;
    Reply preview_classify(std::string_view body) const;

    const io::FrameSource& frames() const noexcept { return frames_; }
    const RgbImage& background() const noexcept { return background_; }

private:
    ServiceOptions options_;
    io::FrameSource frames_;
    RgbImage background_;
    io::TemplateStore store_;
    std::mutex store_mutex_;
};

/// Maps a library error onto an HTTP status (4xx for request problems, 5xx
/// for processing failures) with a JSON error body.
Reply error_reply(const Error& e);

/// HTTP transport over a Workbench. Routes:
///   GET /frames, GET /frames/{i}, GET /background,
///   GET /histogram?frame&roi&band, POST /preview/binarize, POST /templates,
///   GET /templates, POST /preview/classify
class HttpServer {
public:
    explicit HttpServer(Workbench& workbench);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace bandmatch::service
