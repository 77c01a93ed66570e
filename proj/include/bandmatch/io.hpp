#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bandmatch/binarize.hpp"
#include "bandmatch/pipeline.hpp"
#include "bandmatch/raster.hpp"

namespace bandmatch::io {

namespace fs = std::filesystem;

enum class ImageFormat { pbm, pgm, ppm, png };

struct ImageInfo {
    int width = 0;
    int height = 0;
    ImageFormat format = ImageFormat::ppm;
};

// Decoders accept binary and plain PNM (P1-P6, maxval <= 255) and PNG. JPEG
// input is rejected as lossy. `name` only appears in error messages.
ImageInfo probe_image(std::string_view bytes, std::string_view name = "<memory>");
RgbImage decode_rgb(std::string_view bytes, std::string_view name = "<memory>");
GrayImage decode_gray(std::string_view bytes, std::string_view name = "<memory>");
/// PBM bits map directly to mask values; gray inputs map nonzero to 1.
BinaryImage decode_binary(std::string_view bytes, std::string_view name = "<memory>");

std::string encode_ppm(const RgbImage& img);
std::string encode_pgm(const GrayImage& img);
std::string encode_pbm(const BinaryImage& img);
std::string encode_png(const RgbImage& img);
std::string encode_png(const GrayImage& img);
/// Written as 8-bit gray with foreground 255.
std::string encode_png(const BinaryImage& img);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view bytes);

ImageInfo probe_image_file(const fs::path& path);
RgbImage read_rgb(const fs::path& path);
GrayImage read_gray(const fs::path& path);
BinaryImage read_binary(const fs::path& path);

// Format follows the extension: .ppm/.pgm/.pbm/.pnm or .png.
void write_image(const fs::path& path, const RgbImage& img);
void write_image(const fs::path& path, const GrayImage& img);
void write_image(const fs::path& path, const BinaryImage& img);

/// Natural filename order: digit runs compare numerically, so f2 < f10.
bool natural_less(std::string_view a, std::string_view b);

/// Ordered list of frame files in a directory with verified dimensions.
class FrameSource {
public:
    /// Picks up .ppm, .pnm, .pgm and .png files; other files are ignored.
    /// Throws on an empty directory, a lossy (.jpg/.jpeg) frame, an
    /// unreadable file (naming it) or mixed dimensions.
    static FrameSource open(const fs::path& dir);

    std::size_t size() const noexcept { return paths_.size(); }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<fs::path>& paths() const noexcept { return paths_; }

    RgbImage load(std::size_t index) const;
    /// Feed over frames [first, first + count).
    FrameFeed feed(std::size_t first = 0, std::size_t count = static_cast<std::size_t>(-1)) const;

private:
    std::vector<fs::path> paths_;
    int width_ = 0;
    int height_ = 0;
};

std::vector<std::string> default_class_list();

/// Directory of templates: `<id>.pbm` holds the mask and `<id>.json` the
/// label and provenance. Reads may run concurrently; writes need a single
/// writer.
class TemplateStore {
public:
    explicit TemplateStore(fs::path root, std::vector<std::string> classes = default_class_list());

    const fs::path& root() const noexcept { return root_; }
    const std::vector<std::string>& classes() const noexcept { return classes_; }

    /// Persists t under a fresh `<label>_<n>` id and returns the id.
    std::string save(const Template& t);
    Template load(std::string_view id) const;
    /// Sorted entry ids. Throws Errc::orphan_entry if a mask lacks a sidecar
    /// or the reverse.
    std::vector<std::string> ids() const;
    /// Every template, grouped by position of its label in classes() and by
    /// id within a label. Matching breaks score ties by this order.
    std::vector<Template> load_all() const;

private:
    void require_class(std::string_view label) const;

    fs::path root_;
    std::vector<std::string> classes_;
};

/// "x,y,w,h".
Roi parse_roi(std::string_view text);
std::string format_roi(const Roi& roi);

/// JSON config with optional keys roi ("x,y,w,h" or [x,y,w,h]),
/// background_frames, metric, accept_threshold, presence_min_area,
/// band_mode ("gray"|"auto") and threshold ("auto" or an integer).
PipelineConfig load_pipeline_config(const fs::path& path);
PipelineConfig parse_pipeline_config(std::string_view json_text);

} // namespace bandmatch::io
