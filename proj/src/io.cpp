#include "bandmatch/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"
#include <png.h>

namespace bandmatch::io {

using json = nlohmann::json;

namespace {

struct Decoded {
    ImageFormat format = ImageFormat::ppm;
    int width = 0;
    int height = 0;
    int channels = 1;     // 1 or 3
    bool bitmap = false;  // values are 0/1 bits rather than intensities
    std::vector<std::uint8_t> data;
};

[[noreturn]] void fail(Errc code, std::string_view name, std::string_view what) {
    throw Error(code, fmt::format("{}: {}", name, what));
}

bool is_jpeg(std::string_view b) {
    return b.size() >= 3 && static_cast<unsigned char>(b[0]) == 0xFF &&
           static_cast<unsigned char>(b[1]) == 0xD8 && static_cast<unsigned char>(b[2]) == 0xFF;
}

bool is_png(std::string_view b) {
    return b.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(b.data()), 0, 8) == 0;
}

// Cursor over a PNM byte stream.
class PnmReader {
public:
    PnmReader(std::string_view bytes, std::string_view name) : b_(bytes), name_(name) {}

    void skip_space() {
        while (pos_ < b_.size()) {
            const char c = b_[pos_];
            if (c == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n')
                    ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    int integer() {
        skip_space();
        int value = 0;
        auto [ptr, ec] = std::from_chars(b_.data() + pos_, b_.data() + b_.size(), value);
        if (ec != std::errc{} || value < 0)
            fail(Errc::parse, name_, "malformed PNM header");
        pos_ = static_cast<std::size_t>(ptr - b_.data());
        return value;
    }

    // Exactly one whitespace byte separates the header from raster data.
    void end_header() {
        if (pos_ >= b_.size() || !std::isspace(static_cast<unsigned char>(b_[pos_])))
            fail(Errc::parse, name_, "malformed PNM header");
        ++pos_;
    }

    int bit() {
        skip_space();
        if (pos_ >= b_.size() || (b_[pos_] != '0' && b_[pos_] != '1'))
            fail(Errc::parse, name_, "truncated or malformed PBM data");
        return b_[pos_++] - '0';
    }

    std::string_view take(std::size_t n) {
        if (b_.size() - pos_ < n)
            fail(Errc::parse, name_, "truncated raster data");
        auto out = b_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::string_view name() const { return name_; }

private:
    std::string_view b_;
    std::string_view name_;
    std::size_t pos_ = 2;
};

Decoded decode_pnm(std::string_view bytes, std::string_view name, bool header_only) {
    const char kind = bytes[1];
    Decoded d;
    PnmReader r(bytes, name);
    d.width = r.integer();
    d.height = r.integer();
    if (d.width < 1 || d.height < 1)
        fail(Errc::parse, name, "PNM dimensions must be positive");
    const std::size_t count = static_cast<std::size_t>(d.width) * d.height;

    if (kind == '1' || kind == '4') {
        d.format = ImageFormat::pbm;
        d.bitmap = true;
        if (header_only)
            return d;
        d.data.resize(count);
        if (kind == '1') {
            for (auto& v : d.data)
                v = static_cast<std::uint8_t>(r.bit());
        } else {
            r.end_header();
            const std::size_t stride = (static_cast<std::size_t>(d.width) + 7) / 8;
            for (int y = 0; y < d.height; ++y) {
                auto row = r.take(stride);
                for (int x = 0; x < d.width; ++x) {
                    const auto byte = static_cast<unsigned char>(row[x / 8]);
                    d.data[static_cast<std::size_t>(y) * d.width + x] = (byte >> (7 - x % 8)) & 1;
                }
            }
        }
        return d;
    }

    d.channels = (kind == '3' || kind == '6') ? 3 : 1;
    d.format = d.channels == 3 ? ImageFormat::ppm : ImageFormat::pgm;
    const int maxval = r.integer();
    if (maxval < 1 || maxval > 255)
        fail(Errc::unsupported_format, name, fmt::format("PNM maxval {} not supported", maxval));
    if (header_only)
        return d;
    d.data.resize(count * d.channels);
    if (kind == '2' || kind == '3') {
        for (auto& v : d.data) {
            const int x = r.integer();
            if (x > maxval)
                fail(Errc::parse, name, "sample exceeds maxval");
            v = static_cast<std::uint8_t>(x);
        }
    } else {
        r.end_header();
        auto raw = r.take(d.data.size());
        std::copy(raw.begin(), raw.end(), d.data.begin());
        if (std::any_of(d.data.begin(), d.data.end(), [&](std::uint8_t v) { return v > maxval; }))
            fail(Errc::parse, name, "sample exceeds maxval");
    }
    if (maxval != 255)
        for (auto& v : d.data)
            v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
    return d;
}

Decoded decode_png(std::string_view bytes, std::string_view name, bool header_only) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        fail(Errc::parse, name, fmt::format("invalid PNG ({})", image.message));
    Decoded d;
    d.format = ImageFormat::png;
    d.width = static_cast<int>(image.width);
    d.height = static_cast<int>(image.height);
    d.channels = (image.format & PNG_FORMAT_FLAG_COLOR) ? 3 : 1;
    if (header_only) {
        png_image_free(&image);
        return d;
    }
    image.format = d.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    d.data.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, d.data.data(), 0, nullptr))
        fail(Errc::parse, name, fmt::format("cannot decode PNG ({})", image.message));
    return d;
}

Decoded decode(std::string_view bytes, std::string_view name, bool header_only = false) {
    if (is_jpeg(bytes))
        fail(Errc::unsupported_format, name, "JPEG is lossy and not accepted");
    if (is_png(bytes))
        return decode_png(bytes, name, header_only);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '1' && bytes[1] <= '6')
        return decode_pnm(bytes, name, header_only);
    fail(Errc::unsupported_format, name, "unrecognized image format");
}

std::string png_bytes(const std::uint8_t* data, int width, int height, png_uint_32 format) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr))
        throw Error(Errc::io, fmt::format("PNG encoding failed: {}", image.message));
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr))
        throw Error(Errc::io, fmt::format("PNG encoding failed: {}", image.message));
    out.resize(size);
    return out;
}

std::string extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

} // namespace

ImageInfo probe_image(std::string_view bytes, std::string_view name) {
    Decoded d = decode(bytes, name, true);
    return {d.width, d.height, d.format};
}

RgbImage decode_rgb(std::string_view bytes, std::string_view name) {
    Decoded d = decode(bytes, name);
    std::vector<Rgb> px(static_cast<std::size_t>(d.width) * d.height);
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (d.channels == 3) {
            px[i] = {d.data[i * 3], d.data[i * 3 + 1], d.data[i * 3 + 2]};
        } else {
            // PBM 1 is black.
            const std::uint8_t v = d.bitmap ? (d.data[i] ? 0 : 255) : d.data[i];
            px[i] = {v, v, v};
        }
    }
    return RgbImage(d.width, d.height, std::move(px));
}

GrayImage decode_gray(std::string_view bytes, std::string_view name) {
    Decoded d = decode(bytes, name);
    if (d.channels != 1 || d.bitmap)
        fail(Errc::unsupported_format, name, "expected a single-channel gray image");
    return GrayImage(d.width, d.height, std::move(d.data));
}

BinaryImage decode_binary(std::string_view bytes, std::string_view name) {
    Decoded d = decode(bytes, name);
    if (d.channels != 1)
        fail(Errc::unsupported_format, name, "expected a bitmap or gray mask");
    if (!d.bitmap)
        for (auto& v : d.data)
            v = v ? 1 : 0;
    return BinaryImage(d.width, d.height, std::move(d.data));
}

std::string encode_ppm(const RgbImage& img) {
    std::string out = fmt::format("P6\n{} {}\n255\n", img.width(), img.height());
    out.reserve(out.size() + img.size() * 3);
    for (const Rgb& p : img.pixels()) {
        out.push_back(static_cast<char>(p.r));
        out.push_back(static_cast<char>(p.g));
        out.push_back(static_cast<char>(p.b));
    }
    return out;
}

std::string encode_pgm(const GrayImage& img) {
    std::string out = fmt::format("P5\n{} {}\n255\n", img.width(), img.height());
    out.append(reinterpret_cast<const char*>(img.pixels().data()), img.size());
    return out;
}

std::string encode_pbm(const BinaryImage& img) {
    std::string out = fmt::format("P4\n{} {}\n", img.width(), img.height());
    const std::size_t stride = (static_cast<std::size_t>(img.width()) + 7) / 8;
    for (int y = 0; y < img.height(); ++y) {
        std::string row(stride, '\0');
        auto src = img.row(y);
        for (int x = 0; x < img.width(); ++x)
            if (src[x])
                row[x / 8] = static_cast<char>(row[x / 8] | (0x80 >> (x % 8)));
        out += row;
    }
    return out;
}

std::string encode_png(const RgbImage& img) {
    static_assert(sizeof(Rgb) == 3);
    return png_bytes(reinterpret_cast<const std::uint8_t*>(img.pixels().data()), img.width(),
                     img.height(), PNG_FORMAT_RGB);
}

std::string encode_png(const GrayImage& img) {
    return png_bytes(img.pixels().data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

std::string encode_png(const BinaryImage& img) {
    std::vector<std::uint8_t> buf(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), buf.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
    return png_bytes(buf.data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error(Errc::io, fmt::format("cannot read '{}'", path.string()));
    return std::move(ss).str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::io, fmt::format("cannot create '{}'", path.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(Errc::io, fmt::format("cannot write '{}'", path.string()));
}

ImageInfo probe_image_file(const fs::path& path) {
    return probe_image(read_file(path), path.string());
}

RgbImage read_rgb(const fs::path& path) {
    return decode_rgb(read_file(path), path.string());
}

GrayImage read_gray(const fs::path& path) {
    return decode_gray(read_file(path), path.string());
}

BinaryImage read_binary(const fs::path& path) {
    return decode_binary(read_file(path), path.string());
}

void write_image(const fs::path& path, const RgbImage& img) {
    const auto ext = extension(path);
    if (ext == ".png")
        return write_file(path, encode_png(img));
    if (ext == ".ppm" || ext == ".pnm")
        return write_file(path, encode_ppm(img));
    throw Error(Errc::unsupported_format,
                fmt::format("'{}': colour images are written as .ppm or .png", path.string()));
}

void write_image(const fs::path& path, const GrayImage& img) {
    const auto ext = extension(path);
    if (ext == ".png")
        return write_file(path, encode_png(img));
    if (ext == ".pgm" || ext == ".pnm")
        return write_file(path, encode_pgm(img));
    throw Error(Errc::unsupported_format,
                fmt::format("'{}': gray images are written as .pgm or .png", path.string()));
}

void write_image(const fs::path& path, const BinaryImage& img) {
    const auto ext = extension(path);
    if (ext == ".png")
        return write_file(path, encode_png(img));
    if (ext == ".pbm" || ext == ".pnm")
        return write_file(path, encode_pbm(img));
    throw Error(Errc::unsupported_format,
                fmt::format("'{}': binary images are written as .pbm or .png", path.string()));
}

bool natural_less(std::string_view a, std::string_view b) {
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (digit(a[i]) && digit(b[j])) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && digit(a[ie])) ++ie;
            while (je < b.size() && digit(b[je])) ++je;
            auto na = a.substr(i, ie - i);
            auto nb = b.substr(j, je - j);
            const auto za = na.find_first_not_of('0');
            const auto zb = nb.find_first_not_of('0');
            na = za == std::string_view::npos ? std::string_view{} : na.substr(za);
            nb = zb == std::string_view::npos ? std::string_view{} : nb.substr(zb);
            if (na.size() != nb.size())
                return na.size() < nb.size();
            if (na != nb)
                return na < nb;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j])
                return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if (a.size() - i != b.size() - j)
        return a.size() - i < b.size() - j;
    // Equal under natural order (e.g. f01 vs f1): fall back to plain order.
    return a < b;
}

FrameSource FrameSource::open(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw Error(Errc::io, fmt::format("'{}' is not a directory", dir.string()));

    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = extension(entry.path());
        if (ext == ".jpg" || ext == ".jpeg")
            throw Error(Errc::unsupported_format,
                        fmt::format("'{}': lossy frames are not accepted", entry.path().string()));
        if (ext == ".ppm" || ext == ".pnm" || ext == ".pgm" || ext == ".png")
            paths.push_back(entry.path());
    }
    if (paths.empty())
        throw Error(Errc::empty_input, fmt::format("'{}' contains no frames", dir.string()));
    std::sort(paths.begin(), paths.end(), [](const fs::path& a, const fs::path& b) {
        return natural_less(a.filename().string(), b.filename().string());
    });

    FrameSource src;
    src.paths_ = std::move(paths);
    for (const auto& p : src.paths_) {
        ImageInfo info;
        try {
            info = probe_image_file(p);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("unreadable frame '{}': {}", p.string(), e.what()));
        }
        if (src.width_ == 0) {
            src.width_ = info.width;
            src.height_ = info.height;
        } else if (info.width != src.width_ || info.height != src.height_) {
            throw Error(Errc::dimension_mismatch,
                        fmt::format("frame '{}' is {}x{}, earlier frames are {}x{}", p.string(),
                                    info.width, info.height, src.width_, src.height_));
        }
    }
    return src;
}

RgbImage FrameSource::load(std::size_t index) const {
    if (index >= paths_.size())
        throw Error(Errc::not_found,
                    fmt::format("frame {} out of range (sequence has {})", index, paths_.size()));
    RgbImage img = read_rgb(paths_[index]);
    if (img.width() != width_ || img.height() != height_)
        throw Error(Errc::dimension_mismatch,
                    fmt::format("frame '{}' changed size on disk", paths_[index].string()));
    return img;
}

FrameFeed FrameSource::feed(std::size_t first, std::size_t count) const {
    const std::size_t end = count > paths_.size() - std::min(first, paths_.size())
                                ? paths_.size()
                                : first + count;
    auto next = std::make_shared<std::size_t>(first);
    return [src = *this, next, end]() -> std::optional<RgbImage> {
        if (*next >= end)
            return std::nullopt;
        return src.load((*next)++);
    };
}

std::vector<std::string> default_class_list() {
    return {kDefaultClasses.begin(), kDefaultClasses.end()};
}

TemplateStore::TemplateStore(fs::path root, std::vector<std::string> classes)
    : root_(std::move(root)), classes_(std::move(classes)) {
    if (classes_.empty())
        throw Error(Errc::invalid_argument, "template store needs at least one class");
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (!fs::is_directory(root_))
        throw Error(Errc::io, fmt::format("cannot use '{}' as a template store", root_.string()));
}

void TemplateStore::require_class(std::string_view label) const {
    if (std::find(classes_.begin(), classes_.end(), label) == classes_.end())
        throw Error(Errc::unknown_label,
                    fmt::format("label '{}' is not one of the configured classes", label));
}

std::string TemplateStore::save(const Template& t) {
    require_class(t.label());
    std::string id;
    for (int n = 1;; ++n) {
        id = fmt::format("{}_{:03}", t.label(), n);
        if (!fs::exists(root_ / (id + ".pbm")) && !fs::exists(root_ / (id + ".json")))
            break;
    }

    const Provenance& src = t.source();
    json meta = {
        {"id", id},
        {"label", t.label()},
        {"width", t.width()},
        {"height", t.height()},
        {"source",
         {{"frame_index", src.frame_index},
          {"roi", {src.roi.x, src.roi.y, src.roi.w, src.roi.h}},
          {"threshold", src.threshold},
          {"band", std::string(band_name(src.band))}}},
    };
    // Mask first so a crash never leaves a sidecar without its mask.
    const fs::path mask = root_ / (id + ".pbm");
    const fs::path side = root_ / (id + ".json");
    write_file(fs::path(mask).concat(".tmp"), encode_pbm(t.mask()));
    fs::rename(fs::path(mask).concat(".tmp"), mask);
    write_file(fs::path(side).concat(".tmp"), meta.dump(2) + "\n");
    fs::rename(fs::path(side).concat(".tmp"), side);
    return id;
}

Template TemplateStore::load(std::string_view id) const {
    const fs::path mask = root_ / (std::string(id) + ".pbm");
    const fs::path side = root_ / (std::string(id) + ".json");
    const bool has_mask = fs::exists(mask);
    const bool has_side = fs::exists(side);
    if (!has_mask && !has_side)
        throw Error(Errc::not_found, fmt::format("no template '{}' in '{}'", id, root_.string()));
    if (!has_side)
        throw Error(Errc::orphan_entry, fmt::format("template '{}' has no metadata sidecar", id));
    if (!has_mask)
        throw Error(Errc::orphan_entry, fmt::format("template '{}' has no mask file", id));

    BinaryImage bits = read_binary(mask);
    try {
        const json meta = json::parse(read_file(side));
        const std::string label = meta.at("label").get<std::string>();
        require_class(label);
        if (meta.at("width").get<int>() != bits.width() ||
            meta.at("height").get<int>() != bits.height())
            throw Error(Errc::parse, fmt::format("template '{}': sidecar size disagrees with mask", id));
        const json& s = meta.at("source");
        const auto roi = s.at("roi").get<std::vector<int>>();
        if (roi.size() != 4)
            throw Error(Errc::parse, fmt::format("template '{}': roi needs 4 values", id));
        Provenance p;
        p.frame_index = s.at("frame_index").get<long>();
        p.roi = {roi[0], roi[1], roi[2], roi[3]};
        p.threshold = s.at("threshold").get<int>();
        p.band = parse_band_name(s.at("band").get<std::string>());
        return Template(std::move(bits), label, p, std::string(id));
    } catch (const json::exception& e) {
        throw Error(Errc::parse, fmt::format("template '{}': bad sidecar: {}", id, e.what()));
    }
}

std::vector<std::string> TemplateStore::ids() const {
    std::vector<std::string> masks, sides;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = extension(entry.path());
        if (ext == ".pbm")
            masks.push_back(entry.path().stem().string());
        else if (ext == ".json")
            sides.push_back(entry.path().stem().string());
    }
    std::sort(masks.begin(), masks.end());
    std::sort(sides.begin(), sides.end());
    std::vector<std::string> lonely;
    std::set_symmetric_difference(masks.begin(), masks.end(), sides.begin(), sides.end(),
                                  std::back_inserter(lonely));
    if (!lonely.empty())
        throw Error(Errc::orphan_entry,
                    fmt::format("template entry '{}' is missing its mask or sidecar", lonely.front()));
    std::sort(masks.begin(), masks.end(),
              [](const std::string& a, const std::string& b) { return natural_less(a, b); });
    return masks;
}

std::vector<Template> TemplateStore::load_all() const {
    std::vector<Template> out;
    for (const auto& id : ids())
        out.push_back(load(id));
    const auto rank = [this](const Template& t) {
        return std::find(classes_.begin(), classes_.end(), t.label()) - classes_.begin();
    };
    std::stable_sort(out.begin(), out.end(),
                     [&](const Template& a, const Template& b) { return rank(a) < rank(b); });
    return out;
}

Roi parse_roi(std::string_view text) {
    int v[4];
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const auto end = i < 3 ? text.find(',', pos) : text.size();
        if (end == std::string_view::npos)
            throw Error(Errc::invalid_argument, fmt::format("roi '{}' must be x,y,w,h", text));
        auto part = text.substr(pos, end - pos);
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v[i]);
        if (ec != std::errc{} || ptr != part.data() + part.size())
            throw Error(Errc::invalid_argument, fmt::format("roi '{}' must be x,y,w,h", text));
        pos = end + 1;
    }
    if (v[2] < 1 || v[3] < 1 || v[0] < 0 || v[1] < 0)
        throw Error(Errc::invalid_argument,
                    fmt::format("roi '{}' needs non-negative origin and positive size", text));
    return {v[0], v[1], v[2], v[3]};
}

std::string format_roi(const Roi& roi) {
    return fmt::format("{},{},{},{}", roi.x, roi.y, roi.w, roi.h);
}

PipelineConfig parse_pipeline_config(std::string_view json_text) {
    PipelineConfig c;
    try {
        const json j = json::parse(json_text);
        if (j.contains("roi")) {
            const json& r = j.at("roi");
            if (r.is_string()) {
                c.roi = parse_roi(r.get<std::string>());
            } else {
                const auto v = r.get<std::vector<int>>();
                if (v.size() != 4)
                    throw Error(Errc::invalid_argument, "roi needs 4 values");
                c.roi = {v[0], v[1], v[2], v[3]};
            }
        }
        if (j.contains("background_frames"))
            c.background_frames = j.at("background_frames").get<int>();
        if (j.contains("metric")) {
            c.metric = parse_metric(j.at("metric").get<std::string>());
            c.accept_threshold = default_accept_threshold(c.metric);
        }
        if (j.contains("accept_threshold"))
            c.accept_threshold = j.at("accept_threshold").get<double>();
        if (j.contains("presence_min_area"))
            c.presence_min_area = j.at("presence_min_area").get<long>();
        if (j.contains("band_mode")) {
            const auto m = j.at("band_mode").get<std::string>();
            if (m == "gray")
                c.band_mode = BandMode::gray;
            else if (m == "auto")
                c.band_mode = BandMode::automatic;
            else
                throw Error(Errc::invalid_argument, fmt::format("unknown band_mode '{}'", m));
        }
        if (j.contains("threshold")) {
            const json& t = j.at("threshold");
            if (t.is_string() && t.get<std::string>() == "auto") {
                c.threshold_mode = ThresholdMode::automatic;
            } else {
                c.threshold_mode = ThresholdMode::fixed;
                c.fixed_threshold = t.get<int>();
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse, fmt::format("bad pipeline config: {}", e.what()));
    }
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    try {
        return parse_pipeline_config(read_file(path));
    } catch (const Error& e) {
        throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
    }
}

} // namespace bandmatch::io
