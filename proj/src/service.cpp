#include "bandmatch/service.hpp"

#include <algorithm>

#include <fmt/format.h>
#include "httplib.h"
#include "json.hpp"

#include "bandmatch/background.hpp"
#include "bandmatch/bandselect.hpp"
#include "bandmatch/pipeline.hpp"

namespace bandmatch::service {

using json = nlohmann::json;

BandChoice parse_band_choice(std::string_view text) {
    if (text == "gray") return BandChoice::gray;
    if (text == "red") return BandChoice::red;
    if (text == "green") return BandChoice::green;
    if (text == "blue") return BandChoice::blue;
    if (text == "auto") return BandChoice::automatic;
    throw Error(Errc::invalid_argument,
                fmt::format("unknown band '{}' (expected gray, red, green, blue or auto)", text));
}

std::optional<Band> resolve_band(BandChoice choice, const RgbImage& background,
                                 const RgbImage& frame, const Roi& roi) {
    switch (choice) {
    case BandChoice::gray: return std::nullopt;
    case BandChoice::red: return Band::red;
    case BandChoice::green: return Band::green;
    case BandChoice::blue: return Band::blue;
    case BandChoice::automatic: return select_band(background, frame, roi);
    }
    return std::nullopt;
}

RegionBinarization binarize_region(const RgbImage& background, const RgbImage& frame,
                                   const Roi& roi, BandChoice band,
                                   const std::optional<int>& threshold) {
    require_inside(roi, frame.width(), frame.height());
    const auto resolved = resolve_band(band, background, frame, roi);
    Binarization b = binarize_frame(background, frame, roi, resolved, threshold);
    return {crop(b.image, roi), b.threshold, resolved};
}

Reply error_reply(const Error& e) {
    int status = 500;
    switch (e.code()) {
    case Errc::invalid_argument:
    case Errc::out_of_bounds:
    case Errc::parse:
    case Errc::unknown_label:
    case Errc::dimension_mismatch:
        status = 400;
        break;
    case Errc::not_found:
        status = 404;
        break;
    case Errc::degenerate_template:
    case Errc::empty_histogram:
    case Errc::degenerate_ratio:
    case Errc::degenerate_normalization:
    case Errc::empty_input:
        status = 422;
        break;
    default:
        status = 500;
        break;
    }
    Reply r;
    r.status = status;
    r.body = json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump();
    return r;
}

namespace {

RgbImage initial_background(const ServiceOptions& opts, const io::FrameSource& frames) {
    if (opts.background_file) {
        RgbImage bg = io::read_rgb(*opts.background_file);
        if (bg.width() != frames.width() || bg.height() != frames.height())
            throw Error(Errc::dimension_mismatch,
                        fmt::format("background '{}' is {}x{}, frames are {}x{}",
                                    opts.background_file->string(), bg.width(), bg.height(),
                                    frames.width(), frames.height()));
        return bg;
    }
    if (opts.background_frames < 1 ||
        static_cast<std::size_t>(opts.background_frames) > frames.size())
        throw Error(Errc::invalid_argument,
                    fmt::format("cannot average {} background frames from a {}-frame sequence",
                                opts.background_frames, frames.size()));
    BackgroundModel model(frames.width(), frames.height());
    for (int i = 0; i < opts.background_frames; ++i)
        model.update(frames.load(static_cast<std::size_t>(i)));
    return model.snapshot();
}

json parse_body(std::string_view body) {
    try {
        json j = json::parse(body);
        if (!j.is_object())
            throw Error(Errc::parse, "request body must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, fmt::format("malformed JSON body: {}", e.what()));
    }
}

Roi roi_from(const json& v, std::string_view what) {
    if (v.is_string())
        return io::parse_roi(v.get<std::string>());
    if (v.is_array() && v.size() == 4 && std::all_of(v.begin(), v.end(), [](const json& e) {
            return e.is_number_integer();
        }))
        return {v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
    throw Error(Errc::invalid_argument, fmt::format("'{}' must be \"x,y,w,h\" or [x,y,w,h]", what));
}

const json& field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw Error(Errc::invalid_argument, fmt::format("missing field '{}'", key));
    return *it;
}

long frame_from(const json& j) {
    const json& v = field(j, "frame");
    if (!v.is_number_integer())
        throw Error(Errc::invalid_argument, "'frame' must be an integer");
    return v.get<long>();
}

std::optional<int> threshold_from(const json& j) {
    auto it = j.find("threshold");
    if (it == j.end() || (it->is_string() && it->get<std::string>() == "auto"))
        return std::nullopt;
    if (!it->is_number_integer())
        throw Error(Errc::invalid_argument, "'threshold' must be an integer or \"auto\"");
    const int t = it->get<int>();
    if (t < 0 || t > 255)
        throw Error(Errc::invalid_argument, fmt::format("threshold {} outside [0,255]", t));
    return t;
}

BandChoice band_from(const json& j) {
    auto it = j.find("band");
    if (it == j.end())
        return BandChoice::gray;
    if (!it->is_string())
        throw Error(Errc::invalid_argument, "'band' must be a string");
    return parse_band_choice(it->get<std::string>());
}

json roi_json(const Roi& r) { return json::array({r.x, r.y, r.w, r.h}); }

json template_json(const Template& t) {
    const Provenance& s = t.source();
    return {{"id", t.id()},
            {"label", t.label()},
            {"width", t.width()},
            {"height", t.height()},
            {"source",
             {{"frame_index", s.frame_index},
              {"roi", roi_json(s.roi)},
              {"threshold", s.threshold},
              {"band", std::string(band_name(s.band))}}}};
}

Reply json_reply(const json& j, int status = 200) {
    Reply r;
    r.status = status;
    r.body = j.dump();
    return r;
}

Reply png_reply(std::string bytes) {
    Reply r;
    r.content_type = "image/png";
    r.body = std::move(bytes);
    return r;
}

template <typename F>
Reply guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return error_reply(e);
    } catch (const std::exception& e) {
        return error_reply(Error(Errc::io, e.what()));
    }
}

} // namespace

Workbench::Workbench(ServiceOptions options)
    : options_(std::move(options)),
      frames_(io::FrameSource::open(options_.frames_dir)),
      background_(initial_background(options_, frames_)),
      store_(options_.templates_dir, options_.classes) {}

Reply Workbench::list_frames() const {
    return guarded([&] {
        json list = json::array();
        for (std::size_t i = 0; i < frames_.size(); ++i)
            list.push_back({{"index", i}, {"name", frames_.paths()[i].filename().string()}});
        return json_reply({{"count", frames_.size()},
                           {"width", frames_.width()},
                           {"height", frames_.height()},
                           {"frames", list}});
    });
}

Reply Workbench::get_frame(long index) const {
    return guarded([&] {
        if (index < 0 || static_cast<std::size_t>(index) >= frames_.size())
            throw Error(Errc::not_found, fmt::format("frame {} out of range [0,{})", index,
                                                     frames_.size()));
        return png_reply(io::encode_png(frames_.load(static_cast<std::size_t>(index))));
    });
}

Reply Workbench::get_background() const {
    return guarded([&] { return png_reply(io::encode_png(background_)); });
}

Reply Workbench::get_histogram(const Query& query) const {
    return guarded([&] {
        auto param = [&](const char* key) -> const std::string& {
            auto it = query.find(key);
            if (it == query.end())
                throw Error(Errc::invalid_argument, fmt::format("missing query parameter '{}'", key));
            return it->second;
        };
        long index = 0;
        try {
            std::size_t used = 0;
            index = std::stol(param("frame"), &used);
            if (used != param("frame").size())
                throw std::invalid_argument("trailing");
        } catch (const std::logic_error&) {
            throw Error(Errc::invalid_argument, "'frame' must be an integer");
        }
        if (index < 0 || static_cast<std::size_t>(index) >= frames_.size())
            throw Error(Errc::not_found, fmt::format("frame {} out of range", index));
        const Roi roi = io::parse_roi(param("roi"));
        const auto it = query.find("band");
        const BandChoice choice =
            it == query.end() ? BandChoice::gray : parse_band_choice(it->second);

        const RgbImage frame = frames_.load(static_cast<std::size_t>(index));
        require_inside(roi, frame.width(), frame.height());
        const auto band = resolve_band(choice, background_, frame, roi);
        const Histogram h = histogram(difference_image(background_, frame, band), roi);
        return json_reply({{"frame", index},
                           {"roi", roi_json(roi)},
                           {"band", std::string(band_name(band))},
                           {"bins", h.bins},
                           {"suggested", suggest_threshold(h)}});
    });
}

Reply Workbench::preview_binarize(std::string_view body) const {
    return guarded([&] {
        const json req = parse_body(body);
        const long index = frame_from(req);
        const Roi roi = roi_from(field(req, "roi"), "roi");
        const auto format = req.value("format", std::string("png"));
        if (format != "png" && format != "pbm")
            throw Error(Errc::invalid_argument, "'format' must be png or pbm");
        if (index < 0 || static_cast<std::size_t>(index) >= frames_.size())
            throw Error(Errc::not_found, fmt::format("frame {} out of range", index));

        const RgbImage frame = frames_.load(static_cast<std::size_t>(index));
        const auto bin = binarize_region(background_, frame, roi, band_from(req),
                                         threshold_from(req));
        Reply r;
        if (format == "png") {
            r = png_reply(io::encode_png(bin.region));
        } else {
            r.content_type = "image/x-portable-bitmap";
            r.body = io::encode_pbm(bin.region);
        }
        r.headers["X-Threshold"] = std::to_string(bin.threshold);
        r.headers["X-Band"] = std::string(band_name(bin.band));
        r.headers["X-Foreground"] = std::to_string(blob_pixel_count(bin.region));
        return r;
    });
}

Reply Workbench::create_template(std::string_view body) {
    return guarded([&] {
        const json req = parse_body(body);
        const long index = frame_from(req);
        const Roi roi = roi_from(field(req, "roi"), "roi");
        const Roi rect = roi_from(field(req, "rect"), "rect");
        const json& label_v = field(req, "label");
        if (!label_v.is_string())
            throw Error(Errc::invalid_argument, "'label' must be a string");
        const std::string label = label_v.get<std::string>();
        if (std::find(options_.classes.begin(), options_.classes.end(), label) ==
            options_.classes.end())
            throw Error(Errc::unknown_label, fmt::format("'{}' is not a configured class", label));
        if (index < 0 || static_cast<std::size_t>(index) >= frames_.size())
            throw Error(Errc::not_found, fmt::format("frame {} out of range", index));

        const RgbImage frame = frames_.load(static_cast<std::size_t>(index));
        require_inside(roi, frame.width(), frame.height());
        if (!roi.contains(rect))
            throw Error(Errc::out_of_bounds,
                        fmt::format("rect {} is not inside the roi {}", io::format_roi(rect),
                                    io::format_roi(roi)));
        const auto band = resolve_band(band_from(req), background_, frame, roi);
        const Binarization b = binarize_frame(background_, frame, roi, band, threshold_from(req));
        Template t = crop_template(b.image, rect, label,
                                   Provenance{index, rect, b.threshold, band});

        std::string id;
        {
            std::lock_guard lock(store_mutex_);
            id = store_.save(t);
        }
        return json_reply(template_json(t.with_id(id)), 201);
    });
}

Reply Workbench::list_templates() const {
    return guarded([&] {
        json list = json::array();
        for (const auto& t : store_.load_all())
            list.push_back(template_json(t));
        return json_reply({{"templates", list}});
    });
}

Reply Workbench::preview_classify(std::string_view body) const {
    return guarded([&] {
        const json req = parse_body(body);
        const long index = frame_from(req);
        const Roi roi = roi_from(field(req, "roi"), "roi");
        const Metric metric = parse_metric(req.value("metric", std::string("sad")));
        const double accept = req.value("accept_threshold", default_accept_threshold(metric));
        const long min_area = req.value("presence_min_area", 0L);
        if (index < 0 || static_cast<std::size_t>(index) >= frames_.size())
            throw Error(Errc::not_found, fmt::format("frame {} out of range", index));

        const std::vector<Template> templates = store_.load_all();
        if (templates.empty())
            throw Error(Errc::empty_input, "the template store is empty");
        const RgbImage frame = frames_.load(static_cast<std::size_t>(index));
        require_inside(roi, frame.width(), frame.height());
        const auto band = resolve_band(band_from(req), background_, frame, roi);
        const Binarization b = binarize_frame(background_, frame, roi, band, threshold_from(req));
        const long foreground = blob_pixel_count(b.image, roi);

        ClassDecision d;
        if (foreground >= min_area)
            d = classify(b.image, templates, roi, metric, accept);
        json out = {{"frame", index},
                    {"label", d.label},
                    {"template_id", d.template_id},
                    {"metric", std::string(to_string(metric))},
                    {"threshold", b.threshold},
                    {"band", std::string(band_name(band))},
                    {"foreground", foreground}};
        if (d.score) {
            out["x"] = d.score->position.x;
            out["y"] = d.score->position.y;
            out["width"] = d.width;
            out["height"] = d.height;
            out["raw"] = d.score->raw;
            out["normalized"] = d.score->normalized;
            out["score"] = d.score->decision_value();
        }
        return json_reply(out);
    });
}

struct HttpServer::Impl {
    explicit Impl(Workbench& w) : workbench(w) {}
    Workbench& workbench;
    httplib::Server server;
};

namespace {

void send(httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    for (const auto& [k, v] : reply.headers)
        res.set_header(k, v);
    res.set_content(reply.body, reply.content_type);
}

} // namespace

HttpServer::HttpServer(Workbench& workbench) : impl_(std::make_unique<Impl>(workbench)) {
    auto& srv = impl_->server;
    Workbench& wb = impl_->workbench;

    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    srv.Get("/frames", [&wb](const httplib::Request&, httplib::Response& res) {
        send(res, wb.list_frames());
    });
    srv.Get(R"(/frames/(-?\d+))", [&wb](const httplib::Request& req, httplib::Response& res) {
        long index = -1;
        try {
            index = std::stol(req.matches[1].str());
        } catch (const std::logic_error&) {
        }
        send(res, wb.get_frame(index));
    });
    srv.Get("/background", [&wb](const httplib::Request&, httplib::Response& res) {
        send(res, wb.get_background());
    });
    srv.Get("/histogram", [&wb](const httplib::Request& req, httplib::Response& res) {
        Query q;
        for (const auto& [k, v] : req.params)
            q.emplace(k, v);
        send(res, wb.get_histogram(q));
    });
    srv.Post("/preview/binarize", [&wb](const httplib::Request& req, httplib::Response& res) {
        send(res, wb.preview_binarize(req.body));
    });
    srv.Post("/templates", [&wb](const httplib::Request& req, httplib::Response& res) {
        send(res, wb.create_template(req.body));
    });
    srv.Get("/templates", [&wb](const httplib::Request&, httplib::Response& res) {
        send(res, wb.list_templates());
    });
    srv.Post("/preview/classify", [&wb](const httplib::Request& req, httplib::Response& res) {
        send(res, wb.preview_classify(req.body));
    });
    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty())
            return;
        const std::string code = res.status == 404 ? "not_found" : "http_error";
        res.set_content(json{{"error", code}, {"message", httplib::status_message(res.status)}}.dump(),
                        "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0)
            throw Error(Errc::io, fmt::format("cannot bind {}", host));
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port))
        throw Error(Errc::io, fmt::format("cannot bind {}:{}", host, port));
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running())
        impl_->server.stop();
}

} // namespace bandmatch::service
