#include "bandmatch/cli.hpp"

#include <chrono>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include "CLI11.hpp"

#include "bandmatch/background.hpp"
#include "bandmatch/bandselect.hpp"
#include "bandmatch/evalkit.hpp"
#include "bandmatch/io.hpp"
#include "bandmatch/pipeline.hpp"
#include "bandmatch/service.hpp"
#include "bandmatch/synthetic.hpp"

namespace bandmatch::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::optional<int> parse_threshold_flag(const std::string& text) {
    if (text == "auto")
        return std::nullopt;
    try {
        std::size_t used = 0;
        const int t = std::stoi(text, &used);
        if (used == text.size() && t >= 0 && t <= 255)
            return t;
    } catch (const std::logic_error&) {
    }
    throw Error(Errc::invalid_argument,
                fmt::format("--threshold must be 'auto' or an integer in [0,255], got '{}'", text));
}

// ---------------------------------------------------------------- build-background

struct BuildBackgroundArgs {
    std::string frames;
    int count = kDefaultBackgroundFrames;
    std::string out;
};

int build_background(const BuildBackgroundArgs& a, std::ostream& out) {
    if (a.count < 1)
        throw Error(Errc::invalid_argument, "--count must be at least 1");
    const auto frames = io::FrameSource::open(a.frames);
    if (static_cast<std::size_t>(a.count) > frames.size())
        throw Error(Errc::invalid_argument,
                    fmt::format("--count {} exceeds the {} frames in '{}'", a.count, frames.size(),
                                a.frames));
    BackgroundModel model(frames.width(), frames.height());
    for (int i = 0; i < a.count; ++i)
        model.update(frames.load(static_cast<std::size_t>(i)));
    io::write_image(a.out, model.snapshot());
    const auto m = model.global_mean();
    out << fmt::format("k={}\nmean r={:.3f} g={:.3f} b={:.3f}\nwrote {}\n", model.frames(), m[0],
                       m[1], m[2], a.out);
    return 0;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
    std::string frames;
    std::string background;
    std::string templates;
    std::string roi;
    std::string metric = "sad";
    std::string band = "gray";
    std::string threshold = "auto";
    std::string events = "-";
    std::string annotate_dir;
    std::string config;
    std::string classes;
    int count = kDefaultBackgroundFrames;
    double accept = -1.0;
    long min_area = kDefaultPresenceMinArea;
    CLI::App* cmd = nullptr;
};

int classify_cmd(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
    auto given = [&](const char* name) { return a.cmd->count(name) > 0; };

    // Everything is validated before the first frame is read.
    PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : io::load_pipeline_config(a.config);
    if (given("--roi") || a.config.empty())
        cfg.roi = io::parse_roi(a.roi);
    if (given("--metric") || a.config.empty()) {
        cfg.metric = parse_metric(a.metric);
        cfg.accept_threshold = default_accept_threshold(cfg.metric);
    }
    if (given("--accept"))
        cfg.accept_threshold = a.accept;
    if (given("--band") || a.config.empty()) {
        if (a.band == "gray")
            cfg.band_mode = BandMode::gray;
        else if (a.band == "auto")
            cfg.band_mode = BandMode::automatic;
        else
            throw Error(Errc::invalid_argument, fmt::format("--band must be gray or auto, got '{}'", a.band));
    }
    if (given("--threshold") || a.config.empty()) {
        const auto t = parse_threshold_flag(a.threshold);
        cfg.threshold_mode = t ? ThresholdMode::fixed : ThresholdMode::automatic;
        if (t)
            cfg.fixed_threshold = *t;
    }
    if (given("--min-area"))
        cfg.presence_min_area = a.min_area;
    if (given("--count"))
        cfg.background_frames = a.count;
    cfg.validate();

    const auto frames = io::FrameSource::open(a.frames);
    require_inside(cfg.roi, frames.width(), frames.height());
    std::optional<RgbImage> background;
    if (!a.background.empty()) {
        background = io::read_rgb(a.background);
        if (background->width() != frames.width() || background->height() != frames.height())
            throw Error(Errc::dimension_mismatch,
                        fmt::format("background '{}' is {}x{}, frames are {}x{}", a.background,
                                    background->width(), background->height(), frames.width(),
                                    frames.height()));
    } else if (static_cast<std::size_t>(cfg.background_frames) >= frames.size()) {
        throw Error(Errc::invalid_argument,
                    fmt::format("'{}' has {} frames; need more than the {} background frames",
                                a.frames, frames.size(), cfg.background_frames));
    }
    const io::TemplateStore store(a.templates, a.classes.empty() ? io::default_class_list()
                                                               : split_list(a.classes));
    std::vector<Template> templates = store.load_all();
    if (templates.empty())
        throw Error(Errc::empty_input, fmt::format("no templates in '{}'", a.templates));

    Pipeline pipeline(cfg, std::move(templates));
    if (background)
        pipeline.set_background(std::move(*background));

    std::ofstream file;
    std::ostream* sink = &out;
    if (a.events != "-") {
        file.open(a.events, std::ios::trunc);
        if (!file)
            throw Error(Errc::io, fmt::format("cannot create '{}'", a.events));
        sink = &file;
    }
    if (!a.annotate_dir.empty())
        fs::create_directories(a.annotate_dir);

    *sink << kEventHeader << '\n';
    std::vector<ClassificationEvent> events;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::optional<ClassificationEvent> event;
        RgbImage frame = frames.load(i);
        try {
            event = pipeline.push(frame);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("frame '{}': {}", frames.paths()[i].string(), e.what()));
        }
        if (!event)
            continue;
        *sink << format_event(*event) << '\n';
        if (!a.annotate_dir.empty())
            io::write_image(fs::path(a.annotate_dir) / fmt::format("frame_{:05}.png", i),
                            annotate(frame, *event));
        events.push_back(std::move(*event));
    }
    sink->flush();

    if (events.empty()) {
        out << "no classification events\n";
        return 0;
    }
    std::ostream& report = a.events == "-" ? err : out;
    report << format_throughput(measure_throughput(events));
    return 0;
}

// ---------------------------------------------------------------- band-select

struct BandSelectArgs {
    std::string frame;
    std::string background;
    std::string roi;
    std::string out_dir;
    std::string fg_area;
    std::string bg_area;
};

int band_select_cmd(const BandSelectArgs& a, std::ostream& out) {
    const Roi roi = io::parse_roi(a.roi);
    if (a.fg_area.empty() != a.bg_area.empty())
        throw Error(Errc::invalid_argument, "--fg-area and --bg-area must be given together");
    const RgbImage frame = io::read_rgb(a.frame);
    const RgbImage background = io::read_rgb(a.background);
    const BandDeltas deltas = band_deltas(background, frame);
    const BandAverages avg = band_averages(deltas, roi);
    out << fmt::format("average delta  red={:.2f} green={:.2f} blue={:.2f}\n", avg.r, avg.g, avg.b);
    out << "dominant band: " << to_string(dominant_band(avg)) << '\n';

    if (!a.fg_area.empty()) {
        const auto v = ctt_variances(frame, background, io::parse_roi(a.fg_area),
                                     io::parse_roi(a.bg_area));
        out << fmt::format("ctt variances  red={} green={} blue={}\n", v.vr, v.vg, v.vb);
        const auto& n = v.require_normalized();
        out << fmt::format("ctt normalized red={:.4f} green={:.4f} blue={:.4f}\n", n[0], n[1], n[2]);
        out << "ctt band: " << to_string(ctt_select(v)) << '\n';
    }
    if (!a.out_dir.empty()) {
        fs::create_directories(a.out_dir);
        for (Band b : kAllBands) {
            const fs::path p = fs::path(a.out_dir) / fmt::format("delta_{}.pgm", to_string(b));
            io::write_image(p, deltas.band(b));
            out << "wrote " << p.string() << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------- binarize

struct BinarizeArgs {
    std::string frame;
    std::string background;
    std::string roi;
    std::string band = "gray";
    std::string threshold = "auto";
    std::string out;
};

int binarize_cmd(const BinarizeArgs& a, std::ostream& out) {
    const Roi roi = io::parse_roi(a.roi);
    const auto choice = service::parse_band_choice(a.band);
    const auto t = parse_threshold_flag(a.threshold);
    const RgbImage frame = io::read_rgb(a.frame);
    const RgbImage background = io::read_rgb(a.background);
    const auto bin = service::binarize_region(background, frame, roi, choice, t);
    io::write_image(a.out, bin.region);
    out << fmt::format("threshold={} band={} foreground={}\nwrote {}\n", bin.threshold,
                       band_name(bin.band), blob_pixel_count(bin.region), a.out);
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string events;
    std::string truth;
    std::string classes;
    std::string csv;
};

int eval_cmd(const EvalArgs& a, std::ostream& out) {
    std::ifstream ev(a.events);
    if (!ev)
        throw Error(Errc::io, fmt::format("cannot open '{}'", a.events));
    std::ifstream tr(a.truth);
    if (!tr)
        throw Error(Errc::io, fmt::format("cannot open '{}'", a.truth));
    const auto records = read_events(ev);
    const auto truth = read_truth(tr);
    const auto predictions = to_predictions(records);
    auto classes = a.classes.empty() ? infer_classes(truth, predictions) : split_list(a.classes);
    const ConfusionMatrix m = accumulate(predictions, truth, std::move(classes));
    out << report_table(m);
    long correct = 0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        correct += m.count(r, r);
    if (m.total() > 0)
        out << fmt::format("accuracy: {:.1f} % ({} / {})\n",
                           100.0 * static_cast<double>(correct) / static_cast<double>(m.total()),
                           correct, m.total());
    if (!a.csv.empty()) {
        io::write_file(a.csv, report_csv(m));
        out << "wrote " << a.csv << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string sizes;
    std::string roi_size = "200x150";
    int repeat = 3;
    std::uint64_t seed = 7;
};

std::pair<int, int> parse_size(const std::string& text) {
    const auto x = text.find('x');
    try {
        if (x != std::string::npos) {
            std::size_t u1 = 0, u2 = 0;
            const int w = std::stoi(text.substr(0, x), &u1);
            const int h = std::stoi(text.substr(x + 1), &u2);
            if (u1 == x && u2 == text.size() - x - 1 && w > 0 && h > 0)
                return {w, h};
        }
    } catch (const std::logic_error&) {
    }
    throw Error(Errc::invalid_argument, fmt::format("size '{}' must look like WxH", text));
}

int bench_cmd(const BenchArgs& a, std::ostream& out) {
    if (a.repeat < 1)
        throw Error(Errc::invalid_argument, "--repeat must be at least 1");
    const auto [rw, rh] = parse_size(a.roi_size);

    std::vector<Template> templates;
    if (a.sizes.empty()) {
        templates = synth::class_templates();
    } else {
        for (const auto& s : split_list(a.sizes)) {
            const auto [w, h] = parse_size(s);
            std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h, 1);
            templates.emplace_back(BinaryImage(w, h, std::move(px)), s);
        }
    }

    std::mt19937_64 rng(a.seed);
    const Roi roi{0, 0, rw, rh};
    [[maybe_unused]] volatile double sink = 0.0;
    std::vector<std::string> header{"Template matching technique"};
    for (const auto& t : templates)
        header.push_back(fmt::format("{} ({}x{})", t.label(), t.width(), t.height()));

    std::string table = fmt::format("{:<34}", header[0]);
    for (std::size_t i = 1; i < header.size(); ++i)
        table += fmt::format("  {:>18}", header[i]);
    table += '\n';

    const std::pair<Metric, const char*> rows[] = {
        {Metric::sad, "a) Sum of absolute differences"},
        {Metric::ncc, "b) Normalised cross-correlation"},
        {Metric::ssd, "c) Sum of squared differences"}};
    for (const auto& [metric, name] : rows) {
        table += fmt::format("{:<34}", name);
        for (const auto& t : templates) {
            if (t.width() > rw || t.height() > rh)
                throw Error(Errc::out_of_bounds,
                            fmt::format("template {}x{} exceeds the {}x{} roi", t.width(),
                                        t.height(), rw, rh));
            std::uniform_int_distribution<int> px(0, rw - t.width());
            std::uniform_int_distribution<int> py(0, rh - t.height());
            BinaryImage scene = paste(BinaryImage(rw, rh), t.mask(), {px(rng), py(rng)});
            scene = synth::salt_and_pepper(scene, 0.05, rng);
            double total = 0.0;
            for (int r = 0; r < a.repeat; ++r) {
                const auto start = std::chrono::steady_clock::now();
                sink = best_match(scene, t, roi, metric).raw;
                total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
            }
            table += fmt::format("  {:>18.1f}", static_cast<double>(a.repeat) / total);
        }
        table += '\n';
    }
    out << "Loop cycle speed (frames / sec.), exhaustive search over a " << rw << "x" << rh
        << " region\n"
        << table;
    return 0;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
    std::string frames;
    std::string templates;
    std::string background;
    std::string host = "127.0.0.1";
    std::string classes;
    int port = 8080;
    int count = kDefaultBackgroundFrames;
};

int serve_cmd(const ServeArgs& a, std::ostream& out) {
    service::ServiceOptions opts;
    opts.frames_dir = a.frames;
    opts.templates_dir = a.templates;
    if (!a.background.empty())
        opts.background_file = a.background;
    opts.background_frames = a.count;
    if (!a.classes.empty())
        opts.classes = split_list(a.classes);
    service::Workbench workbench(std::move(opts));
    service::HttpServer server(workbench);
    const int port = server.bind(a.host, a.port);
    out << fmt::format("serving {} frames on http://{}:{}\n", workbench.frames().size(), a.host, port)
        << std::flush;
    server.listen();
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vehicle classification by binary template matching"};
    app.name("bandmatch");
    app.require_subcommand(1);
    std::function<int()> action;

    BuildBackgroundArgs bb;
    auto* c_bb = app.add_subcommand("build-background", "Average the first N frames into a background image");
    c_bb->add_option("--frames", bb.frames, "Frame directory")->required();
    c_bb->add_option("--count", bb.count, "Frames to average")->capture_default_str();
    c_bb->add_option("--out", bb.out, "Output image (.ppm or .png)")->required();
    c_bb->callback([&] { action = [&] { return build_background(bb, out); }; });

    ClassifyArgs cl;
    auto* c_cl = app.add_subcommand("classify", "Run the classification loop over a frame sequence");
    cl.cmd = c_cl;
    c_cl->add_option("--frames", cl.frames, "Frame directory")->required();
    c_cl->add_option("--background", cl.background, "Precomputed background; otherwise the first --count frames are averaged");
    c_cl->add_option("--count", cl.count, "Background frames when --background is absent")->capture_default_str();
    c_cl->add_option("--templates", cl.templates, "Template store directory")->required();
    c_cl->add_option("--roi", cl.roi, "Region of interest X,Y,W,H");
    c_cl->add_option("--metric", cl.metric, "sad, ncc or ssd")->capture_default_str();
    c_cl->add_option("--band", cl.band, "gray or auto")->capture_default_str();
    c_cl->add_option("--threshold", cl.threshold, "auto or a fixed T in [0,255]")->capture_default_str();
    c_cl->add_option("--accept", cl.accept, "Acceptance threshold (default depends on metric)");
    c_cl->add_option("--min-area", cl.min_area, "Foreground pixels needed to attempt a match")->capture_default_str();
    c_cl->add_option("--events", cl.events, "Event output file, '-' for stdout")->capture_default_str();
    c_cl->add_option("--annotate", cl.annotate_dir, "Write highlighted frames to this directory");
    c_cl->add_option("--config", cl.config, "JSON pipeline configuration; flags override it");
    c_cl->add_option("--classes", cl.classes, "Comma-separated class list");
    c_cl->callback([&] {
        if (cl.config.empty() && cl.roi.empty())
            throw CLI::RequiredError("--roi");
        action = [&] { return classify_cmd(cl, out, err); };
    });

    BandSelectArgs bs;
    auto* c_bs = app.add_subcommand("band-select", "Report per-band contrast and the dominant band");
    c_bs->add_option("--frame", bs.frame, "Current frame")->required();
    c_bs->add_option("--background", bs.background, "Background image")->required();
    c_bs->add_option("--roi", bs.roi, "Region of interest X,Y,W,H")->required();
    c_bs->add_option("--out-dir", bs.out_dir, "Write the three difference images here");
    c_bs->add_option("--fg-area", bs.fg_area, "CTT foreground sample X,Y,W,H in the frame");
    c_bs->add_option("--bg-area", bs.bg_area, "CTT background sample X,Y,W,H in the background");
    c_bs->callback([&] { action = [&] { return band_select_cmd(bs, out); }; });

    BinarizeArgs bz;
    auto* c_bz = app.add_subcommand("binarize", "Threshold the difference image over the roi");
    c_bz->add_option("--frame", bz.frame, "Current frame")->required();
    c_bz->add_option("--background", bz.background, "Background image")->required();
    c_bz->add_option("--roi", bz.roi, "Region of interest X,Y,W,H")->required();
    c_bz->add_option("--band", bz.band, "gray, red, green, blue or auto")->capture_default_str();
    c_bz->add_option("--threshold", bz.threshold, "auto or a fixed T")->capture_default_str();
    c_bz->add_option("--out", bz.out, "Output mask (.pbm or .png)")->required();
    c_bz->callback([&] { action = [&] { return binarize_cmd(bz, out); }; });

    EvalArgs ev;
    auto* c_ev = app.add_subcommand("eval", "Confusion matrix of events against ground truth");
    c_ev->add_option("--events", ev.events, "Event file written by classify")->required();
    c_ev->add_option("--truth", ev.truth, "Ground truth, one frame_index,class per line")->required();
    c_ev->add_option("--classes", ev.classes, "Comma-separated class order");
    c_ev->add_option("--csv", ev.csv, "Also write counts as CSV");
    c_ev->callback([&] { action = [&] { return eval_cmd(ev, out); }; });

    BenchArgs bn;
    auto* c_bn = app.add_subcommand("bench", "Time the matching kernels on synthetic scenes");
    c_bn->add_option("--sizes", bn.sizes, "Template sizes WxH,... (default: the four class silhouettes)");
    c_bn->add_option("--roi-size", bn.roi_size, "Search region WxH")->capture_default_str();
    c_bn->add_option("--repeat", bn.repeat, "Searches per cell")->capture_default_str();
    c_bn->add_option("--seed", bn.seed, "Scene generator seed")->capture_default_str();
    c_bn->callback([&] { action = [&] { return bench_cmd(bn, out); }; });

    ServeArgs sv;
    auto* c_sv = app.add_subcommand("serve", "HTTP facade for the template-authoring workbench");
    c_sv->add_option("--frames", sv.frames, "Frame directory")->required();
    c_sv->add_option("--templates", sv.templates, "Template store directory")->required();
    c_sv->add_option("--background", sv.background, "Precomputed background image");
    c_sv->add_option("--count", sv.count, "Background frames when --background is absent")->capture_default_str();
    c_sv->add_option("--port", sv.port, "Port (0 picks a free one)")->capture_default_str();
    c_sv->add_option("--host", sv.host, "Bind address")->capture_default_str();
    c_sv->add_option("--classes", sv.classes, "Comma-separated class list");
    c_sv->callback([&] { action = [&] { return serve_cmd(sv, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        return action();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == Errc::invalid_argument ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace bandmatch::cli
