// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every expected value comes from an oracle written here, not from the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>

#include <fmt/core.h>

#include "bandmatch/background.hpp"
#include "bandmatch/bandselect.hpp"
#include "bandmatch/evalkit.hpp"
#include "bandmatch/matching.hpp"
#include "bandmatch/pipeline.hpp"
#include "bandmatch/synthetic.hpp"
#include "support/random_images.hpp"

using namespace bandmatch;
using bandmatch::testing::random_binary;
using bandmatch::testing::random_rgb;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

// Runs one check, enforcing its time budget, and prints its verdict line.
void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs >= budget_s) {
        o.ok = false;
        o.detail += fmt::format("; exceeded {:.0f} s budget", budget_s);
    }
    if (!o.ok)
        ++failures;
    std::cout << fmt::format("{} {}: {} ({:.2f} s)\n", o.ok ? "PASS" : "FAIL", name, o.detail, secs)
              << std::flush;
}

// Independent score oracles, one pixel at a time.
double naive_sad(const BinaryImage& t, const BinaryImage& w) {
    double s = 0;
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x)
            s += std::abs(double(t.at(x, y)) - double(w.at(x, y)));
    return s;
}

double naive_ssd(const BinaryImage& t, const BinaryImage& w) {
    double s = 0;
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const double d = double(t.at(x, y)) - double(w.at(x, y));
            s += d * d;
        }
    return s;
}

double naive_ncc(const BinaryImage& t, const BinaryImage& w) {
    double p = 0, q = 0;
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const double f = t.at(x, y), b = w.at(x, y);
            p += f * b;
            q += f * f * b * b;
        }
    return q == 0 ? 0.0 : p / std::sqrt(q);
}

Outcome background_equivalence() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int seq = 0; seq < 100; ++seq) {
        std::vector<RgbImage> frames;
        for (int i = 0; i < 30; ++i)
            frames.push_back(random_rgb(rng, 32, 32));
        BackgroundModel model(32, 32);
        for (const auto& f : frames)
            model.update(f);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                double sum[3] = {0, 0, 0};
                for (const auto& f : frames) {
                    sum[0] += f.at(x, y).r;
                    sum[1] += f.at(x, y).g;
                    sum[2] += f.at(x, y).b;
                }
                const auto m = model.mean_at(x, y);
                for (int c = 0; c < 3; ++c)
                    worst = std::max(worst, std::abs(m[static_cast<std::size_t>(c)] - sum[c] / 30.0));
            }
    }
    return {worst <= 1e-6, fmt::format("max deviation {:.3g} over 100 sequences", worst)};
}

Outcome matching_oracles() {
    std::mt19937_64 rng(99);
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        BinaryImage t = random_binary(rng, 8, 8);
        if (blob_pixel_count(t) == 0)
            t = BinaryImage(8, 8, true);
        const BinaryImage w = random_binary(rng, 8, 8);
        const Template tmpl(t, "car");
        if (sad(tmpl, w, {0, 0}) != naive_sad(t, w) || ssd(tmpl, w, {0, 0}) != naive_ssd(t, w) ||
            ncc(tmpl, w, {0, 0}) != naive_ncc(t, w))
            ++mismatches;
    }
    return {mismatches == 0, fmt::format("{} of 1000 pairs differ", mismatches)};
}

Outcome sad_equals_ssd() {
    int mismatches = 0;
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
            std::vector<std::uint8_t> pa(4), pb(4);
            for (int k = 0; k < 4; ++k) {
                pa[static_cast<std::size_t>(k)] = (a >> k) & 1;
                pb[static_cast<std::size_t>(k)] = (b >> k) & 1;
            }
            const BinaryImage ta(2, 2, pa), wb(2, 2, pb);
            if (a == 0) {
                // An empty template is rejected by Template, so the identity
                // is checked on the formulas alone.
                mismatches += naive_sad(ta, wb) != naive_ssd(ta, wb);
                continue;
            }
            const Template tmpl(ta, "car");
            if (sad(tmpl, wb, {0, 0}) != ssd(tmpl, wb, {0, 0}) ||
                sad(tmpl, wb, {0, 0}) != naive_sad(ta, wb))
                ++mismatches;
        }
    return {mismatches == 0, fmt::format("{} of 256 pairs differ", mismatches)};
}

Outcome ncc_self_match() {
    const BinaryImage ones(2, 2, true);
    const double v = ncc(Template(ones, "car"), ones, {0, 0});
    return {v == 2.0, fmt::format("score {}", v)};
}

Outcome planted_recovery() {
    const auto templates = synth::class_templates();
    const Roi roi{0, 0, 200, 150};
    std::mt19937_64 rng(31);
    int exact = 0, noisy_labels = 0;
    for (int scene = 0; scene < 100; ++scene) {
        const Template& t = templates[static_cast<std::size_t>(scene) % templates.size()];
        std::uniform_int_distribution<int> px(0, roi.w - t.width()), py(0, roi.h - t.height());
        const Point at{px(rng), py(rng)};
        const BinaryImage clean = paste(BinaryImage(roi.w, roi.h), t.mask(), at);
        const ClassDecision d = classify(clean, templates, roi, Metric::sad, kDefaultSadAccept);
        if (d.label == t.label() && d.score && d.score->position == at)
            ++exact;
        const BinaryImage noisy = synth::salt_and_pepper(clean, 0.05, rng);
        if (classify(noisy, templates, roi, Metric::sad, kDefaultSadAccept).label == t.label())
            ++noisy_labels;
    }
    return {exact == 100 && noisy_labels >= 90,
            fmt::format("noiseless {}/100 exact, 5% flips {}/100 labels", exact, noisy_labels)};
}

Outcome band_fixed_inputs() {
    const Band a = dominant_band(BandAverages{75.15, 73.06, 3.12});
    const Band b = dominant_band(BandAverages{80.98, 90.01, 89.97});
    const Band c = ctt_select(CttVariances::from_sums(0.22, 0.32, 0.45));
    return {a == Band::red && b == Band::green && c == Band::blue,
            fmt::format("{}, {}, ctt {}", to_string(a), to_string(b), to_string(c))};
}

Outcome method_agreement() {
    std::mt19937_64 rng(4321);
    std::uniform_int_distribution<int> base(40, 200), delta(20, 55), band_pick(0, 2), pos(0, 40);
    const BinaryImage mask = synth::vehicle_mask("car");
    const Roi roi{0, 0, 96, 48};
    int agree = 0, planted = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto v = [&] { return static_cast<std::uint8_t>(base(rng)); };
        const RgbImage bg(96, 48, Rgb{v(), v(), v()});
        const Band band = kAllBands[static_cast<std::size_t>(band_pick(rng))];
        const int d = delta(rng) * (rng() % 2 ? 1 : -1);
        const Point at{pos(rng), pos(rng) % 10};
        const RgbImage frame = synth::paint_band(bg, mask, at, band, d);
        // The foreground sample lies inside the car body and the background
        // sample in a corner the car never reaches.
        const Roi fg{at.x + synth::kMaskMargin + 2, at.y + synth::kMaskMargin + 10, 6, 4};
        const Band dom = dominant_band(band_averages(band_deltas(bg, frame), roi));
        const Band ctt = ctt_select(ctt_variances(frame, bg, fg, Roi{88, 42, 6, 4}));
        agree += dom == ctt;
        planted += dom == band;
    }
    return {agree == 1000,
            fmt::format("{}/1000 agree, {}/1000 pick the planted band", agree, planted)};
}

Outcome blob_ratio() {
    std::vector<std::uint8_t> a(400, 0), b(400, 0);
    std::fill_n(a.begin(), 244, 1);
    std::fill_n(b.begin(), 100, 1);
    const double r = blob_quality_ratio(BinaryImage(20, 20, a), BinaryImage(20, 20, b));
    return {r == 2.44, fmt::format("ratio {}", r)};
}

Outcome throughput_ordering() {
    constexpr int kW = 768, kH = 576;
    const Roi roi{280, 200, 200, 150};
    const RgbImage road = synth::road_background(kW, kH, 17);
    const auto templates = synth::class_templates();
    std::vector<RgbImage> frames;
    for (int i = 0; i < 8; ++i) {
        const Template& t = templates[static_cast<std::size_t>(i) % templates.size()];
        const Point at{roi.x + 7 * i, roi.y + 9 * i % (roi.h - t.height())};
        frames.push_back(synth::paint(road, t.mask(), at, Rgb{20, 20, 20}));
    }
    std::map<Metric, double> fps;
    for (Metric m : {Metric::sad, Metric::ncc, Metric::ssd}) {
        PipelineConfig c;
        c.roi = roi;
        c.metric = m;
        c.accept_threshold = default_accept_threshold(m);
        const auto events = run(c, frames, templates, road);
        fps[m] = measure_throughput(events).mean_fps;
    }
    const bool ok = fps[Metric::sad] > fps[Metric::ncc] && fps[Metric::ssd] > fps[Metric::ncc] &&
                    fps[Metric::sad] >= 4.0;
    return {ok, fmt::format("mean fps sad={:.1f} ncc={:.1f} ssd={:.1f}", fps[Metric::sad],
                            fps[Metric::ncc], fps[Metric::ssd])};
}

Outcome pipeline_composition() {
    constexpr int kW = 320, kH = 200;
    const Roi roi{60, 40, 200, 140};
    const RgbImage road = synth::road_background(kW, kH, 5);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> jitter(-4, 4);
    std::vector<RgbImage> all;
    for (int i = 0; i < 5; ++i) {
        std::vector<Rgb> px(road.pixels().begin(), road.pixels().end());
        for (auto& p : px)
            p.b = static_cast<std::uint8_t>(std::clamp(p.b + jitter(rng), 0, 255));
        all.emplace_back(kW, kH, std::move(px));
    }
    const std::vector<RgbImage> bg = all;
    const auto templates = synth::class_templates();
    for (int i = 0; i < 10; ++i) {
        const Template& t = templates[static_cast<std::size_t>(i) % templates.size()];
        all.push_back(i == 4 ? road : synth::paint(road, t.mask(), {roi.x + 5 * i, roi.y + 3 * i}, Rgb{240, 240, 240}));
    }
    PipelineConfig c;
    c.roi = roi;
    c.background_frames = 5;
    c.threshold_mode = ThresholdMode::fixed;
    c.fixed_threshold = 35;
    const auto events = run(c, all, templates);

    // Composition written out from the module operations.
    const RgbImage background = BackgroundModel::from_frames(bg).snapshot();
    const GrayImage bg_gray = to_gray(background);
    int same = 0;
    for (std::size_t i = 0; i < 10 && i < events.size(); ++i) {
        const BinaryImage b = threshold(abs_diff(to_gray(all[5 + i]), bg_gray), 35);
        ClassDecision expected;
        if (blob_pixel_count(b, roi) >= c.presence_min_area)
            expected = classify(b, templates, roi, Metric::sad, kDefaultSadAccept);
        same += events[i].frame_index == static_cast<long>(5 + i) && events[i].decision == expected;
    }
    return {events.size() == 10 && same == 10,
            fmt::format("{} events, {} identical to the composition", events.size(), same)};
}

Outcome confusion_matrix() {
    const std::vector<std::string> classes{"car", "van", "lorry1", "lorry2"};
    const char* rows[20][2] = {
        {"car", "car"},         {"van", "van"},       {"lorry1", "lorry1"}, {"lorry2", "lorry2"},
        {"car", "van"},         {"van", "lorry1"},    {"lorry1", "none"},   {"lorry2", "lorry1"},
        {"car", "car"},         {"van", "van"},       {"lorry1", "lorry1"}, {"lorry2", "lorry2"},
        {"car", "none"},        {"car", "car"},       {"lorry1", "lorry2"}, {"lorry1", "lorry1"},
        {"car", "car"},         {"van", "van"},       {"lorry2", "lorry2"}, {"lorry1", "lorry1"}};
    // Hand tally of the list above (actual -> predicted: count).
    const std::map<std::pair<std::string, std::string>, long> hand{
        {{"car", "car"}, 4},       {{"car", "van"}, 1},    {{"car", "none"}, 1},
        {{"van", "van"}, 3},       {{"van", "lorry1"}, 1}, {{"lorry1", "lorry1"}, 4},
        {{"lorry1", "none"}, 1},   {{"lorry1", "lorry2"}, 1}, {{"lorry2", "lorry2"}, 3},
        {{"lorry2", "lorry1"}, 1}};
    std::vector<Prediction> pred;
    std::vector<TruthEntry> truth;
    for (long i = 0; i < 20; ++i) {
        pred.push_back({i, rows[i][1]});
        truth.push_back({i, rows[i][0]});
    }
    const ConfusionMatrix m = accumulate(pred, truth, classes);
    int wrong_cells = 0;
    for (const auto& a : classes)
        for (const auto& p : m.predicted_columns()) {
            const auto it = hand.find({a, p});
            wrong_cells += m.count(a, p) != (it == hand.end() ? 0 : it->second);
        }
    double worst = 0.0;
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix r(classes);
        for (const auto& a : classes)
            for (const auto& p : r.predicted_columns())
                if (const long n = static_cast<long>(rng() % 9); n && rng() % 3)
                    r.add(a, p, n);
        for (std::size_t row = 0; row < r.rows(); ++row) {
            if (r.row_total(row) == 0)
                continue;
            double sum = 0;
            for (std::size_t col = 0; col < r.columns(); ++col)
                sum += r.row_percent(row, col);
            worst = std::max(worst, std::abs(sum - 100.0));
        }
    }
    return {wrong_cells == 0 && worst <= 1e-6,
            fmt::format("{} cells differ from the hand tally, worst row-sum error {:.3g}",
                        wrong_cells, worst)};
}

} // namespace

int main() {
    criterion("background incremental equals batch mean", 5, background_equivalence);
    criterion("sad/ncc/ssd equal naive oracles", 5, matching_oracles);
    criterion("sad equals ssd on all 2x2 binary pairs", 0, sad_equals_ssd);
    criterion("ncc self-match of a 2x2 all-ones template", 0, ncc_self_match);
    criterion("planted template recovery", 30, planted_recovery);
    criterion("band selection fixed inputs", 0, band_fixed_inputs);
    criterion("dominant band agrees with ctt", 0, method_agreement);
    criterion("blob quality ratio 244/100", 0, blob_ratio);
    criterion("throughput ordering", 60, throughput_ordering);
    criterion("pipeline equals module composition", 0, pipeline_composition);
    criterion("confusion matrix tally and row sums", 0, confusion_matrix);
    std::cout << (failures == 0 ? "all criteria passed\n"
                                : fmt::format("{} criteria failed\n", failures));
    return failures == 0 ? 0 : 1;
}
