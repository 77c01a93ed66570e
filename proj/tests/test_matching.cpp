#include "doctest.h"

#include <cmath>
#include <random>

#include "bandmatch/matching.hpp"
#include "bandmatch/synthetic.hpp"
#include "support/random_images.hpp"

using namespace bandmatch;
using bandmatch::testing::random_binary;

namespace {

// Reference scores written straight from the equations, one pixel at a time.
double naive_sad(const BinaryImage& t, const BinaryImage& img, Point at) {
    double s = 0;
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x)
            s += std::abs(double(t.at(x, y)) - double(img.at(at.x + x, at.y + y)));
    return s;
}

double naive_ssd(const BinaryImage& t, const BinaryImage& img, Point at) {
    double s = 0;
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const double d = double(t.at(x, y)) - double(img.at(at.x + x, at.y + y));
            s += d * d;
        }
    return s;
}

double naive_ncc(const BinaryImage& t, const BinaryImage& img, Point at) {
    double p = 0, q2 = 0;
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const double f = t.at(x, y), b = img.at(at.x + x, at.y + y);
            p += f * b;
            q2 += f * f * b * b;
        }
    return q2 == 0 ? 0.0 : p / std::sqrt(q2);
}

Template make_template(const BinaryImage& mask, std::string label = "car") {
    return Template(mask, std::move(label));
}

BinaryImage random_nonempty(std::mt19937_64& rng, int w, int h) {
    for (;;) {
        BinaryImage b = random_binary(rng, w, h);
        if (blob_pixel_count(b) > 0)
            return b;
    }
}

} // namespace

TEST_CASE("score functions on small fixtures") {
    const Template ones2 = make_template(BinaryImage(2, 2, true));
    const BinaryImage zeros(2, 2);
    const BinaryImage same(2, 2, true);

    CHECK(sad(ones2, same, {0, 0}) == 0.0);
    CHECK(sad(ones2, zeros, {0, 0}) == 4.0);
    CHECK(ssd(ones2, same, {0, 0}) == 0.0);
    CHECK(ncc(ones2, same, {0, 0}) == doctest::Approx(2.0));
    CHECK(ncc(ones2, zeros, {0, 0}) == 0.0);
    CHECK(score_at(Metric::ncc, ones2, same, {0, 0}) == doctest::Approx(2.0));

    CHECK_THROWS_AS(sad(ones2, same, {1, 0}), Error);
    CHECK_THROWS_AS(ncc(ones2, same, {0, 1}), Error);
    CHECK_THROWS_AS(ssd(ones2, same, {-1, 0}), Error);
}

TEST_CASE("scores equal naive oracles on random pairs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const Template t = make_template(random_nonempty(rng, 8, 8));
        const BinaryImage img = random_binary(rng, 8, 8);
        CHECK(sad(t, img, {0, 0}) == naive_sad(t.mask(), img, {0, 0}));
        CHECK(ssd(t, img, {0, 0}) == naive_ssd(t.mask(), img, {0, 0}));
        CHECK(ncc(t, img, {0, 0}) == doctest::Approx(naive_ncc(t.mask(), img, {0, 0})).epsilon(1e-12));
    }
    // Offsets in a larger image.
    for (int trial = 0; trial < 100; ++trial) {
        const Template t = make_template(random_nonempty(rng, 5, 3));
        const BinaryImage img = random_binary(rng, 13, 9);
        const Point at{static_cast<int>(rng() % 9), static_cast<int>(rng() % 7)};
        CHECK(sad(t, img, at) == naive_sad(t.mask(), img, at));
        CHECK(ncc(t, img, at) == doctest::Approx(naive_ncc(t.mask(), img, at)).epsilon(1e-12));
    }
}

TEST_CASE("sad equals ssd on every 2x2 binary pair") {
    int cases = 0;
    for (int a = 1; a < 16; ++a) {  // template needs at least one 1-pixel
        for (int b = 0; b < 16; ++b) {
            std::vector<std::uint8_t> ta(4), wb(4);
            for (int i = 0; i < 4; ++i) {
                ta[i] = (a >> i) & 1;
                wb[i] = (b >> i) & 1;
            }
            const Template t = make_template(BinaryImage(2, 2, ta));
            const BinaryImage w(2, 2, wb);
            REQUIRE(sad(t, w, {0, 0}) == ssd(t, w, {0, 0}));
            CHECK((sad(t, w, {0, 0}) == 0) == (a == b));
            ++cases;
        }
    }
    // The all-zero template is not a valid Template; its 16 pairs are trivially
    // zero for both metrics.
    for (int b = 0; b < 16; ++b) {
        std::vector<std::uint8_t> wb(4);
        for (int i = 0; i < 4; ++i)
            wb[i] = (b >> i) & 1;
        const BinaryImage zero(2, 2), w(2, 2, wb);
        REQUIRE(naive_sad(zero, w, {0, 0}) == naive_ssd(zero, w, {0, 0}));
        ++cases;
    }
    CHECK(cases == 256);
}

TEST_CASE("best_match") {
    const BinaryImage mask = synth::vehicle_mask("car");
    const Template t = make_template(mask);

    SUBCASE("planted copy is found with SAD 0") {
        const BinaryImage scene = paste(BinaryImage(120, 80), mask, {37, 21});
        const MatchScore s = best_match(scene, t, scene.bounds(), Metric::sad);
        CHECK(s.position == Point{37, 21});
        CHECK(s.raw == 0.0);
        CHECK(s.normalized == 0.0);
    }

    SUBCASE("uniform zero roi ties to the origin of the roi") {
        const BinaryImage scene(100, 60);
        const MatchScore s = best_match(scene, t, {10, 5, 80, 50}, Metric::sad);
        CHECK(s.position == Point{10, 5});
        CHECK(s.raw == static_cast<double>(blob_pixel_count(mask)));
        CHECK(s.normalized == doctest::Approx(s.raw / t.area()));
    }

    SUBCASE("100 random planted positions are recovered") {
        std::mt19937_64 rng(2024);
        const Roi roi{20, 10, 160, 100};
        for (int trial = 0; trial < 100; ++trial) {
            const int x = roi.x + static_cast<int>(rng() % (roi.w - mask.width() + 1));
            const int y = roi.y + static_cast<int>(rng() % (roi.h - mask.height() + 1));
            const BinaryImage scene = paste(BinaryImage(200, 120), mask, {x, y});
            const MatchScore s = best_match(scene, t, roi, Metric::sad);
            REQUIRE(s.position == Point{x, y});
            REQUIRE(s.raw == 0.0);
            const MatchScore q = best_match(scene, t, roi, Metric::ssd);
            REQUIRE(q.position == Point{x, y});
        }
    }

    SUBCASE("translation invariance of the minimal SAD") {
        std::mt19937_64 rng(5);
        const BinaryImage pattern = random_nonempty(rng, 12, 9);
        const Template pt = make_template(pattern);
        const BinaryImage a = paste(BinaryImage(60, 40), pattern, {3, 4});
        const BinaryImage b = paste(BinaryImage(60, 40), pattern, {30, 25});
        const MatchScore sa = best_match(a, pt, a.bounds(), Metric::sad);
        const MatchScore sb = best_match(b, pt, b.bounds(), Metric::sad);
        CHECK(sa.raw == sb.raw);
        CHECK(sa.position == Point{3, 4});
        CHECK(sb.position == Point{30, 25});
    }

    SUBCASE("exhaustive search equals a naive scan") {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 30; ++trial) {
            const BinaryImage img = random_binary(rng, 20, 14, 0.4);
            const Template tt = make_template(random_nonempty(rng, 4, 3));
            const Roi roi{2, 1, 15, 12};
            for (Metric m : {Metric::sad, Metric::ssd, Metric::ncc}) {
                double best = 0;
                Point bp{-1, -1};
                for (int y = roi.y; y + 3 <= roi.bottom(); ++y)
                    for (int x = roi.x; x + 4 <= roi.right(); ++x) {
                        const double v = m == Metric::sad   ? naive_sad(tt.mask(), img, {x, y})
                                         : m == Metric::ssd ? naive_ssd(tt.mask(), img, {x, y})
                                                            : naive_ncc(tt.mask(), img, {x, y});
                        const bool better = bp.x < 0 || (m == Metric::ncc ? v > best : v < best);
                        if (better) {
                            best = v;
                            bp = {x, y};
                        }
                    }
                const MatchScore s = best_match(img, tt, roi, m);
                REQUIRE(s.position == bp);
                REQUIRE(s.raw == doctest::Approx(best));
                CHECK(s.normalized >= 0.0);
                if (m != Metric::ncc) {
                    CHECK(s.normalized <= 1.0);
                    CHECK(s.normalized == doctest::Approx(s.raw / tt.area()));
                } else {
                    CHECK(s.normalized == s.raw);
                }
            }
        }
    }

    SUBCASE("template larger than the roi") {
        const BinaryImage scene(100, 100);
        CHECK_THROWS_AS(best_match(scene, t, {0, 0, 20, 20}, Metric::sad), Error);
        CHECK_THROWS_AS(best_match(scene, t, {90, 90, 20, 20}, Metric::sad), Error);
    }
}

TEST_CASE("classify") {
    const auto templates = synth::class_templates();
    const BinaryImage car = synth::vehicle_mask("car");
    const Roi roi{0, 0, 160, 60};

    SUBCASE("exact car copy") {
        const BinaryImage scene = paste(BinaryImage(160, 60), car, {50, 10});
        const ClassDecision d = classify(scene, templates, roi, Metric::sad, 0.25);
        CHECK(d.label == "car");
        REQUIRE(d.score);
        CHECK(d.score->normalized == 0.0);
        CHECK(d.template_id == "synthetic_car");
        CHECK(d.template_index == 0);
        CHECK(d.accepted());
    }

    SUBCASE("all-zero scene is rejected") {
        const BinaryImage scene(160, 60);
        const ClassDecision d = classify(scene, templates, roi, Metric::sad, 0.25);
        CHECK(d.label == "none");
        CHECK_FALSE(d.accepted());
        REQUIRE(d.score);
        CHECK(d.score->normalized > 0.25);
        const ClassDecision n = classify(scene, templates, roi, Metric::ncc, 1.0);
        CHECK(n.label == "none");
        CHECK(n.score->raw == 0.0);
    }

    SUBCASE("every class is recognized from its own shape") {
        for (Metric m : {Metric::sad, Metric::ssd, Metric::ncc}) {
            for (const auto& t : templates) {
                const BinaryImage scene = paste(BinaryImage(160, 60), t.mask(), {7, 9});
                const ClassDecision d =
                    classify(scene, templates, roi, m, default_accept_threshold(m));
                CHECK_MESSAGE(d.label == t.label(), to_string(m), " ", t.label());
            }
        }
    }

    SUBCASE("ties go to list order") {
        const Template a(BinaryImage(3, 3, true), "first");
        const Template b(BinaryImage(3, 3, true), "second");
        const std::vector<Template> both{a, b};
        const BinaryImage scene = paste(BinaryImage(20, 20), a.mask(), {4, 4});
        CHECK(classify(scene, both, scene.bounds(), Metric::sad, 0.25).label == "first");
        CHECK(classify(scene, both, scene.bounds(), Metric::ncc, 1.0).label == "first");
    }

    SUBCASE("winner is invariant under scaling the scores") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            const BinaryImage scene = random_binary(rng, 160, 60, 0.3);
            const ClassDecision plain = classify(scene, templates, roi, Metric::sad, 2.0);
            for (double k : {0.5, 3.0, 1000.0}) {
                const BestMatchFn scaled = [k](const BinaryImage& img, const Template& t,
                                               const Roi& r, Metric m) {
                    MatchScore s = best_match(img, t, r, m);
                    s.raw *= k;
                    s.normalized *= k;
                    return s;
                };
                const ClassDecision d =
                    classify(scene, templates, roi, Metric::sad, 2.0 * k, scaled);
                REQUIRE(d.template_index == plain.template_index);
                REQUIRE(d.label == plain.label);
            }
        }
    }

    SUBCASE("empty template list") {
        const std::vector<Template> none;
        CHECK_THROWS_AS(classify(BinaryImage(10, 10), none, {0, 0, 10, 10}, Metric::sad, 0.25),
                        Error);
    }
}

TEST_CASE("metric names") {
    CHECK(parse_metric("sad") == Metric::sad);
    CHECK(parse_metric("ncc") == Metric::ncc);
    CHECK_THROWS_AS(parse_metric("NCC"), Error);
    CHECK(parse_metric("ssd") == Metric::ssd);
    CHECK(to_string(Metric::ncc) == "ncc");
    CHECK_THROWS_AS(parse_metric("mad"), Error);
    CHECK(lower_is_better(Metric::sad));
    CHECK_FALSE(lower_is_better(Metric::ncc));
}
