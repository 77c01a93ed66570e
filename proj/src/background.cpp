#include "bandmatch/background.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace bandmatch {

BackgroundModel::BackgroundModel(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw Error(Errc::invalid_argument, "background dimensions must be positive");
    mean_.assign(static_cast<std::size_t>(width) * height * 3, 0.0);
}

void BackgroundModel::update(const RgbImage& frame) {
    if (frame.width() != width_ || frame.height() != height_)
        throw Error(Errc::dimension_mismatch,
                    fmt::format("frame is {}x{}, background model is {}x{}", frame.width(),
                                frame.height(), width_, height_));
    const double keep = static_cast<double>(k_) / static_cast<double>(k_ + 1);
    const double take = 1.0 / static_cast<double>(k_ + 1);
    auto px = frame.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        double* m = &mean_[i * 3];
        m[0] = keep * m[0] + take * px[i].r;
        m[1] = keep * m[1] + take * px[i].g;
        m[2] = keep * m[2] + take * px[i].b;
    }
    ++k_;
}

RgbImage BackgroundModel::snapshot() const {
    if (k_ == 0)
        throw Error(Errc::empty_model, "background model has not absorbed any frames");
    auto quantize = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    };
    std::vector<Rgb> out(static_cast<std::size_t>(width_) * height_);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {quantize(mean_[i * 3]), quantize(mean_[i * 3 + 1]), quantize(mean_[i * 3 + 2])};
    return RgbImage(width_, height_, std::move(out));
}

std::array<double, 3> BackgroundModel::mean_at(int x, int y) const noexcept {
    const double* m = &mean_[(static_cast<std::size_t>(y) * width_ + x) * 3];
    return {m[0], m[1], m[2]};
}

std::array<double, 3> BackgroundModel::global_mean() const noexcept {
    std::array<double, 3> sum{};
    for (std::size_t i = 0; i < mean_.size(); ++i)
        sum[i % 3] += mean_[i];
    const double n = static_cast<double>(width_) * height_;
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

BackgroundModel BackgroundModel::from_frames(std::span<const RgbImage> frames) {
    if (frames.empty())
        throw Error(Errc::empty_input, "no frames to build a background from");
    BackgroundModel model(frames.front().width(), frames.front().height());
    for (const auto& f : frames)
        model.update(f);
    return model;
}

} // namespace bandmatch
