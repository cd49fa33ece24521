#include "i2t/image.hpp"

#include <algorithm>
#include <cmath>

#include "i2t/errors.hpp"

namespace i2t {

const char* pixel_domain_name(PixelDomain d) {
    return d == PixelDomain::Unit ? "unit" : "byte";
}

namespace {

std::size_t expected_size(int height, int width) {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
           ImageTensor::kChannels;
}

void check_shape(int height, int width) {
    if (height < 1 || width < 1) {
        throw Error(ErrorCode::ShapeMismatch,
                    "image dimensions must be at least 1x1, got " + std::to_string(height) + "x" +
                        std::to_string(width));
    }
}

}  // namespace

ImageTensor::ImageTensor(int height, int width, PixelDomain domain, double fill)
    : height_(height), width_(width), domain_(domain) {
    check_shape(height, width);
    data_.assign(expected_size(height, width), fill);
}

ImageTensor::ImageTensor(int height, int width, PixelDomain domain, std::vector<double> data)
    : height_(height), width_(width), domain_(domain), data_(std::move(data)) {
    check_shape(height, width);
    if (data_.size() != expected_size(height, width)) {
        throw Error(ErrorCode::ShapeMismatch,
                    "data size " + std::to_string(data_.size()) + " does not match " +
                        std::to_string(height) + "x" + std::to_string(width) + "x3");
    }
}

bool ImageTensor::within_domain_bounds() const noexcept {
    if (domain_ == PixelDomain::Unit) {
        return std::all_of(data_.begin(), data_.end(),
                           [](double v) { return v >= 0.0 && v <= 1.0; });
    }
    return std::all_of(data_.begin(), data_.end(), [](double v) {
        return v >= 0.0 && v <= 255.0 && v == std::floor(v);
    });
}

ImageTensor to_unit_domain(const ImageTensor& img) {
    if (img.domain() != PixelDomain::Byte) {
        throw Error(ErrorCode::DomainMismatch, "to_unit_domain expects a byte-domain image");
    }
    std::vector<double> out(img.size());
    auto src = img.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[i] / 255.0;
    return {img.height(), img.width(), PixelDomain::Unit, std::move(out)};
}

ImageTensor to_byte_domain(const ImageTensor& img) {
    if (img.domain() != PixelDomain::Unit) {
        throw Error(ErrorCode::DomainMismatch, "to_byte_domain expects a unit-domain image");
    }
    std::vector<double> out(img.size());
    auto src = img.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::clamp(std::round(src[i] * 255.0), 0.0, 255.0);
    }
    return {img.height(), img.width(), PixelDomain::Byte, std::move(out)};
}

ImageTensor resize_bilinear(const ImageTensor& img, int out_height, int out_width) {
    check_shape(out_height, out_width);
    if (img.height() == out_height && img.width() == out_width) return img;

    ImageTensor out(out_height, out_width, img.domain());
    const double sy = static_cast<double>(img.height()) / out_height;
    const double sx = static_cast<double>(img.width()) / out_width;
    for (int y = 0; y < out_height; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height() - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_width; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width() - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = fx - x0;
            for (int c = 0; c < ImageTensor::kChannels; ++c) {
                const double top = img.at(y0, x0, c) * (1.0 - wx) + img.at(y0, x1, c) * wx;
                const double bot = img.at(y1, x0, c) * (1.0 - wx) + img.at(y1, x1, c) * wx;
                out.at(y, x, c) = top * (1.0 - wy) + bot * wy;
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> to_rgb8(const ImageTensor& img) {
    std::vector<std::uint8_t> out(img.size());
    auto src = img.values();
    if (img.domain() == PixelDomain::Byte) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<std::uint8_t>(std::clamp(src[i], 0.0, 255.0));
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = static_cast<std::uint8_t>(std::clamp(std::round(src[i] * 255.0), 0.0, 255.0));
        }
    }
    return out;
}

}  // namespace i2t
