#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace i2t {

/// Value domain of an image tensor: unit floats in [0,1] or integral bytes 0..255.
enum class PixelDomain { Unit, Byte };

const char* pixel_domain_name(PixelDomain d);

/// H x W x 3 row-major image, the attack variable. Values are doubles; the
/// domain tag declares their admissible range. Immutable by convention once
/// handed to another component.
class ImageTensor {
public:
    static constexpr int kChannels = 3;

    /// 1x1 black unit image; the smallest valid tensor.
    ImageTensor() : ImageTensor(1, 1, PixelDomain::Unit) {}
    ImageTensor(int height, int width, PixelDomain domain, double fill = 0.0);
    ImageTensor(int height, int width, PixelDomain domain, std::vector<double> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    PixelDomain domain() const noexcept { return domain_; }
    std::size_t size() const noexcept { return data_.size(); }

    double at(int y, int x, int c) const {
        return data_[static_cast<std::size_t>((y * width_ + x) * kChannels + c)];
    }
    double& at(int y, int x, int c) {
        return data_[static_cast<std::size_t>((y * width_ + x) * kChannels + c)];
    }

    std::span<const double> values() const noexcept { return data_; }
    std::span<double> values() noexcept { return data_; }

    bool same_shape(const ImageTensor& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    /// True iff every value lies within the declared domain bounds
    /// (and is integral for the byte domain).
    bool within_domain_bounds() const noexcept;

    bool operator==(const ImageTensor&) const = default;

private:
    int height_;
    int width_;
    PixelDomain domain_;
    std::vector<double> data_;
};

/// byte -> unit, value/255. Total on valid input.
ImageTensor to_unit_domain(const ImageTensor& img);

/// unit -> byte, round to nearest and clamp to 0..255.
ImageTensor to_byte_domain(const ImageTensor& img);

/// Bilinear resize (pixel-center convention). Domain tag is preserved.
ImageTensor resize_bilinear(const ImageTensor& img, int out_height, int out_width);

/// Packed RGB8 buffer for hashing and PNG encoding. Unit images are quantized.
std::vector<std::uint8_t> to_rgb8(const ImageTensor& img);

/// Reads an 8-bit RGB PNG (gray/palette/alpha inputs are converted). Byte domain.
ImageTensor load_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Accepts either domain; unit images are quantized.
void save_png(const ImageTensor& img, const std::filesystem::path& path);

}  // namespace i2t
