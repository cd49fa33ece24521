#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "i2t/image.hpp"
#include "i2t/rng.hpp"

namespace i2t::testing {

inline ImageTensor random_unit_image(int height, int width, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<double> data(static_cast<std::size_t>(height) * width * 3);
    for (double& v : data) v = rng.uniform();
    return {height, width, PixelDomain::Unit, std::move(data)};
}

/// Central finite differences of a scalar function over the image pixels.
inline std::vector<double> finite_difference_grad(
    const ImageTensor& img, const std::function<double(const ImageTensor&)>& f, double h = 1e-4) {
    std::vector<double> grad(img.size());
    ImageTensor probe = img;
    auto vals = probe.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double orig = vals[i];
        vals[i] = orig + h;
        const double up = f(probe);
        vals[i] = orig - h;
        const double down = f(probe);
        vals[i] = orig;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

inline double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double relative_grad_error(const std::vector<double>& analytic,
                                  const std::vector<double>& reference) {
    std::vector<double> diff(analytic.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[i] - reference[i];
    const double denom = std::max(l2_norm(reference), 1e-30);
    return l2_norm(diff) / denom;
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("i2t_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace i2t::testing
