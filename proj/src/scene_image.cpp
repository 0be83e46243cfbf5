#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "gazeshutter/errors.hpp"
#include "gazeshutter/scene.hpp"

namespace gazeshutter {

SceneDescriptor base_descriptor(const std::filesystem::path& image) {
    cv::Mat bgr = cv::imread(image.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw DataError("cannot decode image: " + image.string());

    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(bgr.rows) * bgr.cols * 3);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            const std::size_t px = (static_cast<std::size_t>(y) * bgr.cols + x) * 3;
            rgb[px] = row[x][2];
            rgb[px + 1] = row[x][1];
            rgb[px + 2] = row[x][0];
        }
    }
    return base_descriptor_rgb(rgb, bgr.cols, bgr.rows);
}

}  // namespace gazeshutter
